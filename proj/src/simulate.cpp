#include "modal_stream/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "modal_stream/errors.hpp"

namespace modal_stream {

void SimulationConfig::validate() const {
    if (dt <= 0.0) throw Error("dt must be positive");
    if (duration < dt) throw Error("duration must cover at least one step");
    if (ensemble_size < 1) throw Error("ensemble_size must be >= 1");
    if (noise_intensity < 0.0) throw Error("noise_intensity must be nonnegative");
}

Mat wgn_excitation(const SimulationConfig& config, int dof_count) {
    config.validate();
    const int N = config.sample_count();
    Mat series = Mat::Zero(dof_count, N);
    if (config.noise_intensity == 0.0) return series;

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, config.noise_intensity);
    for (int k = 0; k < N; ++k) {
        for (int ch = 0; ch < dof_count; ++ch) series(ch, k) = gauss(rng);
    }
    return series;
}

namespace {

// exact ZOH discretization via the augmented exponential
// exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
std::pair<Mat, Mat> discretize(const Mat& A, const Mat& B, double dt) {
    const int ns = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Mat aug = Mat::Zero(ns + m, ns + m);
    aug.topLeftCorner(ns, ns) = A * dt;
    aug.topRightCorner(ns, m) = B * dt;
    const Mat e = aug.exp();
    return {e.topLeftCorner(ns, ns), e.topRightCorner(ns, m)};
}

void check_stable(const Mat& A) {
    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    const CVec lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (int i = 0; i < lam.size(); ++i) {
        if (lam(i).real() > 1e-8 * scale) {
            throw DivergenceError("state matrix has an eigenvalue with positive real part");
        }
    }
}

}  // namespace

Mat simulate(const StateSpaceModel& model, const Mat& excitation,
             const SimulationConfig& config, const std::vector<ScenarioEvent>& events,
             const Vec& initial_state) {
    config.validate();
    const int N = config.sample_count();
    if (excitation.cols() != N) {
        throw DimensionError("excitation length must equal duration/dt");
    }
    if (excitation.rows() != model.input_matrix.cols()) {
        throw DimensionError("excitation channel count must match the input matrix");
    }
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].at_time < events[i - 1].at_time) {
            throw Error("events must be sorted by time");
        }
    }

    const int n = model.dof();
    check_stable(model.state_matrix);

    auto [Ad, Bd] = discretize(model.state_matrix, model.input_matrix, config.dt);

    Mat out = Mat::Zero(model.output_matrix.rows(), N);
    Vec x = Vec::Zero(model.states());
    if (initial_state.size() > 0) {
        if (initial_state.size() != model.states()) {
            throw DimensionError("initial state dimension mismatch");
        }
        x = initial_state;
    }
    std::size_t next_event = 0;
    Mat A_current = model.state_matrix;

    for (int k = 0; k < N; ++k) {
        if (next_event < events.size() &&
            k == static_cast<int>(events[next_event].at_time / config.dt + 0.5)) {
            const Mat& Cnew = events[next_event].new_damping;
            if (Cnew.rows() != n || Cnew.cols() != n) {
                throw DimensionError("event damping matrix has the wrong dimension");
            }
            A_current.bottomRightCorner(n, n) = -model.mass_inverse * Cnew;
            check_stable(A_current);
            std::tie(Ad, Bd) = discretize(A_current, model.input_matrix, config.dt);
            ++next_event;
        }
        out.col(k) = model.output_matrix * x;
        x = Ad * x + Bd * excitation.col(k);
    }
    return out;
}

Vec duhamel_modal_response(double freq_hz, double zeta, double modal_mass,
                           const Vec& force_series, double dt) {
    if (freq_hz <= 0.0) throw Error("frequency must be positive");
    if (zeta < 0.0 || zeta >= 1.0) throw Error("zeta must lie in [0, 1)");

    const int N = static_cast<int>(force_series.size());
    const double wn = 2.0 * kPi * freq_hz;
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);

    Vec h = Vec::Zero(N);
    for (int k = 0; k < N; ++k) {
        const double t = k * dt;
        h(k) = std::exp(-zeta * wn * t) * std::sin(wd * t) / (modal_mass * wd);
    }

    // trapezoidal convolution: q[k] = dt * sum_j w_j f[j] h[k-j]
    Vec q = Vec::Zero(N);
    for (int k = 0; k < N; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) {
            double w = (j == 0 || j == k) ? 0.5 : 1.0;
            acc += w * force_series(j) * h(k - j);
        }
        q(k) = dt * acc;
    }
    return q;
}

}  // namespace modal_stream
