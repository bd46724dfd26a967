#include "modal_stream/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/FFT>

#include "modal_stream/errors.hpp"

namespace modal_stream {

double mac(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw DimensionError("MAC vectors must match in length");
    const double na = a.squaredNorm();
    const double nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) throw Error("MAC of a zero vector is undefined");
    const Complex inner = a.adjoint() * b;
    return std::norm(inner) / (na * nb);
}

double mac(const Vec& a, const Vec& b) {
    return mac(CVec(a.cast<Complex>()), CVec(b.cast<Complex>()));
}

namespace {

// exact min-cost assignment (potentials form), n <= a few dozen here
std::vector<int> hungarian_min(const Mat& cost) {
    const int n = static_cast<int>(cost.rows());
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, INF);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = INF;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_of_col(n);
    for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
    return row_of_col;
}

MacReport align_impl(const CMat& identified, const CMat& truth) {
    if (identified.rows() != truth.rows() || identified.cols() != truth.cols()) {
        throw DimensionError("mode matrices must share dimensions");
    }
    const int n = static_cast<int>(truth.cols());
    MacReport report;
    report.mac_matrix = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            report.mac_matrix(i, j) = mac(CVec(identified.col(i)), CVec(truth.col(j)));
        }
    }
    report.assignment = hungarian_min(-report.mac_matrix);
    report.per_mode_mac = Vec(n);
    for (int j = 0; j < n; ++j) {
        report.per_mode_mac(j) = report.mac_matrix(report.assignment[j], j);
    }
    return report;
}

}  // namespace

MacReport align_modes(const CMat& identified, const CMat& truth) {
    return align_impl(identified, truth);
}

MacReport align_modes(const Mat& identified, const Mat& truth) {
    return align_impl(identified.cast<Complex>(), truth.cast<Complex>());
}

double collinearity_index(const CVec& mode) {
    if (mode.size() == 0 || mode.norm() == 0.0) {
        throw Error("collinearity of a zero vector is undefined");
    }
    Mat stack(2, mode.size());
    stack.row(0) = mode.real().transpose();
    stack.row(1) = mode.imag().transpose();
    Eigen::JacobiSVD<Mat> svd(stack);
    const Vec s = svd.singularValues();
    return s(0) / std::sqrt(s.squaredNorm());
}

PsdEstimate psd(const Vec& series, double dt, int window) {
    const int N = static_cast<int>(series.size());
    if (window < 8) throw Error("PSD window too small");
    if (N < 2 * window) throw TooShortError("series must cover at least two windows");

    const int hop = window / 2;
    const int segments = (N - window) / hop + 1;
    const double fs = 1.0 / dt;

    Vec hann(window);
    for (int i = 0; i < window; ++i) {
        hann(i) = 0.5 * (1.0 - std::cos(2.0 * kPi * i / window));
    }
    const double win_power = hann.squaredNorm();

    const int bins = window / 2 + 1;
    Vec power = Vec::Zero(bins);
    Eigen::FFT<double> fft;
    std::vector<Complex> freq(window), time(window);

    for (int s = 0; s < segments; ++s) {
        const int off = s * hop;
        for (int i = 0; i < window; ++i) {
            time[i] = Complex(series(off + i) * hann(i), 0.0);
        }
        fft.fwd(freq, time);
        for (int k = 0; k < bins; ++k) power(k) += std::norm(freq[k]);
    }
    power /= segments * fs * win_power;
    for (int k = 1; k + 1 < bins; ++k) power(k) *= 2.0;  // one-sided

    PsdEstimate est;
    est.frequency = Vec::LinSpaced(bins, 0.0, fs / 2.0);
    est.power = power;
    return est;
}

double dominant_frequency(const PsdEstimate& estimate) {
    const int bins = static_cast<int>(estimate.power.size());
    if (bins < 3) throw Error("PSD too short for peak search");
    int peak = 1;
    for (int k = 2; k + 1 < bins; ++k) {
        if (estimate.power(k) > estimate.power(peak)) peak = k;
    }
    // parabolic refinement on log power
    const double L = std::log(std::max(estimate.power(peak - 1), 1e-300));
    const double C = std::log(std::max(estimate.power(peak), 1e-300));
    const double R = std::log(std::max(estimate.power(peak + 1), 1e-300));
    const double den = L - 2.0 * C + R;
    const double delta = std::abs(den) > 0.0 ? 0.5 * (L - R) / den : 0.0;
    const double df = estimate.frequency(1) - estimate.frequency(0);
    return estimate.frequency(peak) + std::clamp(delta, -0.5, 0.5) * df;
}

MacConvergence mac_convergence(const ModalTrack& track, int stride) {
    if (stride < 1) throw Error("stride must be positive");
    MacConvergence conv;
    const std::size_t count = track.sample_index.size();
    for (std::size_t i = 0; i < count; ++i) {
        if (i % stride == 0 || i + 1 == count) {
            if (track.mac_series[i].size() == 0) continue;
            conv.sample_index.push_back(track.sample_index[i]);
            conv.per_mode_mac.push_back(track.mac_series[i]);
        }
    }
    return conv;
}

}  // namespace modal_stream
