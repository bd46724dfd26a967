#pragma once

#include <vector>

#include "modal_stream/linalg.hpp"
#include "modal_stream/system_model.hpp"

namespace modal_stream {

struct SimulationConfig {
    double dt = 0.01;              // s
    double duration = 10.0;        // s
    double noise_intensity = 1.0;  // force std dev, N
    unsigned long long seed = 0;
    int ensemble_size = 1;

    int sample_count() const { return static_cast<int>(duration / dt + 0.5); }
    void validate() const;
};

/// Mid-run damping swap (e.g. sudden transition to non-proportional damping).
struct ScenarioEvent {
    double at_time;   // s, 0 < at_time < duration
    Mat new_damping;  // n x n
};

/// i.i.d. zero-mean white Gaussian force per channel, std = noise_intensity.
/// Layout: dof_count x N, reproducible from config.seed.
Mat wgn_excitation(const SimulationConfig& config, int dof_count);

/// Exact zero-order-hold discretization of (A, B); re-discretized at each
/// event boundary. Returns the p x N output series. `initial_state` defaults
/// to rest.
/// Throws DivergenceError when A has an eigenvalue with positive real part.
Mat simulate(const StateSpaceModel& model, const Mat& excitation,
             const SimulationConfig& config,
             const std::vector<ScenarioEvent>& events = {},
             const Vec& initial_state = Vec());

/// SDOF Duhamel convolution oracle:
/// q(t) = int f(tau) h(t - tau) dtau,  h(t) = e^{-z w t} sin(w_d t)/(m w_d),
/// trapezoidal quadrature on the sampled force series.
Vec duhamel_modal_response(double freq_hz, double zeta, double modal_mass,
                           const Vec& force_series, double dt);

}  // namespace modal_stream
