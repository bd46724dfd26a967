#pragma once

#include <string>
#include <utility>
#include <vector>

#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// Linear MDOF structural model: M ẍ + C ẋ + K x = f(t).
struct SystemModel {
    Mat mass;       // n x n, kg, symmetric positive definite
    Mat damping;    // n x n, N s/m
    Mat stiffness;  // n x n, N/m, symmetric
    std::vector<std::string> dof_labels;

    int dof() const { return static_cast<int>(mass.rows()); }

    /// Throws DimensionError / SingularMassError when the invariants fail.
    void validate() const;
};

/// First-order realization u̇ = A u + B f, y = C_out u.
struct StateSpaceModel {
    Mat state_matrix;   // 2n x 2n
    Mat input_matrix;   // 2n x m
    Mat output_matrix;  // p x 2n
    Mat mass_inverse;   // n x n, kept for event re-discretization

    int states() const { return static_cast<int>(state_matrix.rows()); }
    int dof() const { return states() / 2; }
};

/// Reference modal data for validation.
struct ModalGroundTruth {
    Mat real_modes;        // n x n, columns = mass-normalized modes
    CMat complex_modes;    // n x n, one column per conjugate pair (Im λ > 0)
    Vec natural_freqs_hz;  // ascending
    Vec damping_ratios;
    Vec modal_masses;
};

enum class OutputKind { Displacement, Acceleration };

/// A = [[0, I], [-M^-1 K, -M^-1 C]], B = [0; M^-1].
StateSpaceModel build_state_space(const SystemModel& model,
                                  OutputKind output = OutputKind::Displacement);

/// C = alpha M + beta K with equal damping ratio `zeta` at the two anchor
/// modes (0-based indices into the ascending undamped spectrum).
Mat rayleigh_damping(const Mat& mass, const Mat& stiffness, double zeta,
                     std::pair<int, int> anchor_modes);

/// Real modes from the (K, M) generalized eigenproblem, complex modes from
/// the state matrix. Frequencies sorted ascending; every mode column has its
/// largest-magnitude entry made positive (real) / real-positive (complex).
ModalGroundTruth ground_truth(const SystemModel& model);

/// |a^H b|^2 / (a^H a)(b^H b), shared via metrics.hpp as well.
/// Canonical sign: flip the column so its largest-|entry| is positive.
void canonicalize_mode_signs(Mat& modes);

}  // namespace modal_stream
