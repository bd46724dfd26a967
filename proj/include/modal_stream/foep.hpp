#pragma once

#include <optional>
#include <vector>

#include "modal_stream/analytic_signal.hpp"
#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// Recursively maintained eigenspace of the complex data covariance.
/// eigvecs stays unitary (re-orthonormalized each update), eigvals sorted
/// descending. `forgetting`, when set, replaces the 1/k sample weights with
/// EWMA weights (lambda, 1-lambda).
struct EigenspaceState {
    CMat eigvecs;   // n x n, V_k
    Vec eigvals;    // n, diag Sigma_k, descending, >= 0
    long long count = 0;
    CVec mean;      // recursive mean (zero when track_mean is off)
    std::optional<double> forgetting;
    bool track_mean = true;

    int dim() const { return static_cast<int>(eigvecs.rows()); }

    /// (a, b) weights of the covariance recursion at step `count`.
    std::pair<double, double> step_weights() const;
};

/// First-order perturbation factors of one rank-one update.
struct PerturbationPair {
    CMat eigvec_pert;  // Psi_k = I + dV
    Vec eigval_pert;   // diag Omega_k
};

/// The whitening operator derived from an eigenspace snapshot:
/// forward = Sigma^{-1/2} V^H (applied to centered data), inverse = V Sigma^{1/2}.
struct WhiteningOp {
    CMat forward;
    CMat inverse;
};

/// Full Hermitian EVD of the covariance of an n x B batch (B >= 2n).
/// Throws DegenerateInitError when the eigenvalue ratio collapses below 1e-12.
EigenspaceState initialize_eigenspace(const CMat& batch,
                                      std::optional<double> forgetting = {},
                                      bool track_mean = true);

/// One rank-one recursive eigenspace update (mean update, first-order
/// perturbation, QR re-orthonormalization, descending re-sort).
/// Throws RejectedSampleError on non-finite input; the input state is
/// untouched either way.
EigenspaceState foep_update(const EigenspaceState& state, const CVec& y);

/// Stable descending sort of the eigenpairs.
EigenspaceState sort_eigenpairs(const EigenspaceState& state);

/// z = Sigma^{-1/2} V^H (y - mu). Throws IllConditionedError (with the
/// offending eigenvalue index) when an eigenvalue falls below
/// eps_rel * max eigenvalue.
std::pair<CVec, WhiteningOp> whiten(const EigenspaceState& state, const CVec& y,
                                    double eps_rel = 1e-10);

/// Serialization for resumable runs: dimensions then row-major complex
/// doubles (see manifest snapshot format).
std::vector<double> serialize_eigenspace(const EigenspaceState& state);
EigenspaceState deserialize_eigenspace(const std::vector<double>& blob);

}  // namespace modal_stream
