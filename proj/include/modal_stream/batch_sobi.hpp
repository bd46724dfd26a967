#pragma once

#include <vector>

#include "modal_stream/foep.hpp"
#include "modal_stream/jad.hpp"
#include "modal_stream/linalg.hpp"

namespace modal_stream {

struct BatchSobiResult {
    CMat mixing;       // A = W^+ U_Z
    CMat whitening;    // W (applied operator)
    CMat unitary;      // U_Z
    CMat sources;      // n x N demixed series
    std::vector<int> lags_used;
    bool non_unique_warning = false;  // near-equal diagonalized lag profiles
};

/// (1/(N-p)) sum_k Y(k) Y(k-p)^H. Throws DimensionError for p >= N.
CMat batch_covariance(const CMat& Y, int lag);

/// Whitening from the EVD of the zero-lag covariance: W = Lambda^{-1/2} V^H.
/// Returns (Z, W). Throws RankDeficiencyError when the covariance is
/// numerically singular.
std::pair<CMat, CMat> batch_whiten(const CMat& Y);

/// Classical batch SOBI: whiten, JAD over symmetrized lagged covariances of
/// the whitened data, mixing = W^+ U_Z, sources = U_Z^H Z.
BatchSobiResult batch_sobi(const CMat& Y, const std::vector<int>& lags,
                           const JadOptions& jad = {.tol = 1e-8, .max_sweeps = 100});

/// Recursive-pipeline warm start computed from the first B samples.
struct PipelineInit {
    EigenspaceState eigenspace;
    std::vector<CMat> lagged;  // whitened lagged covariances, lag 1..T
    CMat unitary;              // U_0
};

PipelineInit initialize_pipeline(const CMat& Y_init, const std::vector<int>& lags,
                                 std::optional<double> forgetting = {},
                                 bool track_mean = true);

}  // namespace modal_stream
