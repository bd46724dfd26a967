#include "modal_stream/batch_sobi.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "modal_stream/errors.hpp"

namespace modal_stream {

CMat batch_covariance(const CMat& Y, int lag) {
    const auto N = Y.cols();
    if (lag < 0 || lag >= N) throw DimensionError("lag must lie in [0, N)");
    const auto M = N - lag;
    return (Y.rightCols(M) * Y.leftCols(M).adjoint()) / static_cast<double>(M);
}

namespace {

struct WhitenEvd {
    CMat Z;
    CMat W;
    CMat V;
    Vec lambda;
};

WhitenEvd whiten_evd(const CMat& Y) {
    CMat R0 = batch_covariance(Y, 0);
    R0 = (R0 + R0.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(R0);
    if (es.info() != Eigen::Success) throw Error("zero-lag covariance eigensolver failed");

    WhitenEvd out;
    out.lambda = es.eigenvalues().reverse();
    out.V = es.eigenvectors().rowwise().reverse();
    const double top = out.lambda(0);
    if (top <= 0.0 || out.lambda(out.lambda.size() - 1) < 1e-12 * top) {
        throw RankDeficiencyError("zero-lag covariance is numerically singular");
    }
    out.W = out.lambda.cwiseSqrt().cwiseInverse().asDiagonal() * out.V.adjoint();
    out.Z = out.W * Y;
    return out;
}

}  // namespace

std::pair<CMat, CMat> batch_whiten(const CMat& Y) {
    WhitenEvd evd = whiten_evd(Y);
    return {std::move(evd.Z), std::move(evd.W)};
}

BatchSobiResult batch_sobi(const CMat& Y, const std::vector<int>& lags,
                           const JadOptions& jad) {
    if (Y.rows() < 2) throw DimensionError("batch SOBI needs at least 2 channels");
    if (lags.empty()) throw Error("lag set must be non-empty");

    const WhitenEvd evd = whiten_evd(Y);

    MatrixStack stack;
    stack.labels = lags;
    for (int p : lags) {
        CMat R = batch_covariance(evd.Z, p);
        stack.mats.push_back((R + R.adjoint()) / 2.0);
    }
    const JadResult jd = joint_diagonalize(stack, jad);

    BatchSobiResult res;
    res.whitening = evd.W;
    res.unitary = jd.unitary;
    res.mixing = evd.V * evd.lambda.cwiseSqrt().asDiagonal() * jd.unitary;  // W^+ U
    res.sources = jd.unitary.adjoint() * evd.Z;
    res.lags_used = lags;

    // near-equal diagonalized lag profiles make the rotation non-unique
    const int n = static_cast<int>(Y.rows());
    Mat profile(n, static_cast<int>(lags.size()));
    for (std::size_t t = 0; t < stack.mats.size(); ++t) {
        const CMat D = jd.unitary.adjoint() * stack.mats[t] * jd.unitary;
        profile.col(static_cast<int>(t)) = D.diagonal().real();
    }
    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            min_sep = std::min(min_sep,
                               (profile.row(i) - profile.row(j)).cwiseAbs().maxCoeff());
        }
    }
    // whitened variance is 1, so 0.05 is 5% of the natural scale
    res.non_unique_warning = min_sep < 0.05;
    return res;
}

PipelineInit initialize_pipeline(const CMat& Y_init, const std::vector<int>& lags,
                                 std::optional<double> forgetting, bool track_mean) {
    if (lags.empty()) throw Error("lag set must be non-empty");

    PipelineInit init;
    init.eigenspace = initialize_eigenspace(Y_init, forgetting, track_mean);

    const CMat centered = Y_init.colwise() - init.eigenspace.mean;
    const CMat W =
        init.eigenspace.eigvals.cwiseSqrt().cwiseInverse().asDiagonal() *
        init.eigenspace.eigvecs.adjoint();
    const CMat Z = W * centered;

    MatrixStack stack;
    stack.labels = lags;
    for (int p : lags) {
        if (p >= Z.cols()) throw DimensionError("initialization window shorter than max lag");
        CMat R = batch_covariance(Z, p);
        init.lagged.push_back(R);
        stack.mats.push_back((R + R.adjoint()) / 2.0);
    }
    init.unitary = joint_diagonalize(stack, {.tol = 1e-8, .max_sweeps = 100}).unitary;
    return init;
}

}  // namespace modal_stream
