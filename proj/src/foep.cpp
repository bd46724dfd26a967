#include "modal_stream/foep.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "modal_stream/errors.hpp"

namespace modal_stream {

std::pair<double, double> EigenspaceState::step_weights() const {
    if (forgetting) return {*forgetting, 1.0 - *forgetting};
    const double k = static_cast<double>(count);
    return {(k - 1.0) / k, 1.0 / k};
}

EigenspaceState initialize_eigenspace(const CMat& batch, std::optional<double> forgetting,
                                      bool track_mean) {
    const int n = static_cast<int>(batch.rows());
    const long long B = batch.cols();
    if (B < 2 * n) throw DimensionError("initialization batch must hold at least 2n samples");
    if (forgetting && (*forgetting <= 0.0 || *forgetting > 1.0)) {
        throw Error("forgetting factor must lie in (0, 1]");
    }

    EigenspaceState state;
    state.forgetting = forgetting;
    state.track_mean = track_mean;
    state.mean = track_mean ? CVec(batch.rowwise().mean()) : CVec(CVec::Zero(n));

    CMat centered = batch.colwise() - state.mean;
    CMat cov = (centered * centered.adjoint()) / static_cast<double>(B);
    cov = (cov + cov.adjoint()) / 2.0;

    Eigen::SelfAdjointEigenSolver<CMat> es(cov);
    if (es.info() != Eigen::Success) throw Error("covariance eigensolver failed");

    // ascending from Eigen; store descending
    state.eigvals = es.eigenvalues().reverse();
    state.eigvecs = es.eigenvectors().rowwise().reverse();
    state.count = B;

    const double top = state.eigvals(0);
    if (top <= 0.0 || state.eigvals(n - 1) < 1e-12 * top) {
        throw DegenerateInitError("initialization covariance is numerically rank deficient");
    }
    return state;
}

EigenspaceState sort_eigenpairs(const EigenspaceState& state) {
    const int n = state.dim();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return state.eigvals(a) > state.eigvals(b); });

    EigenspaceState sorted = state;
    for (int j = 0; j < n; ++j) {
        sorted.eigvals(j) = state.eigvals(order[j]);
        sorted.eigvecs.col(j) = state.eigvecs.col(order[j]);
    }
    return sorted;
}

EigenspaceState foep_update(const EigenspaceState& state, const CVec& y) {
    const int n = state.dim();
    if (static_cast<int>(y.size()) != n) throw DimensionError("sample dimension mismatch");
    if (!y.allFinite()) throw RejectedSampleError("non-finite sample rejected");
    if (state.count < 1) throw Error("eigenspace not initialized");

    EigenspaceState next = state;
    next.count = state.count + 1;
    const auto [a, b] = next.step_weights();

    if (next.track_mean) next.mean = a * state.mean + b * y;
    const CVec centered = y - next.mean;
    const CVec p = state.eigvecs.adjoint() * centered;

    // G = a Sigma + b P P^H; first-order eigenpair of the diagonally
    // dominant update: Omega_ii = G_ii, Psi_ij = G_ij / (G_jj - G_ii)
    Vec gdiag(n);
    for (int i = 0; i < n; ++i) gdiag(i) = a * state.eigvals(i) + b * std::norm(p(i));
    const double trace = gdiag.sum();

    CMat psi = CMat::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double den = gdiag(j) - gdiag(i);
            // near-degenerate pair: first-order rotation invalid, skip
            if (std::abs(den) < 1e-12 * std::max(trace, 1e-300)) continue;
            psi(i, j) = b * p(i) * std::conj(p(j)) / den;
        }
    }

    CMat v = state.eigvecs * psi;
    // thin QR with phase-fixed diagonal keeps V continuous and unitary
    Eigen::HouseholderQR<CMat> qr(v);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    const CMat r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    next.eigvecs = q;
    next.eigvals = gdiag.cwiseMax(0.0);
    return sort_eigenpairs(next);
}

std::pair<CVec, WhiteningOp> whiten(const EigenspaceState& state, const CVec& y,
                                    double eps_rel) {
    const int n = state.dim();
    if (static_cast<int>(y.size()) != n) throw DimensionError("sample dimension mismatch");

    const double top = state.eigvals(0);
    const double floor = eps_rel * top;
    for (int i = 0; i < n; ++i) {
        if (state.eigvals(i) < floor || state.eigvals(i) <= 0.0) {
            throw IllConditionedError("whitening eigenvalue below threshold", i);
        }
    }
    const Vec inv_sqrt = state.eigvals.cwiseSqrt().cwiseInverse();
    WhiteningOp op;
    op.forward = inv_sqrt.asDiagonal() * state.eigvecs.adjoint();
    op.inverse = state.eigvecs * state.eigvals.cwiseSqrt().asDiagonal();
    CVec z = op.forward * (y - state.mean);
    return {std::move(z), std::move(op)};
}

std::vector<double> serialize_eigenspace(const EigenspaceState& state) {
    const int n = state.dim();
    std::vector<double> blob;
    blob.reserve(4 + n + 2 * n * n + 2 * n);
    blob.push_back(static_cast<double>(n));
    blob.push_back(static_cast<double>(state.count));
    blob.push_back(state.forgetting ? *state.forgetting : -1.0);
    blob.push_back(state.track_mean ? 1.0 : 0.0);
    for (int i = 0; i < n; ++i) blob.push_back(state.eigvals(i));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            blob.push_back(state.eigvecs(i, j).real());
            blob.push_back(state.eigvecs(i, j).imag());
        }
    }
    for (int i = 0; i < n; ++i) {
        blob.push_back(state.mean(i).real());
        blob.push_back(state.mean(i).imag());
    }
    return blob;
}

EigenspaceState deserialize_eigenspace(const std::vector<double>& blob) {
    if (blob.size() < 4) throw Error("eigenspace blob truncated");
    const int n = static_cast<int>(blob[0]);
    const std::size_t expect = 4 + n + 2 * n * n + 2 * n;
    if (blob.size() != expect) throw Error("eigenspace blob has the wrong length");

    EigenspaceState state;
    state.count = static_cast<long long>(blob[1]);
    if (blob[2] > 0.0) state.forgetting = blob[2];
    state.track_mean = blob[3] != 0.0;
    state.eigvals = Vec(n);
    state.eigvecs = CMat(n, n);
    state.mean = CVec(n);
    std::size_t at = 4;
    for (int i = 0; i < n; ++i) state.eigvals(i) = blob[at++];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            state.eigvecs(i, j) = Complex(blob[at], blob[at + 1]);
            at += 2;
        }
    }
    for (int i = 0; i < n; ++i) {
        state.mean(i) = Complex(blob[at], blob[at + 1]);
        at += 2;
    }
    return state;
}

}  // namespace modal_stream
