#include "modal_stream/jad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "modal_stream/errors.hpp"

namespace modal_stream {

namespace {

void validate_stack(const MatrixStack& stack) {
    if (stack.mats.empty()) throw DimensionError("empty matrix stack");
    const auto n = stack.mats[0].rows();
    for (const CMat& m : stack.mats) {
        if (m.rows() != n || m.cols() != n) {
            throw DimensionError("stack matrices must share one square dimension");
        }
        if (!m.allFinite()) throw InvalidStackError("non-finite entry in matrix stack");
    }
}

double offdiag_sum(const std::vector<CMat>& mats) {
    double J = 0.0;
    for (const CMat& m : mats) {
        J += m.squaredNorm() - m.diagonal().squaredNorm();
    }
    return J;
}

}  // namespace

double offdiag_cost(const CMat& unitary, const MatrixStack& stack) {
    validate_stack(stack);
    if (unitary.rows() != stack.mats[0].rows() || unitary.cols() != unitary.rows()) {
        throw DimensionError("unitary dimension mismatch");
    }
    double J = 0.0;
    for (const CMat& m : stack.mats) {
        const CMat d = unitary.adjoint() * m * unitary;
        J += d.squaredNorm() - d.diagonal().squaredNorm();
    }
    return J;
}

JadResult joint_diagonalize(const MatrixStack& stack, const JadOptions& options,
                            const std::optional<CMat>& initial) {
    validate_stack(stack);
    const int n = stack.dim();
    if (n < 2) throw DimensionError("joint diagonalization needs dimension >= 2");

    const int T = stack.size();
    CMat U = initial.value_or(CMat::Identity(n, n));
    if (U.rows() != n || U.cols() != n) throw DimensionError("initial unitary dimension mismatch");

    std::vector<CMat> A;
    A.reserve(T);
    for (const CMat& m : stack.mats) A.push_back(U.adjoint() * m * U);

    JadResult result;
    double prev = offdiag_sum(A);

    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                // accumulate the 3x3 real form of the pair-restricted cost
                Eigen::Matrix3cd g3 = Eigen::Matrix3cd::Zero();
                for (const CMat& Ak : A) {
                    Eigen::Vector3cd g(Ak(p, p) - Ak(q, q), Ak(p, q), Ak(q, p));
                    g3 += g * g.adjoint();
                }
                // B g3 B^H with B = [[1,0,0],[0,1,1],[0,-i,i]]
                Eigen::Matrix3cd Bm;
                Bm << Complex(1, 0), Complex(0, 0), Complex(0, 0),
                      Complex(0, 0), Complex(1, 0), Complex(1, 0),
                      Complex(0, 0), Complex(0, -1), Complex(0, 1);
                const Eigen::Matrix3d M3 = (Bm * g3 * Bm.adjoint()).real();

                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M3);
                Eigen::Vector3d angles = es.eigenvectors().col(2);  // largest eigenvalue
                if (angles(0) < 0.0) angles = -angles;

                const double c = std::sqrt(0.5 + angles(0) / 2.0);
                const Complex s = 0.5 * Complex(angles(1), -angles(2)) / c;
                if (std::abs(s) <= options.rotation_threshold) continue;

                rotated = true;
                // rows p,q by G^H, columns p,q by G, G = [[c, -conj(s)], [s, c]]
                for (CMat& Ak : A) {
                    const Eigen::RowVectorXcd rp = Ak.row(p);
                    const Eigen::RowVectorXcd rq = Ak.row(q);
                    Ak.row(p) = c * rp + std::conj(s) * rq;
                    Ak.row(q) = -s * rp + c * rq;
                    const CVec cp = Ak.col(p);
                    const CVec cq = Ak.col(q);
                    Ak.col(p) = c * cp + s * cq;
                    Ak.col(q) = -std::conj(s) * cp + c * cq;
                }
                const CVec up = U.col(p);
                const CVec uq = U.col(q);
                U.col(p) = c * up + s * uq;
                U.col(q) = -std::conj(s) * up + c * uq;
            }
        }
        const double J = offdiag_sum(A);
        result.cost_history.push_back(J);
        result.sweeps_used = sweep + 1;
        if (!rotated) break;
        if (options.tol > 0.0 && prev - J <= options.tol * std::max(prev, 1e-300)) {
            break;
        }
        prev = J;
    }

    result.unitary = std::move(U);
    return result;
}

}  // namespace modal_stream
