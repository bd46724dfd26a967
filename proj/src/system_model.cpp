#include "modal_stream/system_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "modal_stream/errors.hpp"

namespace modal_stream {

namespace {

bool is_symmetric(const Mat& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

}  // namespace

void SystemModel::validate() const {
    const auto n = mass.rows();
    if (n < 1) throw DimensionError("system model must have at least one DOF");
    if (mass.cols() != n || damping.rows() != n || damping.cols() != n ||
        stiffness.rows() != n || stiffness.cols() != n) {
        throw DimensionError("mass/damping/stiffness must be square with equal dimension");
    }
    if (!is_symmetric(mass, 1e-10)) throw Error("mass matrix must be symmetric");
    if (!is_symmetric(stiffness, 1e-10)) throw Error("stiffness matrix must be symmetric");
    Eigen::LLT<Mat> llt(mass);
    if (llt.info() != Eigen::Success) throw Error("mass matrix must be positive definite");
}

StateSpaceModel build_state_space(const SystemModel& model, OutputKind output) {
    model.validate();
    const int n = model.dof();

    Eigen::FullPivLU<Mat> lu(model.mass);
    if (!lu.isInvertible()) throw SingularMassError("mass matrix is singular");
    const Mat minv = lu.inverse();

    StateSpaceModel ss;
    ss.mass_inverse = minv;
    ss.state_matrix = Mat::Zero(2 * n, 2 * n);
    ss.state_matrix.topRightCorner(n, n) = Mat::Identity(n, n);
    ss.state_matrix.bottomLeftCorner(n, n) = -minv * model.stiffness;
    ss.state_matrix.bottomRightCorner(n, n) = -minv * model.damping;

    ss.input_matrix = Mat::Zero(2 * n, n);
    ss.input_matrix.bottomRows(n) = minv;

    ss.output_matrix = Mat::Zero(n, 2 * n);
    if (output == OutputKind::Displacement) {
        ss.output_matrix.leftCols(n) = Mat::Identity(n, n);
    } else {
        // accelerations: ydd = -M^-1 K x - M^-1 C xd (excitation feedthrough omitted)
        ss.output_matrix.leftCols(n) = -minv * model.stiffness;
        ss.output_matrix.rightCols(n) = -minv * model.damping;
    }
    return ss;
}

Mat rayleigh_damping(const Mat& mass, const Mat& stiffness, double zeta,
                     std::pair<int, int> anchor_modes) {
    if (zeta < 0.0 || zeta >= 1.0) throw Error("damping ratio must lie in [0, 1)");
    if (anchor_modes.first == anchor_modes.second) throw Error("anchor modes must differ");
    if (zeta == 0.0) return Mat::Zero(mass.rows(), mass.cols());

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(stiffness, mass);
    if (es.info() != Eigen::Success) throw Error("generalized eigensolver failed");
    Vec omega = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();

    const double wi = omega(anchor_modes.first);
    const double wj = omega(anchor_modes.second);
    if (std::abs(wi - wj) < 1e-12 * std::max(wi, wj)) {
        throw SingularFitError("anchor frequencies coincide; Rayleigh fit is singular");
    }
    // [1/(2wi) wi/2; 1/(2wj) wj/2] [alpha; beta] = [zeta; zeta]
    Eigen::Matrix2d fit;
    fit << 1.0 / (2.0 * wi), wi / 2.0, 1.0 / (2.0 * wj), wj / 2.0;
    Eigen::Vector2d ab = fit.colPivHouseholderQr().solve(Eigen::Vector2d(zeta, zeta));
    return ab(0) * mass + ab(1) * stiffness;
}

void canonicalize_mode_signs(Mat& modes) {
    for (int j = 0; j < modes.cols(); ++j) {
        int imax = 0;
        modes.col(j).cwiseAbs().maxCoeff(&imax);
        if (modes(imax, j) < 0.0) modes.col(j) = -modes.col(j);
    }
}

ModalGroundTruth ground_truth(const SystemModel& model) {
    model.validate();
    const int n = model.dof();

    // real modes: generalized EVD of (K, M); eigenvectors are M-orthonormal
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(model.stiffness, model.mass);
    if (es.info() != Eigen::Success) throw Error("generalized eigensolver failed");

    ModalGroundTruth gt;
    gt.real_modes = es.eigenvectors();
    canonicalize_mode_signs(gt.real_modes);

    // complex modes from the state matrix, one per conjugate pair
    const StateSpaceModel ss = build_state_space(model);
    Eigen::EigenSolver<Mat> ces(ss.state_matrix);
    if (ces.info() != Eigen::Success) throw Error("state-matrix eigensolver failed");
    const CVec lambda = ces.eigenvalues();
    const CMat vecs = ces.eigenvectors();

    std::vector<int> upper;
    const double imag_tol = 1e-9 * lambda.cwiseAbs().maxCoeff();
    for (int i = 0; i < lambda.size(); ++i) {
        if (lambda(i).imag() > imag_tol) upper.push_back(i);
    }
    if (static_cast<int>(upper.size()) != n) {
        throw DegenerateModeError("state matrix does not split into n conjugate pairs");
    }
    std::sort(upper.begin(), upper.end(),
              [&](int a, int b) { return std::abs(lambda(a)) < std::abs(lambda(b)); });

    gt.complex_modes = CMat::Zero(n, n);
    gt.natural_freqs_hz = Vec::Zero(n);
    gt.damping_ratios = Vec::Zero(n);
    gt.modal_masses = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        const Complex lam = lambda(upper[j]);
        CVec col = vecs.col(upper[j]).head(n);  // displacement partition
        // canonical phase: largest-|entry| made real positive, unit norm
        int imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        const Complex pivot = col(imax);
        if (std::abs(pivot) > 0.0) col *= std::conj(pivot) / std::abs(pivot);
        col /= col.norm();
        gt.complex_modes.col(j) = col;
        gt.natural_freqs_hz(j) = std::abs(lam) / (2.0 * kPi);
        gt.damping_ratios(j) = -lam.real() / std::abs(lam);
        gt.modal_masses(j) =
            gt.real_modes.col(j).transpose() * model.mass * gt.real_modes.col(j);
    }
    return gt;
}

}  // namespace modal_stream
