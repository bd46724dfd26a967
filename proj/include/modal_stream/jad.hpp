#pragma once

#include <optional>
#include <vector>

#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// Stack of same-sized complex matrices to be jointly diagonalized.
struct MatrixStack {
    std::vector<CMat> mats;
    std::vector<int> labels;  // lag indices

    int dim() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
    int size() const { return static_cast<int>(mats.size()); }
};

struct JadResult {
    CMat unitary;                     // U
    std::vector<double> cost_history; // J after each sweep, non-increasing
    int sweeps_used = 0;
};

struct JadOptions {
    double tol = 1e-8;          // relative J decrease stopping threshold
    int max_sweeps = 30;
    double rotation_threshold = 1e-12;  // skip rotations below this angle
};

/// J = sum_tau sum_{i != j} |(U^H M_tau U)_{ij}|^2.
double offdiag_cost(const CMat& unitary, const MatrixStack& stack);

/// Jacobi-style joint approximate diagonalization with complex plane
/// rotations; each pair rotation minimizes its restricted cost exactly, so
/// J is monotone non-increasing. Optionally warm-started from `initial`.
/// Throws InvalidStackError on non-finite entries, DimensionError on
/// mismatched sizes.
JadResult joint_diagonalize(const MatrixStack& stack,
                            const JadOptions& options = {},
                            const std::optional<CMat>& initial = {});

}  // namespace modal_stream
