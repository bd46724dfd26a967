#pragma once

#include <vector>

#include "modal_stream/linalg.hpp"
#include "modal_stream/recursive_sobi.hpp"

namespace modal_stream {

/// Mode-pairing report between an identified and a reference mode set.
struct MacReport {
    Mat mac_matrix;               // [identified i][truth j]
    std::vector<int> assignment;  // truth column j -> identified column
    Vec per_mode_mac;             // in truth order
};

/// Modal assurance criterion |a^H b|^2 / (a^H a)(b^H b); phase- and
/// scale-invariant. Throws DimensionError / Error on mismatched or zero
/// vectors.
double mac(const CVec& a, const CVec& b);
double mac(const Vec& a, const Vec& b);

/// Optimal one-to-one column assignment maximizing total MAC (exact
/// Hungarian assignment).
MacReport align_modes(const CMat& identified, const CMat& truth);
MacReport align_modes(const Mat& identified, const Mat& truth);

/// sigma_1 / ||S||_F of the 2 x n stack S = [Re v; Im v]; 1 iff the mode is
/// collinear with a real vector (up to a global phase).
double collinearity_index(const CVec& mode);

struct PsdEstimate {
    Vec frequency;  // Hz, one-sided
    Vec power;      // density, units^2/Hz
};

/// Welch PSD (Hann window, 50% overlap, density scaling). Throws
/// TooShortError when the series is shorter than 2 x window.
PsdEstimate psd(const Vec& series, double dt, int window);

/// Frequency of the largest PSD peak, refined by parabolic interpolation on
/// log power.
double dominant_frequency(const PsdEstimate& estimate);

/// Per-mode MAC against `truth` on a decimated schedule (every `stride`
/// outputs), evaluated from the stored MAC series of a live track.
struct MacConvergence {
    std::vector<std::int64_t> sample_index;
    std::vector<Vec> per_mode_mac;
};

MacConvergence mac_convergence(const ModalTrack& track, int stride = 50);

}  // namespace modal_stream
