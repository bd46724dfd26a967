#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "modal_stream/analytic_signal.hpp"
#include "modal_stream/batch_sobi.hpp"
#include "modal_stream/foep.hpp"
#include "modal_stream/jad.hpp"
#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// Recursively updated whitened lagged covariances R_{k,k-tau}, tau = 1..T,
/// plus the delay line of the last T whitened samples.
struct LaggedCovarianceSet {
    std::vector<int> lags;            // 1..T scaled by stride
    std::vector<CMat> mats;
    std::deque<CVec> delay_line;      // newest first
    long long count = 0;
    std::optional<double> forgetting;

    int max_lag() const { return lags.empty() ? 0 : lags.back(); }
};

/// R_{k,k-tau} <- a R + b z_k z_{k-tau}^H for every lag already covered by
/// the delay line; unavailable lags only decay. The delay line is rotated.
void update_lagged(LaggedCovarianceSet& set, const CVec& z);

/// Per-sample mixing estimate in physical coordinates.
struct MixingEstimate {
    CMat mixing_complex;   // A = V Sigma^{1/2} U (columns = complex modes)
    CMat demixing;         // A^+ = U^H Sigma^{-1/2} V^H
    Mat modes_real;        // normalized real mode matrix, unit columns
    long long timestamp = 0;
};

/// A = W^+ U and its inverse. Throws IllConditionedError when
/// cond(A) > 1e10.
MixingEstimate estimate_mixing(const WhiteningOp& whitening, const CMat& unitary,
                               long long timestamp = 0);

/// x_k = A^+ y_k (complex modal response from the raw real sample, or from
/// the analytic sample when demix_analytic is chosen).
CVec extract_modal(const MixingEstimate& estimate, const Vec& y_raw);
CVec extract_modal(const MixingEstimate& estimate, const CVec& y_analytic);

struct NormalizedModes {
    Mat modes_real;              // unit-norm columns, canonical phase/sign
    Vec response_real;           // consistently rescaled real modal sample
    std::vector<bool> dormant;   // per-mode zero-energy flag
};

/// Real-valued mode matrix from the complex mixing estimate: each column is
/// rotated to its best real representative, reduced to signed moduli,
/// sign-anchored at its largest entry and unit-normalized. The modal sample
/// is rescaled by the inverse of the applied column factors.
NormalizedModes normalize_modes(const CMat& mixing_complex, const CVec& modal_sample,
                                const Vec& modal_rms);

/// Per-sample pipeline outputs.
enum class StepStatus { Ok, Dormant, IllConditioned, RejectedSample, StageError };

struct ModalOutput {
    std::int64_t time_index = 0;   // raw-sample index (HT latency removed)
    StepStatus status = StepStatus::Ok;
    Mat modes_real;
    CMat mixing_complex;
    Vec modal_response;            // real, rescaled
    CVec modal_response_complex;
    Vec collinearity;              // per identified mode
    Vec mac_vs_ref;                // empty when no reference is set
    std::string message;           // stage error text, empty when Ok
};

/// Rolling history of modal outputs plus the MAC-vs-reference series.
struct ModalTrack {
    std::vector<std::int64_t> sample_index;
    std::vector<Vec> mac_series;       // aligned per-mode MAC at each output
    std::deque<ModalOutput> history;   // bounded ring
    std::size_t history_capacity = 256;

    void push(ModalOutput output);
};

struct PipelineConfig {
    int channels = 0;
    std::vector<int> lags;            // default 1..10 (times lag_stride)
    int lag_stride = 1;
    int init_samples = 200;           // batch-SOBI warm start length
    std::optional<double> forgetting; // lambda, EWMA memory
    int jad_sweeps_per_sample = 1;    // warm-started sweeps each sample
    int full_jad_every = 500;         // full re-diagonalization cadence
    JadOptions jad_full{.tol = 1e-8, .max_sweeps = 30};
    bool track_mean = true;
    bool demix_analytic = false;      // demix the analytic sample instead of raw
    bool use_phase_shift = true;      // false: imaginary channel zeroed (baseline)
    // streaming analytic-signal front end; ignored in batch-analytic mode
    int ht_window = 512;
    int ht_hop = 1;
    double dormant_rms_floor = 1e-15;

    std::vector<int> effective_lags() const;
};

/// The per-sample identification pipeline: analytic signal -> FOEP
/// whitening -> lagged covariance recursion -> warm-started JAD -> mixing
/// and modal extraction -> normalization. Strictly sequential per stream.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    /// Feed one raw multichannel sample through the streaming front end.
    /// Returns zero or more outputs (none during HT latency and the
    /// initialization window). Stage errors are carried in the output
    /// status; the stream keeps running.
    std::vector<ModalOutput> step(const Vec& raw_sample);

    /// Feed one precomputed analytic sample (batch-analytic mode).
    std::optional<ModalOutput> step_complex(const ComplexSample& sample);

    /// Reference modes for MAC tracking (e.g. ground truth).
    void set_reference_modes(const Mat& reference);

    bool initialized() const { return initialized_; }
    std::int64_t warmup_length() const;   // exact no-output sample count
    const ModalTrack& track() const { return track_; }
    const EigenspaceState& eigenspace() const { return eigenspace_; }
    const LaggedCovarianceSet& lagged() const { return lagged_; }
    const CMat& unitary() const { return unitary_; }
    const PipelineConfig& config() const { return config_; }
    std::optional<MixingEstimate> latest_estimate() const { return latest_; }

private:
    PipelineConfig config_;
    PhaseShiftBuffer shifter_;
    std::vector<ComplexSample> init_buffer_;
    bool initialized_ = false;
    EigenspaceState eigenspace_;
    LaggedCovarianceSet lagged_;
    CMat unitary_;
    std::optional<MixingEstimate> latest_;
    std::optional<Mat> reference_;
    Vec modal_rms_;           // EWMA per-mode response magnitude
    double rms_peak_ = 0.0;
    ModalTrack track_;
    long long processed_ = 0; // complex samples seen (init + recursive)

    ModalOutput process(const ComplexSample& sample);
    void initialize_from_buffer();
};

}  // namespace modal_stream
