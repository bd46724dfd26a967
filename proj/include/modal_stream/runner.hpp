#pragma once

#include <string>

#include "modal_stream/fixtures.hpp"
#include "modal_stream/keyvalue.hpp"
#include "modal_stream/linalg.hpp"
#include "modal_stream/metrics.hpp"

namespace modal_stream {

/// One ensemble member's identification result.
struct MemberResult {
    Mat modes_final;        // identified real modes (aligned to truth order)
    Vec per_mode_mac;       // vs ground-truth real modes
    Vec identified_freqs;   // Hz, from modal-response PSD peaks (truth order)
    MacConvergence convergence;
    Vec collinearity_pre;   // cs3 windows; empty elsewhere
    Vec collinearity_post;
};

/// Aggregated case result (ensemble medians + batch reference).
struct CaseResult {
    std::string case_name;
    Vec truth_freqs_hz;
    Mat truth_modes;
    Vec median_mac;             // per mode, over ensemble members
    Vec median_mac_baseline;    // real-only baseline (when run)
    Mat modes_ensemble_mean;    // aligned, sign-fixed ensemble average
    Vec batch_mac;              // batch SOBI on member 0's record
    Vec median_identified_freqs;
    double pre_event_collinearity = -1.0;   // cs3 medians (min over modes)
    double post_event_collinearity = -1.0;
    std::vector<MemberResult> members;
};

/// Run one ensemble member end to end. `zero_phase_shift` selects the
/// real-only baseline.
MemberResult run_member(const Fixture& fixture, const KeyValueConfig& config,
                        unsigned long long seed, bool zero_phase_shift = false);

/// Full case study: ensemble, batch reference, aggregation.
CaseResult run_case_study(const std::string& case_name, const KeyValueConfig& config);

struct RunArtifacts {
    std::string directory;
    CaseResult result;
};

/// CLI entry: artifacts written under out_dir/<run-id>/.
RunArtifacts run_case_with_artifacts(const std::string& case_name,
                                     const KeyValueConfig& config,
                                     const std::string& out_dir);

struct CompareReport {
    Vec mac_delta;
    std::map<std::string, double> timing_delta_ms;
    bool identical_outputs = false;
    std::string text;
};

/// Diff two artifact directories (same fixture required).
CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b);

/// Worker-count resolution: MODAL_STREAM_THREADS env, else hardware.
int worker_count();

/// Default per-case configuration (dt, lags, init size, ...) merged under
/// user overrides.
KeyValueConfig default_case_config(const std::string& case_name);

}  // namespace modal_stream
