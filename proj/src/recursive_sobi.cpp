#include "modal_stream/recursive_sobi.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "modal_stream/errors.hpp"
#include "modal_stream/metrics.hpp"

namespace modal_stream {

void update_lagged(LaggedCovarianceSet& set, const CVec& z) {
    const int n = static_cast<int>(z.size());
    for (const CMat& m : set.mats) {
        if (m.rows() != n) throw DimensionError("whitened sample dimension mismatch");
    }
    set.count += 1;
    double a, b;
    if (set.forgetting) {
        a = *set.forgetting;
        b = 1.0 - *set.forgetting;
    } else {
        a = (set.count - 1.0) / set.count;
        b = 1.0 / set.count;
    }
    for (std::size_t t = 0; t < set.lags.size(); ++t) {
        const int tau = set.lags[t];
        if (static_cast<int>(set.delay_line.size()) >= tau) {
            set.mats[t] = a * set.mats[t] + b * (z * set.delay_line[tau - 1].adjoint());
        } else {
            set.mats[t] = a * set.mats[t];  // lag not yet available: decay only
        }
    }
    set.delay_line.push_front(z);
    while (static_cast<int>(set.delay_line.size()) > set.max_lag()) {
        set.delay_line.pop_back();
    }
}

MixingEstimate estimate_mixing(const WhiteningOp& whitening, const CMat& unitary,
                               long long timestamp) {
    MixingEstimate est;
    est.mixing_complex = whitening.inverse * unitary;  // A = W^+ U
    est.demixing = unitary.adjoint() * whitening.forward;
    est.timestamp = timestamp;

    Eigen::JacobiSVD<CMat> svd(est.mixing_complex);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e10) {
        throw IllConditionedError("mixing matrix condition number above 1e10", -1);
    }
    const int n = static_cast<int>(est.mixing_complex.rows());
    est.modes_real =
        normalize_modes(est.mixing_complex, CVec::Zero(n), Vec::Ones(n)).modes_real;
    return est;
}

CVec extract_modal(const MixingEstimate& estimate, const Vec& y_raw) {
    return estimate.demixing * y_raw.cast<Complex>();
}

CVec extract_modal(const MixingEstimate& estimate, const CVec& y_analytic) {
    return estimate.demixing * y_analytic;
}

NormalizedModes normalize_modes(const CMat& mixing_complex, const CVec& modal_sample,
                                const Vec& modal_rms) {
    const int n = static_cast<int>(mixing_complex.rows());
    NormalizedModes out;
    out.modes_real = Mat::Zero(n, n);
    out.response_real = Vec::Zero(n);
    out.dormant.assign(n, false);

    for (int j = 0; j < n; ++j) {
        const CVec col = mixing_complex.col(j);
        const double col_norm = col.norm();
        const bool dormant = col_norm < 1e-300 ||
                             (j < modal_rms.size() && modal_rms(j) >= 0.0 &&
                              modal_rms(j) < 1e-300);
        // best real representative: rotate by -arg(sum col^2)/2
        Complex s2(0.0, 0.0);
        for (int i = 0; i < n; ++i) s2 += col(i) * col(i);
        const double theta = std::abs(s2) > 0.0 ? 0.5 * std::arg(s2) : 0.0;
        const Complex rot = std::polar(1.0, -theta);

        Vec m(n);
        for (int i = 0; i < n; ++i) {
            const Complex r = col(i) * rot;
            const double sgn = r.real() < 0.0 ? -1.0 : 1.0;
            m(i) = sgn * std::abs(r);
        }
        // column sign anchored at the largest-magnitude entry
        int imax = 0;
        m.cwiseAbs().maxCoeff(&imax);
        const double flip = m(imax) < 0.0 ? -1.0 : 1.0;
        m *= flip;

        const double scale = m.norm();
        if (dormant || scale < 1e-300) {
            out.dormant[j] = true;
            out.modes_real.col(j) = m;  // passed through unscaled
            if (j < modal_sample.size()) out.response_real(j) = modal_sample(j).real();
            continue;
        }
        out.modes_real.col(j) = m / scale;
        if (j < modal_sample.size()) {
            // keep A_real * x_real consistent with the complex product
            out.response_real(j) = flip * scale * (modal_sample(j) / rot).real();
        }
    }
    return out;
}

void ModalTrack::push(ModalOutput output) {
    sample_index.push_back(output.time_index);
    mac_series.push_back(output.mac_vs_ref);
    history.push_back(std::move(output));
    while (history.size() > history_capacity) history.pop_front();
}

std::vector<int> PipelineConfig::effective_lags() const {
    if (!lags.empty()) return lags;
    std::vector<int> def;
    for (int t = 1; t <= 10; ++t) def.push_back(t * std::max(1, lag_stride));
    return def;
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      shifter_(config_.channels, config_.ht_window, config_.ht_hop) {
    if (config_.channels < 2) throw DimensionError("pipeline needs at least 2 channels");
    if (config_.init_samples < 2 * config_.channels) {
        throw Error("init_samples must be at least 2n");
    }
    const auto lags = config_.effective_lags();
    lagged_.lags = lags;
    lagged_.forgetting = config_.forgetting;
    modal_rms_ = Vec::Zero(config_.channels);
}

std::int64_t Pipeline::warmup_length() const {
    const std::int64_t B = config_.init_samples;
    if (!config_.use_phase_shift) return B;
    // first raw index whose aligned block emits complex sample #B
    const std::int64_t W = config_.ht_window;
    const std::int64_t hop = config_.ht_hop;
    const std::int64_t first_block = W - 1;
    const std::int64_t needed = B + W / 2;  // block end emitting index >= B
    if (needed <= first_block) return first_block + 1;
    const std::int64_t steps = (needed - first_block + hop - 1) / hop;
    return first_block + steps * hop + 1;
}

void Pipeline::set_reference_modes(const Mat& reference) { reference_ = reference; }

std::vector<ModalOutput> Pipeline::step(const Vec& raw_sample) {
    std::vector<ModalOutput> outputs;
    if (!config_.use_phase_shift) {
        // baseline: phase-shift channel zeroed, no latency
        ComplexSample s;
        s.time_index = processed_;
        s.values = raw_sample.cast<Complex>();
        auto out = step_complex(s);
        if (out) outputs.push_back(std::move(*out));
        return outputs;
    }
    for (ComplexSample& s : shifter_.push(raw_sample)) {
        auto out = step_complex(s);
        if (out) outputs.push_back(std::move(*out));
    }
    return outputs;
}

std::optional<ModalOutput> Pipeline::step_complex(const ComplexSample& sample) {
    if (static_cast<int>(sample.values.size()) != config_.channels) {
        throw StreamCorruptionError("complex sample dimension mismatch");
    }
    if (!initialized_) {
        init_buffer_.push_back(sample);
        ++processed_;
        if (static_cast<int>(init_buffer_.size()) == config_.init_samples) {
            initialize_from_buffer();
        }
        return std::nullopt;
    }
    ++processed_;
    ModalOutput out = process(sample);
    track_.push(out);
    return out;
}

void Pipeline::initialize_from_buffer() {
    const int n = config_.channels;
    CMat batch(n, init_buffer_.size());
    for (std::size_t i = 0; i < init_buffer_.size(); ++i) batch.col(i) = init_buffer_[i].values;

    PipelineInit init = initialize_pipeline(batch, config_.effective_lags(),
                                            config_.forgetting, config_.track_mean);
    eigenspace_ = std::move(init.eigenspace);
    lagged_.mats = std::move(init.lagged);
    lagged_.count = eigenspace_.count;
    unitary_ = std::move(init.unitary);

    // seed the delay line with the freshest whitened init samples
    const CMat W = eigenspace_.eigvals.cwiseSqrt().cwiseInverse().asDiagonal() *
                   eigenspace_.eigvecs.adjoint();
    const int depth = std::min<int>(lagged_.max_lag(), static_cast<int>(init_buffer_.size()));
    for (int d = 0; d < depth; ++d) {
        const CVec& y = init_buffer_[init_buffer_.size() - 1 - d].values;
        lagged_.delay_line.push_back(W * (y - eigenspace_.mean));
    }
    init_buffer_.clear();
    initialized_ = true;
}

ModalOutput Pipeline::process(const ComplexSample& sample) {
    ModalOutput out;
    out.time_index = sample.time_index;
    out.status = StepStatus::Ok;

    try {
        eigenspace_ = foep_update(eigenspace_, sample.values);
        auto [z, wop] = whiten(eigenspace_, sample.values);
        update_lagged(lagged_, z);

        MatrixStack stack;
        stack.labels = lagged_.lags;
        for (const CMat& m : lagged_.mats) stack.mats.push_back((m + m.adjoint()) / 2.0);

        const bool full = config_.full_jad_every > 0 &&
                          lagged_.count % config_.full_jad_every == 0;
        JadOptions opts = full ? config_.jad_full
                               : JadOptions{.tol = 0.0,
                                            .max_sweeps = config_.jad_sweeps_per_sample,
                                            .rotation_threshold = 1e-12};
        unitary_ = joint_diagonalize(stack, opts, unitary_).unitary;

        MixingEstimate est = estimate_mixing(wop, unitary_, sample.time_index);
        const CVec modal = config_.demix_analytic
                               ? extract_modal(est, sample.values)
                               : extract_modal(est, Vec(sample.values.real()));

        const double decay = config_.forgetting ? *config_.forgetting : 0.995;
        for (int j = 0; j < modal_rms_.size(); ++j) {
            modal_rms_(j) = decay * modal_rms_(j) + (1.0 - decay) * std::abs(modal(j));
        }
        rms_peak_ = std::max(rms_peak_, modal_rms_.maxCoeff());

        NormalizedModes norm = normalize_modes(est.mixing_complex, modal, modal_rms_);
        est.modes_real = norm.modes_real;

        out.modes_real = norm.modes_real;
        out.mixing_complex = est.mixing_complex;
        out.modal_response = norm.response_real;
        out.modal_response_complex = modal;
        out.collinearity = Vec(est.mixing_complex.cols());
        for (int j = 0; j < est.mixing_complex.cols(); ++j) {
            out.collinearity(j) = collinearity_index(est.mixing_complex.col(j));
        }
        const bool dormant =
            rms_peak_ > 0.0 && modal_rms_.maxCoeff() < config_.dormant_rms_floor * rms_peak_;
        if (dormant) out.status = StepStatus::Dormant;

        if (reference_) {
            out.mac_vs_ref = align_modes(out.modes_real, *reference_).per_mode_mac;
        }
        latest_ = std::move(est);
    } catch (const RejectedSampleError& e) {
        out.status = StepStatus::RejectedSample;
        out.message = e.what();
    } catch (const IllConditionedError& e) {
        out.status = StepStatus::IllConditioned;
        out.message = e.what();
    } catch (const Error& e) {
        out.status = StepStatus::StageError;
        out.message = e.what();
    }
    if (out.status != StepStatus::Ok && out.status != StepStatus::Dormant && latest_) {
        // carry the last good estimate so downstream consumers keep a view
        out.modes_real = latest_->modes_real;
        out.mixing_complex = latest_->mixing_complex;
    }
    return out;
}

}  // namespace modal_stream
