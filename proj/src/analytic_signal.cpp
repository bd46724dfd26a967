#include "modal_stream/analytic_signal.hpp"

#include <cmath>
#include <unsupported/Eigen/FFT>

#include "modal_stream/errors.hpp"

namespace modal_stream {

CVec hilbert_batch(const Vec& signal) {
    const int N = static_cast<int>(signal.size());
    if (N < 4) throw TooShortError("hilbert_batch needs at least 4 samples");

    Eigen::FFT<double> fft;
    std::vector<Complex> time(N), freq(N);
    for (int i = 0; i < N; ++i) time[i] = Complex(signal(i), 0.0);
    fft.fwd(freq, time);

    // analytic-signal multiplier: double positive bins, zero negative bins
    const int half = N / 2;
    for (int k = 1; k < (N + 1) / 2; ++k) freq[k] *= 2.0;
    if (N % 2 == 0) {
        // Nyquist bin kept as is
    }
    for (int k = half + 1; k < N; ++k) freq[k] = Complex(0.0, 0.0);

    fft.inv(time, freq);

    CVec out(N);
    for (int i = 0; i < N; ++i) out(i) = Complex(signal(i), time[i].imag());
    return out;
}

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

PhaseShiftBuffer::PhaseShiftBuffer(int channels, int window_len, int hop)
    : channels_(channels), window_len_(window_len), hop_(hop) {
    if (channels < 1) throw DimensionError("need at least one channel");
    if (!power_of_two(window_len) || window_len < 64) {
        throw Error("window_len must be a power of two >= 64");
    }
    if (hop < 1 || hop > window_len / 2) {
        throw Error("hop must lie in [1, window_len/2]");
    }
    ring_.resize(channels);
}

std::vector<ComplexSample> PhaseShiftBuffer::push(const Vec& sample) {
    if (static_cast<int>(sample.size()) != channels_) {
        throw StreamCorruptionError("channel count changed mid-stream");
    }
    for (int ch = 0; ch < channels_; ++ch) {
        ring_[ch].push_back(sample(ch));
        if (static_cast<int>(ring_[ch].size()) > window_len_) ring_[ch].pop_front();
    }
    ++count_;
    if (count_ >= window_len_ && (count_ - window_len_) % hop_ == 0) {
        return emit_block();
    }
    return {};
}

std::vector<ComplexSample> PhaseShiftBuffer::emit_block() {
    const std::int64_t t = count_ - 1;            // newest raw index in the window
    const std::int64_t window_start = t - window_len_ + 1;
    const std::int64_t last = t - window_len_ / 2;  // exact-latency emission tip

    CMat analytic(channels_, window_len_);
    Vec chan(window_len_);
    for (int ch = 0; ch < channels_; ++ch) {
        for (int i = 0; i < window_len_; ++i) chan(i) = ring_[ch][i];
        analytic.row(ch) = hilbert_batch(chan).transpose();
    }

    std::vector<ComplexSample> out;
    for (std::int64_t j = emitted_through_ + 1; j <= last; ++j) {
        const int p = static_cast<int>(j - window_start);
        ComplexSample s;
        s.time_index = j;
        s.values = analytic.col(p);
        out.push_back(std::move(s));
    }
    emitted_through_ = last;
    return out;
}

}  // namespace modal_stream
