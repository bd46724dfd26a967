#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// One time instant of the complex (analytic) response.
struct ComplexSample {
    std::int64_t time_index = 0;
    CVec values;
};

/// Frequency-domain analytic signal: positive frequencies doubled, negative
/// zeroed. The real part of the result is the input, copied bit-exactly.
/// Throws TooShortError for N < 4.
CVec hilbert_batch(const Vec& signal);

/// Streaming 90-degree phase shifter. Keeps a ring of the last `window_len`
/// samples per channel; every `hop` pushes it runs the batch transform on
/// the window and emits samples delayed by exactly window_len/2, whose
/// imaginary parts come from the window interior. Real parts are the
/// delayed raw inputs, bit-exact. Nothing is emitted until the first window
/// fills; the tail (last window_len/2 samples) is never emitted.
class PhaseShiftBuffer {
public:
    /// window_len: power of two, >= 64. hop: 1..window_len/2.
    explicit PhaseShiftBuffer(int channels, int window_len = 512, int hop = 1);

    /// Feed one multichannel sample; returns zero or more delayed complex
    /// samples. Throws StreamCorruptionError if the dimension changes.
    std::vector<ComplexSample> push(const Vec& sample);

    int latency() const { return window_len_ / 2; }
    int channels() const { return channels_; }
    std::int64_t samples_seen() const { return count_; }
    std::int64_t emitted_through() const { return emitted_through_; }

private:
    int channels_;
    int window_len_;
    int hop_;
    std::int64_t count_ = 0;             // samples consumed
    std::int64_t emitted_through_ = -1;  // newest emitted time index
    std::vector<std::deque<double>> ring_;

    std::vector<ComplexSample> emit_block();
};

}  // namespace modal_stream
