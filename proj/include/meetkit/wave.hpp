#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace meetkit {

// PCM audio in [-1, 1], one sample vector per channel (C x N).
struct WaveBuffer {
    std::vector<std::vector<float>> channels;
    int sample_rate = 16000;

    size_t num_channels() const { return channels.size(); }
    size_t num_samples() const { return channels.empty() ? 0 : channels[0].size(); }
    double duration() const {
        return sample_rate > 0 ? static_cast<double>(num_samples()) / sample_rate : 0.0;
    }
};

// 16-bit PCM RIFF/WAVE reader; samples scaled by 1/32768. Throws
// Error("UnsupportedFormat") for non-PCM or non-16-bit files and
// Error("CorruptHeader") for structural problems.
WaveBuffer read_wav(const std::string& path);

// Exact inverse of read_wav with saturating rounding; round-trip is bit-exact
// for in-range values.
void write_wav(const WaveBuffer& buffer, const std::string& path);

// Sample-wise mean across channels (kept in [-1, 1], unlike the raw sum).
WaveBuffer channel_sum(const WaveBuffer& multi);

// Slice [start_sample, start_sample + count) across all channels.
WaveBuffer slice(const WaveBuffer& buffer, size_t start_sample, size_t count);

} // namespace meetkit
