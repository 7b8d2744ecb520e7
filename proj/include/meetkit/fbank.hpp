#pragma once

#include <vector>

#include "meetkit/wave.hpp"

namespace meetkit {

struct FbankConfig {
    int num_mels = 40;
    double window_sec = 0.025;
    double hop_sec = 0.010;
    double floor = 1e-10; // power floor before the log
};

// Log-mel filterbank energies: Hann window, power spectrum, triangular mel
// filters from 0 Hz to Nyquist, natural log with a power floor. One row per
// frame; frames must fit entirely inside the signal.
// Throws Error("TooShort") when the signal is shorter than one window.
std::vector<std::vector<double>> fbank(const std::vector<float>& samples, int sample_rate,
                                       const FbankConfig& cfg = {});

// Mean + standard-deviation pooling over frames: 2 * num_mels values.
std::vector<double> mean_std_pool(const std::vector<std::vector<double>>& frames);

// Triangular filter weights evaluated at a frequency, one value per mel bin
// (used by tests to locate the dominant filter for a pure tone).
std::vector<double> mel_filter_response(double freq_hz, int sample_rate,
                                        const FbankConfig& cfg = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

} // namespace meetkit
