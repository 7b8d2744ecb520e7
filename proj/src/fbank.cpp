#include "meetkit/fbank.hpp"

#include <cmath>
#include <complex>

#include "meetkit/error.hpp"

namespace meetkit {

namespace {

// iterative radix-2 Cooley-Tukey, decimation in time
void fft_inplace(std::vector<std::complex<double>>& x) {
    const size_t n = x.size();
    if (n <= 1)
        return;
    size_t j = 0;
    for (size_t i = 0; i < n; ++i) {
        if (j > i)
            std::swap(x[i], x[j]);
        size_t m = n >> 1;
        while (m >= 1 && j >= m) {
            j -= m;
            m >>= 1;
        }
        j += m;
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * M_PI / static_cast<double>(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = x[i + k];
                std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// triangular mel filterbank as (num_mels x num_bins) weights
std::vector<std::vector<double>> mel_filters(int num_mels, size_t fft_size, int sample_rate) {
    const size_t num_bins = fft_size / 2 + 1;
    const double nyquist = sample_rate / 2.0;
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(nyquist);

    std::vector<double> centers(num_mels + 2);
    for (int m = 0; m < num_mels + 2; ++m)
        centers[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (num_mels + 1));

    std::vector<std::vector<double>> filters(num_mels, std::vector<double>(num_bins, 0.0));
    for (int m = 0; m < num_mels; ++m) {
        double left = centers[m], center = centers[m + 1], right = centers[m + 2];
        for (size_t b = 0; b < num_bins; ++b) {
            double f = static_cast<double>(b) * sample_rate / static_cast<double>(fft_size);
            if (f > left && f < right) {
                filters[m][b] =
                    f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
            }
        }
    }
    return filters;
}

} // namespace

double hz_to_mel(double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_filter_response(double freq_hz, int sample_rate, const FbankConfig& cfg) {
    const double nyquist = sample_rate / 2.0;
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(nyquist);
    std::vector<double> out(cfg.num_mels, 0.0);
    for (int m = 0; m < cfg.num_mels; ++m) {
        double left = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (cfg.num_mels + 1));
        double center = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.num_mels + 1));
        double right = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 2) / (cfg.num_mels + 1));
        if (freq_hz > left && freq_hz < right)
            out[m] = freq_hz <= center ? (freq_hz - left) / (center - left)
                                       : (right - freq_hz) / (right - center);
    }
    return out;
}

std::vector<std::vector<double>> fbank(const std::vector<float>& samples, int sample_rate,
                                       const FbankConfig& cfg) {
    const auto win = static_cast<size_t>(std::lround(cfg.window_sec * sample_rate));
    const auto hop = static_cast<size_t>(std::lround(cfg.hop_sec * sample_rate));
    if (win == 0 || hop == 0)
        throw Error("InvalidConfig", "window and hop must be at least one sample");
    if (samples.size() < win)
        throw Error("TooShort", "signal shorter than one analysis window");

    const size_t fft_size = next_pow2(win);
    const auto filters = mel_filters(cfg.num_mels, fft_size, sample_rate);
    const size_t num_bins = fft_size / 2 + 1;

    std::vector<double> hann(win);
    for (size_t i = 0; i < win; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (win - 1));

    std::vector<std::vector<double>> frames;
    std::vector<std::complex<double>> buf(fft_size);
    std::vector<double> power(num_bins);
    for (size_t off = 0; off + win <= samples.size(); off += hop) {
        for (size_t i = 0; i < win; ++i)
            buf[i] = std::complex<double>(samples[off + i] * hann[i], 0.0);
        for (size_t i = win; i < fft_size; ++i)
            buf[i] = 0.0;
        fft_inplace(buf);
        for (size_t b = 0; b < num_bins; ++b)
            power[b] = std::norm(buf[b]);

        std::vector<double> mel(cfg.num_mels);
        for (int m = 0; m < cfg.num_mels; ++m) {
            double acc = 0.0;
            for (size_t b = 0; b < num_bins; ++b)
                acc += filters[m][b] * power[b];
            mel[m] = std::log(std::max(acc, cfg.floor));
        }
        frames.push_back(std::move(mel));
    }
    return frames;
}

std::vector<double> mean_std_pool(const std::vector<std::vector<double>>& frames) {
    if (frames.empty())
        throw Error("TooShort", "cannot pool zero frames");
    const size_t d = frames[0].size();
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    for (const auto& f : frames) {
        for (size_t i = 0; i < d; ++i) {
            mean[i] += f[i];
            sq[i] += f[i] * f[i];
        }
    }
    const auto n = static_cast<double>(frames.size());
    std::vector<double> out(2 * d);
    for (size_t i = 0; i < d; ++i) {
        mean[i] /= n;
        double var = std::max(0.0, sq[i] / n - mean[i] * mean[i]);
        out[i] = mean[i];
        out[d + i] = std::sqrt(var);
    }
    return out;
}

} // namespace meetkit
