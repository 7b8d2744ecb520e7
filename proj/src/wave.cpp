#include "meetkit/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "meetkit/error.hpp"

namespace meetkit {

namespace {

struct ChunkHeader {
    char id[4];
    uint32_t size;
};

bool read_chunk_header(std::ifstream& in, ChunkHeader* hdr) {
    if (!in.read(hdr->id, 4))
        return false;
    if (!in.read(reinterpret_cast<char*>(&hdr->size), 4))
        return false;
    return true;
}

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

} // namespace

WaveBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open WAV file: " + path);

    char riff[4], wave[4];
    uint32_t riff_size = 0;
    if (!in.read(riff, 4) || !in.read(reinterpret_cast<char*>(&riff_size), 4) ||
        !in.read(wave, 4) || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
        throw Error("CorruptHeader", "not a RIFF/WAVE file: " + path);

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    std::vector<char> data;
    bool have_data = false;

    ChunkHeader hdr;
    while (read_chunk_header(in, &hdr)) {
        if (std::memcmp(hdr.id, "fmt ", 4) == 0) {
            if (hdr.size < 16)
                throw Error("CorruptHeader", "fmt chunk too small");
            std::vector<char> fmt(hdr.size);
            if (!in.read(fmt.data(), hdr.size))
                throw Error("CorruptHeader", "truncated fmt chunk");
            std::memcpy(&format, fmt.data() + 0, 2);
            std::memcpy(&channels, fmt.data() + 2, 2);
            std::memcpy(&rate, fmt.data() + 4, 4);
            std::memcpy(&bits, fmt.data() + 14, 2);
            have_fmt = true;
        } else if (std::memcmp(hdr.id, "data", 4) == 0) {
            if (hdr.size == 0)
                throw Error("CorruptHeader", "zero-length data chunk");
            data.resize(hdr.size);
            if (!in.read(data.data(), hdr.size))
                throw Error("CorruptHeader", "truncated data chunk");
            have_data = true;
        } else {
            in.seekg(hdr.size, std::ios::cur);
        }
        if (hdr.size & 1)
            in.seekg(1, std::ios::cur); // RIFF pads chunks to even byte counts
        if (!in)
            break;
    }

    if (!have_fmt || !have_data)
        throw Error("CorruptHeader", "missing fmt or data chunk");
    if (format != 1)
        throw Error("UnsupportedFormat",
                    "only PCM supported (format tag " + std::to_string(format) + ")");
    if (bits != 16)
        throw Error("UnsupportedFormat",
                    "only 16-bit PCM supported (got " + std::to_string(bits) + "-bit)");
    if (channels == 0 || rate == 0)
        throw Error("CorruptHeader", "fmt chunk with zero channels or sample rate");
    if (data.size() % (2 * channels) != 0)
        throw Error("CorruptHeader", "data chunk size not a frame multiple");

    const size_t frames = data.size() / (2 * channels);
    WaveBuffer buf;
    buf.sample_rate = static_cast<int>(rate);
    buf.channels.assign(channels, std::vector<float>(frames));
    const auto* pcm = reinterpret_cast<const int16_t*>(data.data());
    for (size_t f = 0; f < frames; ++f)
        for (size_t c = 0; c < channels; ++c)
            buf.channels[c][f] = static_cast<float>(pcm[f * channels + c]) / 32768.0f;
    return buf;
}

void write_wav(const WaveBuffer& buffer, const std::string& path) {
    if (buffer.channels.empty() || buffer.num_samples() == 0)
        throw Error("EmptyInput", "refusing to write an empty WAV file");
    for (const auto& ch : buffer.channels)
        if (ch.size() != buffer.num_samples())
            throw Error("LengthMismatch", "channels must have equal length");

    const auto channels = static_cast<uint16_t>(buffer.num_channels());
    const auto frames = static_cast<uint32_t>(buffer.num_samples());
    const auto rate = static_cast<uint32_t>(buffer.sample_rate);
    const uint32_t data_size = frames * channels * 2;

    std::string out;
    out.reserve(44 + data_size);
    out.append("RIFF", 4);
    put<uint32_t>(out, 36 + data_size);
    out.append("WAVE", 4);
    out.append("fmt ", 4);
    put<uint32_t>(out, 16);
    put<uint16_t>(out, 1); // PCM
    put<uint16_t>(out, channels);
    put<uint32_t>(out, rate);
    put<uint32_t>(out, rate * channels * 2);
    put<uint16_t>(out, static_cast<uint16_t>(channels * 2));
    put<uint16_t>(out, 16);
    out.append("data", 4);
    put<uint32_t>(out, data_size);

    for (uint32_t f = 0; f < frames; ++f) {
        for (uint16_t c = 0; c < channels; ++c) {
            double scaled = std::round(static_cast<double>(buffer.channels[c][f]) * 32768.0);
            auto v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
            put<int16_t>(out, v);
        }
    }

    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("IoError", "cannot write WAV file: " + path);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os)
        throw Error("IoError", "short write to WAV file: " + path);
}

WaveBuffer channel_sum(const WaveBuffer& multi) {
    WaveBuffer out;
    out.sample_rate = multi.sample_rate;
    const size_t n = multi.num_samples();
    const size_t c = multi.num_channels();
    out.channels.assign(1, std::vector<float>(n, 0.0f));
    if (c == 0)
        return out;
    for (size_t f = 0; f < n; ++f) {
        double acc = 0.0;
        for (size_t ch = 0; ch < c; ++ch)
            acc += multi.channels[ch][f];
        out.channels[0][f] = static_cast<float>(acc / static_cast<double>(c));
    }
    return out;
}

WaveBuffer slice(const WaveBuffer& buffer, size_t start_sample, size_t count) {
    WaveBuffer out;
    out.sample_rate = buffer.sample_rate;
    const size_t n = buffer.num_samples();
    const size_t lo = std::min(start_sample, n);
    const size_t hi = std::min(start_sample + count, n);
    for (const auto& ch : buffer.channels)
        out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(lo),
                                  ch.begin() + static_cast<std::ptrdiff_t>(hi));
    return out;
}

} // namespace meetkit
