#include "bpnmf/wav.hpp"

#include "bpnmf/types.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace bpnmf {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
           std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t rd_u16(const unsigned char* p) {
    return std::uint16_t(p[0] | p[1] << 8);
}

void wr_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<char*>(b), 4);
}
void wr_u16(std::ofstream& f, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8)};
    f.write(reinterpret_cast<char*>(b), 2);
}

} // namespace

WavData read_wav(const std::string& path, double target_rate) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ModelError("file-not-found: " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw ModelError("format-mismatch: not a RIFF WAV file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t data_off = 0, data_len = 0;
    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const std::uint32_t chunk_len = rd_u32(raw.data() + pos + 4);
        if (std::memcmp(raw.data() + pos, "fmt ", 4) == 0) {
            const unsigned char* p = raw.data() + pos + 8;
            format = rd_u16(p);
            channels = rd_u16(p + 2);
            rate = rd_u32(p + 4);
            bits = rd_u16(p + 14);
        } else if (std::memcmp(raw.data() + pos, "data", 4) == 0) {
            data_off = pos + 8;
            data_len = chunk_len;
        }
        pos += 8 + chunk_len + (chunk_len & 1);
    }
    if (channels == 0 || data_off == 0 ||
        data_off + data_len > raw.size())
        throw ModelError("format-mismatch: malformed WAV chunks");

    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32)
        throw ModelError("format-mismatch: only PCM16 and float32 supported");

    const std::size_t bytes_per = bits / 8;
    const std::size_t n_frames = data_len / (bytes_per * channels);
    WavData out;
    out.sample_rate = rate;
    out.samples.resize(n_frames);
    const unsigned char* p = raw.data() + data_off;
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* sp = p + (i * channels + c) * bytes_per;
            if (pcm16) {
                std::int16_t v;
                std::memcpy(&v, sp, 2);
                acc += v / 32768.0;
            } else {
                float v;
                std::memcpy(&v, sp, 4);
                acc += v;
            }
        }
        out.samples[i] = acc / channels;
    }

    if (target_rate > 0.0 && std::fabs(target_rate - out.sample_rate) > 1e-9) {
        out.samples = resample(out.samples, out.sample_rate, target_rate);
        out.sample_rate = target_rate;
    }
    return out;
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               double sample_rate) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ModelError("cannot open for writing: " + path);
    const std::uint32_t data_len =
        static_cast<std::uint32_t>(samples.size() * 4);
    const std::uint32_t rate = static_cast<std::uint32_t>(sample_rate);
    f.write("RIFF", 4);
    wr_u32(f, 36 + data_len);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    wr_u32(f, 16);
    wr_u16(f, 3); // IEEE float
    wr_u16(f, 1);
    wr_u32(f, rate);
    wr_u32(f, rate * 4);
    wr_u16(f, 4);
    wr_u16(f, 32);
    f.write("data", 4);
    wr_u32(f, data_len);
    for (double s : samples) {
        float v = static_cast<float>(s);
        f.write(reinterpret_cast<char*>(&v), 4);
    }
}

std::vector<double> resample(const std::vector<double>& in, double rate_in,
                             double rate_out) {
    if (!(rate_in > 0) || !(rate_out > 0))
        throw ModelError("resample: nonpositive rate");
    if (in.empty())
        return {};
    const double ratio = rate_out / rate_in;
    const auto n_out = static_cast<std::size_t>(
        std::floor((in.size() - 1) * ratio)) + 1;
    const int half_width = 16;
    // Low-pass at the smaller Nyquist when downsampling.
    const double cutoff = std::min(1.0, ratio);

    std::vector<double> out(n_out);
    for (std::size_t n = 0; n < n_out; ++n) {
        const double center = n / ratio;
        const auto m0 = static_cast<long>(std::ceil(center - half_width));
        const auto m1 = static_cast<long>(std::floor(center + half_width));
        double acc = 0.0;
        for (long m = m0; m <= m1; ++m) {
            if (m < 0 || m >= static_cast<long>(in.size()))
                continue;
            const double x = center - m;
            double sinc = x == 0.0
                              ? cutoff
                              : std::sin(M_PI * cutoff * x) / (M_PI * x);
            // Hann taper over the kernel support.
            const double w =
                0.5 * (1.0 + std::cos(M_PI * x / half_width));
            acc += in[m] * sinc * w;
        }
        out[n] = acc;
    }
    return out;
}

} // namespace bpnmf
