#pragma once

#include <string>
#include <vector>

namespace bpnmf {

struct WavData {
    std::vector<double> samples; // mono, in [-1, 1]
    double sample_rate = 22050.0;
};

/// Reads RIFF WAV, PCM16 or IEEE float32. Multichannel input is averaged
/// to mono. When target_rate > 0 and differs from the file rate, the
/// signal is resampled with a windowed-sinc kernel.
WavData read_wav(const std::string& path, double target_rate = 0.0);

/// Writes mono IEEE float32 WAV.
void write_wav(const std::string& path, const std::vector<double>& samples,
               double sample_rate);

/// Windowed-sinc resampling to an arbitrary target rate.
std::vector<double> resample(const std::vector<double>& in, double rate_in,
                             double rate_out);

} // namespace bpnmf
