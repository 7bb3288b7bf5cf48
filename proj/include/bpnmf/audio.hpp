#pragma once

#include "bpnmf/types.hpp"

#include <complex>
#include <span>
#include <vector>

namespace bpnmf {

struct StftConfig {
    int fft_size = 512;
    int hop = 256; // fft_size/2 gives 50% overlap
    double sample_rate = 22050.0;

    void validate() const; // power-of-two fft, hop divides fft_size
};

struct Spectrogram {
    Eigen::MatrixXcd coef; // (fft_size/2 + 1) x frames
    StftConfig config;
    double scale = 1.0; // quantization scale, recorded by quantize()

    Eigen::Index bins() const { return coef.rows(); }
    Eigen::Index frames() const { return coef.cols(); }
};

/// Hann-windowed half-overlapped STFT.
/// frames = floor((len - fft_size)/hop) + 1.
Spectrogram stft(std::span<const double> signal, const StftConfig& cfg);

/// Weighted overlap-add inverse with per-sample window normalization.
std::vector<double> istft(const Spectrogram& spec);

/// Scales magnitudes so the maximum maps to target_max, rounds to nearest
/// integer, and records the scale on the spectrogram.
CountMat quantize(Spectrogram& spec, std::int64_t target_max = 1000);

/// Per-source soft masks from component rates: M_g = sum_{k in g} W_k HS_k
/// over the total, applied to the complex mixture coefficients.
std::vector<Spectrogram>
wiener_separate(const Spectrogram& mix, const Mat& W, const Mat& HS,
                const std::vector<std::vector<int>>& groups);

/// For each reference envelope, the single component whose activation row
/// has the largest Pearson correlation; ties go to the lower index,
/// constant sequences count as correlation 0.
std::vector<int> match_components(const Mat& activations,
                                  const std::vector<Vec>& references);

/// Frame-aligned power envelope of a signal (per-frame energy of its
/// magnitude spectrogram).
Vec power_envelope(std::span<const double> signal, const StftConfig& cfg);

} // namespace bpnmf
