#include "bpnmf/audio.hpp"

#include <cmath>

namespace bpnmf {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / double(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j];
                auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a)
            v /= double(n);
}

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / n));
    return w;
}

} // namespace

void StftConfig::validate() const {
    if (!is_pow2(fft_size))
        throw ModelError("stft: fft_size must be a power of two");
    if (hop < 1 || fft_size % hop != 0)
        throw ModelError("stft: hop must divide fft_size");
    if (!(sample_rate > 0))
        throw ModelError("stft: sample_rate must be positive");
}

Spectrogram stft(std::span<const double> signal, const StftConfig& cfg) {
    cfg.validate();
    const int n = cfg.fft_size;
    if (signal.size() < static_cast<std::size_t>(n))
        throw ModelError("signal-too-short");
    const auto frames =
        static_cast<Eigen::Index>((signal.size() - n) / cfg.hop + 1);
    const Eigen::Index bins = n / 2 + 1;
    const auto win = hann_window(n);

    Spectrogram out;
    out.config = cfg;
    out.coef.resize(bins, frames);
    std::vector<std::complex<double>> buf(n);
    for (Eigen::Index m = 0; m < frames; ++m) {
        const std::size_t off = static_cast<std::size_t>(m) * cfg.hop;
        for (int i = 0; i < n; ++i)
            buf[i] = signal[off + i] * win[i];
        fft_inplace(buf, false);
        for (Eigen::Index b = 0; b < bins; ++b)
            out.coef(b, m) = buf[b];
    }
    return out;
}

std::vector<double> istft(const Spectrogram& spec) {
    spec.config.validate();
    const int n = spec.config.fft_size;
    const int hop = spec.config.hop;
    if (spec.bins() != n / 2 + 1)
        throw ModelError("istft: bin count does not match fft_size");
    const auto frames = spec.frames();
    const std::size_t len = static_cast<std::size_t>(frames - 1) * hop + n;
    const auto win = hann_window(n);

    std::vector<double> out(len, 0.0);
    std::vector<double> wsum(len, 0.0);
    std::vector<std::complex<double>> buf(n);
    for (Eigen::Index m = 0; m < frames; ++m) {
        for (int b = 0; b <= n / 2; ++b)
            buf[b] = spec.coef(b, m);
        for (int b = n / 2 + 1; b < n; ++b)
            buf[b] = std::conj(spec.coef(n - b, m));
        fft_inplace(buf, true);
        const std::size_t off = static_cast<std::size_t>(m) * hop;
        for (int i = 0; i < n; ++i) {
            out[off + i] += buf[i].real() * win[i];
            wsum[off + i] += win[i] * win[i];
        }
    }
    for (std::size_t i = 0; i < len; ++i)
        out[i] = wsum[i] > 1e-12 ? out[i] / wsum[i] : 0.0;
    return out;
}

CountMat quantize(Spectrogram& spec, std::int64_t target_max) {
    if (target_max < 1)
        throw ModelError("quantize: target_max must be >= 1");
    Mat mag = spec.coef.cwiseAbs();
    const double mx = mag.maxCoeff();
    if (mx <= 0.0)
        throw ModelError("all-zero-spectrogram");
    const double scale = static_cast<double>(target_max) / mx;
    spec.scale = scale;
    CountMat counts(mag.rows(), mag.cols());
    for (Eigen::Index j = 0; j < mag.cols(); ++j)
        for (Eigen::Index i = 0; i < mag.rows(); ++i)
            counts(i, j) =
                static_cast<std::int64_t>(std::llround(mag(i, j) * scale));
    return counts;
}

std::vector<Spectrogram>
wiener_separate(const Spectrogram& mix, const Mat& W, const Mat& HS,
                const std::vector<std::vector<int>>& groups) {
    if (W.rows() != mix.bins() || HS.cols() != mix.frames() ||
        W.cols() != HS.rows())
        throw ModelError("dimension-mismatch: wiener inputs");
    for (const auto& g : groups)
        if (g.empty())
            throw ModelError("empty-group");

    Mat total = W * HS;
    std::vector<Spectrogram> out;
    out.reserve(groups.size());
    for (const auto& grp : groups) {
        Mat num = Mat::Zero(mix.bins(), mix.frames());
        for (int k : grp) {
            if (k < 0 || k >= W.cols())
                throw ModelError("component index out of range");
            num += W.col(k) * HS.row(k);
        }
        Spectrogram sep;
        sep.config = mix.config;
        sep.scale = mix.scale;
        sep.coef.resize(mix.bins(), mix.frames());
        for (Eigen::Index t = 0; t < mix.frames(); ++t)
            for (Eigen::Index f = 0; f < mix.bins(); ++f) {
                const double den = total(f, t);
                const double m = den > 0.0 ? num(f, t) / den : 0.0;
                sep.coef(f, t) = mix.coef(f, t) * m;
            }
        out.push_back(std::move(sep));
    }
    return out;
}

namespace {

double pearson(const Vec& a, const Vec& b) {
    const double ma = a.mean(), mb = b.mean();
    Vec ca = a.array() - ma, cb = b.array() - mb;
    const double na = ca.norm(), nb = cb.norm();
    if (na <= 0.0 || nb <= 0.0)
        return 0.0; // constant sequences carry no timing information
    return ca.dot(cb) / (na * nb);
}

} // namespace

std::vector<int> match_components(const Mat& activations,
                                  const std::vector<Vec>& references) {
    std::vector<int> picks;
    picks.reserve(references.size());
    for (const auto& ref : references) {
        if (ref.size() != activations.cols())
            throw ModelError("dimension-mismatch: envelope length");
        int best = 0;
        double best_corr = -2.0;
        for (Eigen::Index k = 0; k < activations.rows(); ++k) {
            const double c = pearson(activations.row(k).transpose(), ref);
            if (c > best_corr) {
                best_corr = c;
                best = static_cast<int>(k);
            }
        }
        picks.push_back(best);
    }
    return picks;
}

Vec power_envelope(std::span<const double> signal, const StftConfig& cfg) {
    Spectrogram sp = stft(signal, cfg);
    return sp.coef.cwiseAbs2().colwise().sum().transpose();
}

} // namespace bpnmf
