#include "bpnmf/rng.hpp"

#include <cmath>
#include <limits>

namespace bpnmf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kMinPositive = std::numeric_limits<double>::min();

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      eng_(splitmix64(splitmix64(seed) ^ splitmix64(~stream_id))) {}

std::uint64_t RngStream::next_u64() { return eng_(); }

double RngStream::uniform() {
    // 53 random bits mapped into (0,1); 0 is remapped to the smallest
    // representable step so log(u) is always finite.
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double RngStream::gamma_unit_rate(double shape) {
    // Marsaglia-Tsang squeeze method; shape < 1 handled by boosting.
    if (shape < 1.0) {
        double u = uniform();
        return gamma_unit_rate(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            // Box-Muller normal from two uniforms.
            double u1 = uniform();
            double u2 = uniform();
            x = std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * M_PI * u2);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

double RngStream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma: nonpositive-parameter");
    double g = gamma_unit_rate(shape) / rate;
    return g > kMinPositive ? g : kMinPositive;
}

double RngStream::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta: nonpositive-parameter");
    double x = gamma_unit_rate(alpha);
    double y = gamma_unit_rate(beta);
    double b = x / (x + y);
    const double eps = std::numeric_limits<double>::epsilon();
    if (b < eps)
        b = eps;
    if (b > 1.0 - eps)
        b = 1.0 - eps;
    return b;
}

int RngStream::bernoulli(double p) {
    if (!(p >= 0.0) || !(p <= 1.0))
        throw std::invalid_argument("bernoulli: out-of-range probability");
    if (p <= 0.0)
        return 0;
    if (p >= 1.0)
        return 1;
    return uniform() < p ? 1 : 0;
}

std::int64_t RngStream::poisson(double rate) {
    if (rate < 0.0 || std::isnan(rate))
        throw std::invalid_argument("poisson: negative-rate");
    if (rate == 0.0)
        return 0;
    if (rate < 30.0) {
        // Knuth multiplication.
        double l = std::exp(-rate);
        std::int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }
    // PTRS transformed rejection (Hormann 1993).
    const double b = 0.931 + 2.53 * std::sqrt(rate);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::fabs(u);
        double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        double log_rate = std::log(rate);
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_rate - rate - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

} // namespace bpnmf
