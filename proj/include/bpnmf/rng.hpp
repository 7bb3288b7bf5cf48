#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace bpnmf {

/// Seeded random stream. Identical (seed, stream_id) pairs reproduce the
/// same variate sequence; distinct stream_ids are independent, so parallel
/// workers each own a stream and never share generator state.
///
/// All distributions are implemented on top of the raw engine output, so
/// sequences do not depend on the standard library's distribution
/// implementations.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Gamma under the shape-rate convention: mean = shape / rate.
    /// Underflow is clamped to the smallest positive normal double.
    double gamma(double shape, double rate);

    /// Beta variate clamped strictly inside (0, 1).
    double beta(double alpha, double beta);

    /// Returns 1 with probability p.
    int bernoulli(double p);

    std::int64_t poisson(double rate);

  private:
    double gamma_unit_rate(double shape);

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 eng_;
};

} // namespace bpnmf
