#pragma once

#include <cstdint>

namespace hofd {

/// Counter-based pseudo-random generator (Philox4x32-10).
///
/// Every variate is a pure function of (seed, stream, index), so samplers can
/// hand out independent, reproducible streams without carrying mutable state.
/// Output is bitwise identical across platforms and compilers.
class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed) : seed_(seed) {}

    /// 2x64 bits of the Philox block for counter (stream, index).
    void block(std::uint64_t stream, std::uint64_t index,
               std::uint64_t& out_lo, std::uint64_t& out_hi) const;

    /// Uniform double in the open interval (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t index) const;

    /// Standard normal via inverse CDF of uniform(stream, index).
    double normal(std::uint64_t stream, std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

namespace detail {

/// Inverse standard normal CDF, accurate to ~1e-15 relative error.
double inverse_normal_cdf(double p);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace detail
}  // namespace hofd
