#pragma once

#include <cstdint>

namespace outrend::rng {

/// 64-bit finalizer with full avalanche (splitmix64 mixing function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Seed for the i-th stream of a simulation batch. Depends only on
/// (base_seed, stream_index), so results are independent of which worker
/// produces which path.
constexpr std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                           std::uint64_t stream_index) noexcept {
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (stream_index + 1);
    return mix64(mix64(z) ^ 0xD1B54A32D192ED03ULL);
}

/// Inverse of the standard normal CDF. Acklam's rational approximation
/// refined with one Halley step against erfc; absolute error is at the
/// few-ulp level across (0,1).
double inverse_normal_cdf(double p);

/// Counter-based uniform/normal stream (splitmix64). State advances by a
/// fixed increment per draw, so a stream is a pure function of its seed.
class Stream {
public:
    explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform draw in the open interval (0,1).
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw via the inverse CDF (one uniform per draw).
    double next_normal() { return inverse_normal_cdf(next_uniform()); }

private:
    std::uint64_t state_;
};

}  // namespace outrend::rng
