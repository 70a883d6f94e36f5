#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <string_view>

namespace lppd {

namespace detail {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// Maps 64 random bits to a double in the open interval (0,1).
constexpr double open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// -ln(u) for u in (0,1), using only IEEE +,-,*,/ in a fixed order so the
/// result does not depend on the platform libm or on vectorization.
inline double neg_log_open_unit(double u) noexcept {
    const auto bits = std::bit_cast<std::uint64_t>(u);
    // Offsetting by sqrt(1/2) puts the reduced mantissa in [sqrt(1/2), sqrt(2)).
    constexpr std::uint64_t sqrt_half = 0x3FE6A09E667F3BCDULL;
    const std::uint64_t shifted = bits + (0x3FF0000000000000ULL - sqrt_half);
    const auto exponent = static_cast<std::int64_t>(shifted >> 52) - 1023;
    const double m = std::bit_cast<double>((shifted & 0x000FFFFFFFFFFFFFULL) + sqrt_half);

    // ln(m) = 2 atanh(s), s = (m-1)/(m+1), |s| < 0.1716
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    const double s4 = s2 * s2;
    // Estrin-style pairing keeps the dependency chain short.
    const double a0 = 1.0 + s2 * (1.0 / 3);
    const double a1 = 1.0 / 5 + s2 * (1.0 / 7);
    const double a2 = 1.0 / 9 + s2 * (1.0 / 11);
    const double a3 = 1.0 / 13 + s2 * (1.0 / 15);
    const double a4 = 1.0 / 17 + s2 * (1.0 / 19);
    const double a5 = 1.0 / 21 + s2 * (1.0 / 23);
    const double s8 = s4 * s4;
    const double b0 = a0 + s4 * a1;
    const double b1 = a2 + s4 * a3;
    const double b2 = a4 + s4 * a5;
    const double poly = b0 + s8 * (b1 + s8 * b2);
    const double log_m = 2.0 * s * poly;

    constexpr double ln2_hi = 0.6931471803691238;
    constexpr double ln2_lo = 1.9082149292705877e-10;
    const double e = static_cast<double>(exponent);
    return -((e * ln2_hi + log_m) + e * ln2_lo);
}

} // namespace detail

/// Inverse-CDF exponential sample: -ln(u)/rate. Requires 0 < u < 1 and rate > 0.
double sample_exp(double rate, double u);

/// Stable 64-bit hash of a tag string (FNV-1a), used to name RNG streams.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Derived seed for replicate `index` of an experiment: a pure function of
/// (master_seed, experiment_tag, index), so any replicate can be replayed alone.
constexpr std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t experiment_tag,
                                       std::uint64_t index) noexcept {
    return detail::mix64(detail::mix64(master_seed ^ detail::mix64(experiment_tag)) +
                         (index + 1) * detail::golden_gamma);
}

/// Counter-based stream: output k is a hash of (master_seed, stream_id, k).
/// Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : master_seed_(master_seed),
          stream_id_(stream_id),
          key_(detail::mix64(detail::mix64(master_seed) ^ (stream_id * detail::golden_gamma + 1))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        return detail::mix64(key_ + (++counter_) * detail::golden_gamma);
    }

    /// Uniform in the open interval (0,1).
    double uniform() noexcept { return detail::open_unit((*this)()); }
    /// Exp(rate) by inverse CDF.
    double exponential(double rate) noexcept {
        return detail::neg_log_open_unit(uniform()) / rate;
    }
    bool bernoulli(double p) noexcept { return uniform() < p; }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace lppd
