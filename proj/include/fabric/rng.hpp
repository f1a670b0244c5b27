#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace fabric {

/// Philox4x32-10 counter-based generator: a pure function from a 128-bit
/// counter and 64-bit key to four 32-bit words. Because draws are indexed
/// rather than sequenced, any (walker, step) position can be generated
/// independently of scheduling, which is what makes the Monte Carlo results
/// reproducible across thread counts.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// An indexed stream of variates: stream identity = (seed, stream_id), draw
/// identity = index. Stateless; every variate is a pure function of
/// (seed, stream_id, index).
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          hi_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

    /// Four raw words at a draw index.
    Philox4x32::Counter words(std::uint64_t index) const noexcept {
        Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32), hi_[0], hi_[1]};
        return Philox4x32::block(ctr, key_);
    }

    /// Uniform on (0, 1]: 53-bit mantissa, never exactly zero (safe under log).
    double uniform(std::uint64_t index) const noexcept {
        const auto w = words(index);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(w[0]) << 32) | static_cast<std::uint64_t>(w[1]);
        return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Independent standard-normal pair from one block (Box-Muller; fixed
    /// consumption of exactly one block per index).
    std::pair<double, double> normal_pair(std::uint64_t index) const noexcept {
        const auto w = words(index);
        const std::uint64_t b1 =
            (static_cast<std::uint64_t>(w[0]) << 32) | static_cast<std::uint64_t>(w[1]);
        const std::uint64_t b2 =
            (static_cast<std::uint64_t>(w[2]) << 32) | static_cast<std::uint64_t>(w[3]);
        const double u1 = (static_cast<double>(b1 >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(b2 >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        return {radius * std::cos(2.0 * M_PI * u2), radius * std::sin(2.0 * M_PI * u2)};
    }

    double normal(std::uint64_t index) const noexcept { return normal_pair(index).first; }

    /// Exponential with unit mean.
    double exponential(std::uint64_t index) const noexcept { return -std::log(uniform(index)); }

    /// Second independent uniform lane of the same block, on (0, 1].
    double uniform_lane2(std::uint64_t index) const noexcept {
        const auto w = words(index);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(w[2]) << 32) | static_cast<std::uint64_t>(w[3]);
        return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    std::array<std::uint32_t, 2> hi_;
};

}  // namespace fabric
