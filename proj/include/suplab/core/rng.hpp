#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace suplab {

/// Purpose of a sub-stream. Draw kinds live on disjoint sub-streams so
/// that, e.g., switching a jump kernel off reproduces the diffusion path
/// bit-exactly.
enum class RngChannel : uint32_t {
    Init = 0,      // initial-condition sampling
    Diffusion = 1, // Brownian increments
    JumpClock = 2, // Poisson ticks + thinning accepts
    JumpMark = 3,  // jump displacements
    Resample = 4,  // inverse-CDF resampling
    Bootstrap = 5, // bootstrap resampling
    Scratch = 6,
};

/// Counter-based random stream (Philox 4x32-10).
///
/// A stream is fully determined by (seed, particle, replicate, channel);
/// the draw counter advances one block per variate, so results are
/// independent of execution order and thread count.
class RngStream {
public:
    RngStream() = default;
    RngStream(uint64_t seed, uint32_t particle, uint32_t replicate,
              RngChannel channel = RngChannel::Scratch)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          particle_(particle),
          lane_(replicate * 8u + static_cast<uint32_t>(channel)) {}

    /// Uniform in (0, 1). Consumes one block.
    double uniform() {
        auto r = next_block();
        return to_unit(r[0], r[1]);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller. Consumes one block.
    double normal() {
        auto r = next_block();
        double u1 = to_unit(r[0], r[1]);
        double u2 = to_unit(r[2], r[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Exponential with the given rate. Consumes one block.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    uint64_t counter() const { return counter_; }

private:
    static constexpr uint32_t kW32A = 0x9E3779B9u;
    static constexpr uint32_t kW32B = 0xBB67AE85u;
    static constexpr uint32_t kM4xA = 0xD2511F53u;
    static constexpr uint32_t kM4xB = 0xCD9E8D57u;

    static void mulhilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
        uint64_t p = static_cast<uint64_t>(a) * b;
        lo = static_cast<uint32_t>(p);
        hi = static_cast<uint32_t>(p >> 32);
    }

    std::array<uint32_t, 4> next_block() {
        std::array<uint32_t, 4> c = {static_cast<uint32_t>(counter_),
                                     static_cast<uint32_t>(counter_ >> 32), particle_, lane_};
        ++counter_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint32_t lo0, hi0, lo1, hi1;
            mulhilo(kM4xA, c[0], lo0, hi0);
            mulhilo(kM4xB, c[2], lo1, hi1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += kW32A;
            k1 += kW32B;
        }
        return c;
    }

    /// Map two 32-bit words to a double in (0, 1).
    static double to_unit(uint32_t a, uint32_t b) {
        uint64_t u = (static_cast<uint64_t>(a) << 32) | b;
        return ((u >> 11) + 0.5) * 0x1.0p-53;
    }

    uint32_t key0_ = 0, key1_ = 0;
    uint32_t particle_ = 0, lane_ = 0;
    uint64_t counter_ = 0;
};

} // namespace suplab
