#pragma once

// Counter-based normal variates for Monte Carlo paths.
//
// Generator: Philox4x32-10 (Salmon et al., SC'11). The 128-bit counter is
// (block_lo, block_hi, path_lo, path_hi) and the 64-bit key is the seed, so
// the stream of path i is a pure function of (seed, i) and never depends on
// which thread runs it or in which order.
//
// Transform: each counter block yields four 32-bit words; (w0, w1) and
// (w2, w3) form two 52-bit uniforms in the open interval (0, 1) and the
// Box-Muller transform turns them into two independent standard normals.

#include <array>
#include <cstdint>

namespace insider {

class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(Key key) : key_(key) {}
    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    {
    }

    /// Ten-round bijection of the counter under the key.
    Block operator()(Block counter) const;

private:
    Key key_;
};

class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index);

    double next();

private:
    double refill();

    Philox4x32 gen_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic standard-normal stream for one Monte Carlo path.
inline NormalStream rng_substream(std::uint64_t seed, std::uint64_t path_index)
{
    return NormalStream(seed, path_index);
}

/// Maps 64 random bits to a double in (0, 1): (top 52 bits + 1/2) * 2^-52.
/// With 53 bits the largest value would round up to exactly 1.
double open_unit(std::uint64_t bits);

}  // namespace insider
