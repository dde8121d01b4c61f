#include "insider/rng.hpp"

#include <cmath>
#include <numbers>

namespace insider {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block ctr) const
{
    Key key = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double open_unit(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path_index)
    : gen_(seed), path_(path_index)
{
}

double NormalStream::refill()
{
    const Philox4x32::Block out = gen_({static_cast<std::uint32_t>(block_),
                                        static_cast<std::uint32_t>(block_ >> 32),
                                        static_cast<std::uint32_t>(path_),
                                        static_cast<std::uint32_t>(path_ >> 32)});
    ++block_;
    const double u1 = open_unit((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
    const double u2 = open_unit((static_cast<std::uint64_t>(out[2]) << 32) | out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double NormalStream::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    return refill();
}

}  // namespace insider
