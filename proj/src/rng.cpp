#include "mvlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace mvlab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

void RandomStream::refill() {
    const std::array<std::uint32_t, 4> out = philox4x32(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    // 53-bit mantissa plus half-ulp offset keeps draws strictly inside (0, 1).
    buf_[0] = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    buf_[1] = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
    avail_ = 2;
}

double RandomStream::uniform() {
    if (avail_ == 0) refill();
    const int idx = 2 - avail_;
    --avail_;
    return buf_[idx];
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace mvlab
