#pragma once

#include <array>
#include <cstdint>

namespace mvlab {

// philox4x32-10 block function (counter-based, splittable). The stream
// identity is (seed -> key, substream -> high counter words); consecutive
// blocks advance the low counter words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Deterministic per-substream draw sequence. Uniforms come two per block;
// normals use Box-Muller on consecutive uniforms (rejection-free, so the
// consumption pattern never desynchronizes parallel substreams).
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t substream)
        : seed_(seed), substream_(substream) {}

    double uniform();  // in (0, 1)
    double normal();   // standard normal

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    double buf_[2] = {0.0, 0.0};
    int avail_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mvlab
