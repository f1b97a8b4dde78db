#pragma once

#include <array>
#include <cstdint>

namespace lrmsim {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Counter-based stream: the key is the seed, the upper counter half is the stream id,
// the lower half counts blocks. Stream k is addressable without touching streams 0..k-1.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    // Standard normal, Marsaglia polar method (the second variate is cached).
    double normal();
    // Child stream derived from this stream's identity; does not consume values.
    RngStream split(std::uint64_t tag) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lrmsim
