#pragma once

#include <complex>
#include <cstdint>

namespace svev {

// xoshiro256** whose 256-bit state is derived from (seed, stream) through
// SplitMix64. Distinct streams give statistically independent sequences and
// the output depends on nothing but the two integers.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    // Standard normal via the Box-Muller transform.
    double normal() noexcept;
    // Complex Gaussian with density exp(-|x|^2)/pi.
    std::complex<double> complex_normal() noexcept;

private:
    std::uint64_t seed_, stream_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace svev
