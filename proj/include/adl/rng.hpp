#pragma once

#include <cstdint>
#include <random>

namespace adl {

// All sampling in the library draws from a 64-bit Mersenne twister. Streams
// are addressed by (seed, stream id) so that disjoint trial ranges can be
// generated independently and reproduced exactly.
using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x41444cu};
    return Rng(seq);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline double gaussian(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

// Name recorded in reports that contain Gaussian draws.
inline constexpr const char* kGaussianAlgorithm =
    "std::normal_distribution over mt19937_64 (libstdc++ Marsaglia polar method)";

}  // namespace adl
