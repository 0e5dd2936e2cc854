// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace ucsfl {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of a named, indexed substream. All randomness in the library flows
/// from one base seed through this function, so that e.g. the "channel"
/// stream of draw 3 never depends on how many numbers "placement" consumed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                                    std::uint64_t index = 0) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(base ^ h) + index);
}

inline Rng make_rng(std::uint64_t base, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(base, stream, index));
}

/// Circularly-symmetric complex Gaussian with unit variance.
inline std::complex<double> complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, 0.7071067811865476);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace ucsfl
