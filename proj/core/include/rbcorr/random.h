// Copyright 2026 The rbcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBCORR_RANDOM_H
#define RBCORR_RANDOM_H

#include <cstdint>
#include <random>

#include "rbcorr/numerics.h"

namespace rbcorr {

/// One SplitMix64 step; advances `state`.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hierarchical seed derivation: the result depends on every component, so
/// streams for different (a, b) pairs under one master seed are independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s = h ^ (a + 0x632be59bd9b4e019ULL);
    h = splitmix64(s);
    s = h ^ (b + 0x8cb92ba72f3d8dd7ULL);
    return splitmix64(s);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return std::mt19937_64(derive_seed(master, a, b));
}

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
ComplexMatrix haar_unitary(std::size_t d, std::mt19937_64& rng);

/// Haar-random unit vector.
ComplexVector haar_state(std::size_t d, std::mt19937_64& rng);

/// Density matrix G G^dag / Tr(G G^dag) with G a d x rank Ginibre matrix.
ComplexMatrix random_density_matrix(std::size_t d, std::mt19937_64& rng, std::size_t rank = 0);

}  // namespace rbcorr

#endif  // RBCORR_RANDOM_H
