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

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rbcorr/channels.h"
#include "rbcorr/errors.h"
#include "rbcorr/noise.h"
#include "rbcorr/random.h"

using namespace rbcorr;

TEST(Channels, ChoiFromKrausMatchesActionOnBasis) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const Channel ch = random_channel(2, 1 + trial % 4, rng);
        std::vector<oracle::Matrix> ks(ch.kraus().begin(), ch.kraus().end());
        EXPECT_LT(max_abs(ch.choi() - oracle::choi_by_action(ks)), 1e-12);
    }
}

TEST(ChannelsProperty, RepresentationsAgreeOnRandomStates) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + trial % 2;
        const Channel ch = random_channel(d, 3, rng);
        EXPECT_TRUE(is_cptp(ch.choi(), d, d));
        const ComplexMatrix rho = random_density_matrix(d, rng);
        ComplexMatrix by_kraus = ComplexMatrix::Zero(d, d);
        for (const auto& k : ch.kraus()) by_kraus += k * rho * k.adjoint();
        EXPECT_LT(max_abs(apply_choi(ch.choi(), rho, d, d) - by_kraus), 1e-12);
        const ComplexMatrix s = choi_to_superop(ch.choi(), d, d);
        ComplexVector v(d * d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
        const ComplexVector w = s * v;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(std::abs(w(i * d + j) - by_kraus(i, j)), 0.0, 1e-12);
        EXPECT_LT(max_abs(superop_to_choi(s, d, d) - ch.choi()), 1e-12);
        const auto ks = kraus_from_choi(ch.choi(), d, d);
        EXPECT_LT(max_abs(choi_from_kraus(ks) - ch.choi()), 1e-12);
    }
}

TEST(Channels, CompositionAppliesFirstThenSecond) {
    std::mt19937_64 rng(43);
    const Channel a = random_channel(2, 2, rng);
    const Channel b = random_channel(2, 2, rng);
    const ComplexMatrix rho = random_density_matrix(2, rng);
    EXPECT_LT(max_abs(compose(b, a).apply(rho) - b.apply(a.apply(rho))), 1e-12);
}

TEST(Channels, CptpChecksRejectBadMaps) {
    EXPECT_TRUE(is_cptp(identity_channel(2).choi(), 2, 2));
    EXPECT_FALSE(is_trace_preserving(0.5 * identity_channel(2).choi(), 2, 2));
    ComplexMatrix transpose_map = swap_operator(2);  // Choi of the transpose map
    EXPECT_FALSE(is_completely_positive(transpose_map));
    EXPECT_THROW(require_cptp(transpose_map, 2, 2, "transpose"), ValidationError);
    EXPECT_THROW(Channel::from_choi(identity(3), 2), DimensionError);
}

TEST(Channels, NamedChannelsHaveExpectedDecayParameters) {
    EXPECT_NEAR(decay_parameter(depolarizing_channel(2, 0.9).choi(), 2), 0.9, 1e-12);
    EXPECT_NEAR(decay_parameter(bit_flip_channel().choi(), 2), -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(decay_parameter(identity_channel(2).choi(), 2), 1.0, 1e-12);
    EXPECT_NEAR(decay_parameter(pauli_channel(0.1, 0.05, 0.05).choi(), 2), 1.0 - 4.0 / 3.0 * 0.2, 1e-12);
    const ComplexMatrix u = unitary_from_hamiltonian(pauli_z(), 0.4);
    const double tr = std::abs(u.trace());
    EXPECT_NEAR(decay_parameter(unitary_channel(u).choi(), 2), (tr * tr - 1.0) / 3.0, 1e-12);
}

TEST(Channels, DepolarizingActsAsExpected) {
    std::mt19937_64 rng(44);
    const ComplexMatrix rho = random_density_matrix(2, rng);
    const double q = 0.7;
    EXPECT_LT(max_abs(depolarizing_channel(2, q).apply(rho) - (q * rho + (1 - q) * identity(2) / 2.0)), 1e-14);
}
