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

#include <array>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rbcorr/channels.h"
#include "rbcorr/clifford.h"
#include "rbcorr/errors.h"
#include "rbcorr/noise.h"
#include "rbcorr/random.h"

using namespace rbcorr;

namespace {

// Partial transpose of the output factor, written out by index.
ComplexMatrix transpose_output(const ComplexMatrix& choi) {
    ComplexMatrix out(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int o = 0; o < 2; ++o)
            for (int j = 0; j < 2; ++j)
                for (int p = 0; p < 2; ++p) out(i * 2 + o, j * 2 + p) = choi(i * 2 + p, j * 2 + o);
    return out;
}

// Unique element of span{I, F} with the same traces against I and F.
ComplexMatrix schur_weyl_projection(const ComplexMatrix& op) {
    const Complex a = op.trace();
    const Complex b = (swap_operator(2) * op).trace();
    // [[4, 2], [2, 4]] [ci, cf] = [a, b]
    const Complex ci = (4.0 * a - 2.0 * b) / 12.0;
    const Complex cf = (4.0 * b - 2.0 * a) / 12.0;
    return ci * identity(4) + cf * swap_operator(2);
}

}  // namespace

TEST(Clifford, GroupHasTwentyFourDistinctUnitaries) {
    const CliffordGroup& g = clifford_group();
    ASSERT_EQ(g.order(), 24u);
    for (std::size_t a = 0; a < 24; ++a) {
        EXPECT_TRUE(is_unitary(g.element(a), 1e-12));
        for (std::size_t b = a + 1; b < 24; ++b) {
            // Distinct up to phase: |Tr(U_a^dag U_b)| < 2.
            EXPECT_LT(std::abs((g.element(a).adjoint() * g.element(b)).trace()), 2.0 - 1e-6);
        }
    }
    EXPECT_LT(max_abs(g.element(g.identity_index()) - identity(2)), 1e-12);
}

TEST(Clifford, CompositionTableMatchesMatrixProductsExhaustively) {
    const CliffordGroup& g = clifford_group();
    for (std::size_t a = 0; a < 24; ++a) {
        EXPECT_EQ(g.compose(a, g.inverse(a)), g.identity_index());
        EXPECT_EQ(g.compose(g.inverse(a), a), g.identity_index());
        for (std::size_t b = 0; b < 24; ++b) {
            const ComplexMatrix prod = g.element(a) * g.element(b);
            const ComplexMatrix table = g.element(g.compose(a, b));
            EXPECT_NEAR(std::abs((table.adjoint() * prod).trace()), 2.0, 1e-10) << a << "," << b;
        }
    }
}

TEST(Clifford, FindIdentifiesElementsUpToGlobalPhase) {
    const CliffordGroup& g = clifford_group();
    for (std::size_t a = 0; a < 24; ++a) EXPECT_EQ(g.find(std::polar(1.0, 0.37 * a) * g.element(a)), a);
    EXPECT_THROW(g.find(unitary_from_hamiltonian(pauli_z(), 0.1)), ValidationError);
}

TEST(Clifford, GenerateGroupIsDeterministic) {
    const CliffordGroup a = generate_group();
    const CliffordGroup& b = clifford_group();
    for (std::size_t i = 0; i < 24; ++i) EXPECT_LT(max_abs(a.element(i) - b.element(i)), 1e-15);
}

TEST(Clifford, SamplingIsUniformByChiSquare) {
    std::mt19937_64 rng(2024);
    std::array<int, 24> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const GateIndex g = sample_uniform(rng);
        ASSERT_LT(g, 24u);
        ++counts[g];
    }
    double chi2 = 0.0;
    const double expected = n / 24.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // Upper 0.001 quantile of chi-square with 23 degrees of freedom.
    EXPECT_LT(chi2, 49.728);
}

TEST(Clifford, SamplingStreamsAreReproducibleAndDecorrelated) {
    std::mt19937_64 a(1), b(1), c(2);
    std::vector<GateIndex> sa, sb, sc;
    for (int i = 0; i < 100; ++i) {
        sa.push_back(sample_uniform(a));
        sb.push_back(sample_uniform(b));
        sc.push_back(sample_uniform(c));
    }
    EXPECT_EQ(sa, sb);
    EXPECT_NE(sa, sc);
}

TEST(Twirl, IdentityAndCompletelyDepolarizingChannels) {
    EXPECT_NEAR(twirl_coefficients(identity_channel(2).choi(), 2).c_swap, 1.0, 1e-12);
    EXPECT_NEAR(twirl_coefficients(depolarizing_channel(2, 0.0).choi(), 2).c_swap, 0.0, 1e-12);
    EXPECT_THROW(twirl_coefficients(identity(3), 2), DimensionError);
}

TEST(TwirlProperty, GroupAverageEqualsSchurWeylProjection) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Channel ch = random_channel(2, 1 + trial % 4, rng);
        const ComplexMatrix o = transpose_output(ch.choi());
        const ComplexMatrix avg = group_twirl(o);
        EXPECT_LT(max_abs(avg - schur_weyl_projection(o)), 1e-10);
        const TwirlCoefficients c = twirl_coefficients(ch.choi(), 2);
        EXPECT_LT(max_abs(avg - (c.c_identity * identity(4) + c.c_swap * swap_operator(2))), 1e-10);
        EXPECT_NEAR(2.0 * c.c_identity + c.c_swap, 1.0, 1e-10);
        EXPECT_NEAR(c.c_swap, decay_parameter(ch.choi(), 2), 1e-12);
    }
}

TEST(TwirlProperty, CoefficientsAreLinear) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = oracle::random_hermitian(4, rng);
        const ComplexMatrix b = oracle::random_hermitian(4, rng);
        const double alpha = 0.3 + trial, beta = -1.7 + 0.2 * trial;
        const TwirlCoefficients ca = twirl_coefficients_of_operator(a, 2);
        const TwirlCoefficients cb = twirl_coefficients_of_operator(b, 2);
        const TwirlCoefficients cs = twirl_coefficients_of_operator(alpha * a + beta * b, 2);
        EXPECT_NEAR(cs.c_identity, alpha * ca.c_identity + beta * cb.c_identity, 1e-10);
        EXPECT_NEAR(cs.c_swap, alpha * ca.c_swap + beta * cb.c_swap, 1e-10);
    }
}
