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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rbcorr/channels.h"
#include "rbcorr/errors.h"
#include "rbcorr/fitting.h"
#include "rbcorr/noise.h"
#include "rbcorr/random.h"

using namespace rbcorr;

namespace {

HamiltonianCoupled zz_model(double delta) {
    HamiltonianCoupled m;
    m.terms = {{pauli_z(), delta * pauli_z()}};
    m.dt = 1.0;
    m.env_state = identity(2) / 2.0;
    return m;
}

HamiltonianCoupled controlled_model(double d1, double d2, double t = 1.0) {
    HamiltonianCoupled m;
    m.terms = {{basis_op(2, 0, 0), 0.5 * d1 * pauli_z()}, {basis_op(2, 1, 1), 0.5 * d2 * pauli_z()}};
    m.dt = t;
    m.env_state = identity(2) / 2.0;
    return m;
}

double unitary_q(double angle) { return (4.0 * std::cos(angle) * std::cos(angle) - 1.0) / 3.0; }

}  // namespace

TEST(Decay, UnitaryRotationMatchesClosedForm) {
    for (double d : {0.0, 0.01, 0.3, 1.2}) {
        const Channel u = unitary_channel(unitary_from_hamiltonian(pauli_z(), d));
        EXPECT_NEAR(decay_parameter(u.choi(), 2), unitary_q(d), 1e-12);
    }
    const double d = 1e-3;
    EXPECT_NEAR(unitary_q(d), 1.0 - 4.0 * d * d / 3.0, 1e-11);
    EXPECT_THROW(decay_parameter(0.5 * identity_channel(2).choi(), 2), ValidationError);
}

TEST(DecayProperty, DecayParameterStaysInAdmissibleRange) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const double q = decay_parameter(random_channel(2, 1 + trial % 4, rng).choi(), 2);
        EXPECT_GE(q, -1.0 / 3.0 - 1e-12);
        EXPECT_LE(q, 1.0 + 1e-12);
    }
}

TEST(CffBeta, ReferenceInstruments) {
    EXPECT_NEAR(cff_beta(identity_channel(2).choi(), 2), 1.0, 1e-12);
    EXPECT_NEAR(cff_beta(depolarizing_channel(2, 0.0).choi(), 2), 0.0, 1e-12);
    const Channel p0 = Channel::from_kraus({basis_op(2, 0, 0)});
    const Channel p1 = Channel::from_kraus({basis_op(2, 1, 1)});
    EXPECT_NEAR(cff_beta(p0.choi(), 2), 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(cff_beta(p1.choi(), 2), 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(cff_tau(p0.choi(), 2) + cff_tau(p1.choi(), 2), 1.0, 1e-12);
    EXPECT_THROW(cff_beta(-identity(4), 2), ValidationError);
}

TEST(BranchDecays, ZzBranchesShareOneDecay) {
    const double delta = std::numbers::pi / 100.0;
    const auto bd = branch_decays(zz_model(delta));
    ASSERT_GE(bd.size(), 2u);
    for (const auto& b : bd) EXPECT_NEAR(b.decay, unitary_q(delta), 1e-12);
}

TEST(BranchDecays, ControlledRotationBranches) {
    const auto bd = branch_decays(controlled_model(0.2, 0.9));
    std::vector<double> qs;
    for (const auto& b : bd)
        if (b.weight > 0) qs.push_back(b.decay);
    std::sort(qs.begin(), qs.end());
    ASSERT_EQ(qs.size(), 2u);
    EXPECT_NEAR(qs[0], unitary_q(0.45), 1e-12);
    EXPECT_NEAR(qs[1], unitary_q(0.1), 1e-12);
    for (const auto& b : branch_decays(controlled_model(0.0, 0.0))) EXPECT_NEAR(b.decay, 1.0, 1e-12);
}

TEST(BranchDecays, AgreeWithDecayOfBranchUnitaries) {
    const HamiltonianCoupled m = controlled_model(0.7, 1.3, 0.6);
    const CccModel ccc = to_ccc(m);
    const auto bd = branch_decays(m);
    ASSERT_EQ(ccc.branches.size(), bd.size());
    for (std::size_t i = 0; i < bd.size(); ++i) {
        EXPECT_NEAR(bd[i].decay, decay_parameter(ccc.branches[i].choi(), 2), 1e-10);
        EXPECT_NEAR(bd[i].weight, ccc.weights[i], 1e-14);
    }
}

TEST(Blindness, ZzIsBlindAndGenericControlledUnitaryIsNot) {
    const BlindnessReport zz = blindness_check(zz_model(std::numbers::pi / 100.0));
    EXPECT_TRUE(zz.is_blind);
    EXPECT_TRUE(zz.gap_condition);
    const BlindnessReport cu = blindness_check(controlled_model(0.2, 0.9));
    EXPECT_FALSE(cu.is_blind);
    EXPECT_FALSE(cu.gap_condition);
    // C_lambda = cos(t Delta_lambda) for a qubit; check the reported values directly.
    std::vector<double> cs = cu.cosine_sums;
    std::sort(cs.begin(), cs.end());
    EXPECT_NEAR(cs.front(), std::cos(0.9), 1e-12);
    EXPECT_NEAR(cs.back(), std::cos(0.2), 1e-12);
}

TEST(Blindness, ZeroSystemHamiltonianAndGapLattice) {
    HamiltonianCoupled zero = controlled_model(0.0, 0.0);
    EXPECT_TRUE(blindness_check(zero).is_blind);
    // Gaps differing by 2 pi / t give identical branch decays.
    const BlindnessReport lattice = blindness_check(controlled_model(0.4, 0.4 + 2.0 * std::numbers::pi));
    EXPECT_TRUE(lattice.is_blind);
    EXPECT_TRUE(lattice.gap_condition);
    // Opposite gaps are also blind (sum on the lattice).
    EXPECT_TRUE(blindness_check(controlled_model(0.4, -0.4)).is_blind);
}

TEST(Blindness, NonCommutingEnvironmentIsOutOfClass) {
    HamiltonianCoupled m = zz_model(0.1);
    m.terms.push_back({pauli_x(), pauli_x()});
    EXPECT_THROW(blindness_check(m), OutOfClassError);
}

TEST(NoiseModels, DigestIsStableAndSensitive) {
    const NoiseModel a = CccModel{{0.5, 0.5}, {depolarizing_channel(2, 0.9), depolarizing_channel(2, 0.99)}};
    const NoiseModel b = CccModel{{0.5, 0.5}, {depolarizing_channel(2, 0.9), depolarizing_channel(2, 0.98)}};
    EXPECT_EQ(model_digest(a), model_digest(a));
    EXPECT_NE(model_digest(a), model_digest(b));
    EXPECT_STREQ(model_class(a), "ccc");
    EXPECT_EQ(system_dim(a), 2u);
}

TEST(NoiseModels, ValidationRejectsBadModels) {
    EXPECT_THROW(validate_model(CccModel{{0.4, 0.4}, {identity_channel(2), identity_channel(2)}}), ValidationError);
    EXPECT_THROW(validate_model(TimeDependentMarkovian{}), ValidationError);
    CffModel cff;
    cff.initial_settings = {1.0};
    cff.instruments = {{identity_channel(2)}};
    cff.kernel = {{{0.5}}};
    EXPECT_THROW(validate_model(cff), ValidationError);
    cff.kernel = {{{1.0}}};
    EXPECT_NO_THROW(validate_model(cff));
}

TEST(NoiseProperty, HighFidelityConstraintIdentity) {
    // sum_x p_x (q_x + (1 - q_x)/d) = 1 - eps  implies  sum_x p_x q_x = (1 - d eps)/(d - 1).
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double d = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double p = u(rng);
        const Channel c1 = random_channel(2, 2, rng);
        const Channel c2 = random_channel(2, 2, rng);
        const double q1 = decay_parameter(c1.choi(), 2), q2 = decay_parameter(c2.choi(), 2);
        // Average gate fidelity of each branch computed from the Choi matrix directly.
        auto fidelity = [](const Channel& c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) acc += c.choi()(i * 2 + i, j * 2 + j).real();
            return (acc + 2.0) / 6.0;
        };
        const double eps = 1.0 - (p * fidelity(c1) + (1 - p) * fidelity(c2));
        EXPECT_NEAR(p * q1 + (1 - p) * q2, (1.0 - d * eps) / (d - 1.0), 1e-10);
    }
}

TEST(Witness, MonotoneCurveWithDecaysBelowOneDoesNotFire) {
    std::vector<std::size_t> ms;
    std::vector<double> y;
    for (std::size_t m = 1; m <= 40; ++m) {
        ms.push_back(m);
        y.push_back(0.5 * std::pow(0.95, static_cast<double>(m)) + 0.5);
    }
    const ASFCurve c = make_curve(ms, y);
    const WitnessVerdict v = memory_witness(to_fit_result(fit_single_exponential(c)), c);
    EXPECT_FALSE(v.witness);
    EXPECT_FALSE(v.non_monotone);
}

TEST(Witness, InjectedExponentAboveOneFires) {
    std::vector<std::size_t> ms;
    std::vector<double> y;
    for (std::size_t m = 1; m <= 30; ++m) {
        ms.push_back(m);
        y.push_back(0.9 - 0.01 * std::pow(1.05, static_cast<double>(m)));
    }
    const ASFCurve c = make_curve(ms, y);
    const WitnessVerdict v = memory_witness(to_fit_result(fit_single_exponential(c)), c);
    EXPECT_TRUE(v.exponent_above_one);
    EXPECT_TRUE(v.witness);
    EXPECT_NEAR(v.max_exponent, 1.05, 1e-6);
}

TEST(Witness, StatisticalMarginSuppressesNoisyRises) {
    ASFCurve c = make_curve({1, 2, 3, 4, 5}, {0.9, 0.91, 0.85, 0.8, 0.75});
    for (auto& p : c.points) p.std_error = 0.01;
    FitResult f;
    f.exponents = {0.95};
    EXPECT_FALSE(memory_witness(f, c).non_monotone);
    for (auto& p : c.points) p.std_error = 0.001;
    const WitnessVerdict v = memory_witness(f, c);
    EXPECT_TRUE(v.non_monotone);
    ASSERT_EQ(v.increasing_at.size(), 1u);
    EXPECT_EQ(v.increasing_at[0], 1u);
}
