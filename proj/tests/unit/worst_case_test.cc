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

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.h"
#include "rbcorr/channels.h"
#include "rbcorr/errors.h"
#include "rbcorr/random.h"
#include "rbcorr/rb.h"
#include "rbcorr/worst_case.h"

using namespace rbcorr;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<GateIndex> random_gates(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return generate_sequence(m, rng).gates;
}

ComplexMatrix id_choi() { return max_entangled_projector(2); }

// Brute force over input states. For a fixed channel difference the output
// trace norm depends only on the reduced input state, so a grid over the
// x-z half disk of the Bloch ball (exploiting the Z symmetry of the channel)
// covers every distinct value. Eigenvalues come straight from Eigen.
double brute_force_diamond(const ComplexMatrix& jdelta, int n) {
    double best = 0.0;
    for (int ir = 0; ir < n; ++ir) {
        const double r = static_cast<double>(ir) / (n - 1);
        for (int it = 0; it < n; ++it) {
            const double th = kPi * it / (n - 1);
            Eigen::Matrix2d rho;
            rho << 1 + r * std::cos(th), r * std::sin(th), r * std::sin(th), 1 - r * std::cos(th);
            rho *= 0.5;
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rho);
            const Eigen::Matrix2d root =
                es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
            Eigen::Matrix4cd lift = Eigen::Matrix4cd::Zero();
            for (int a = 0; a < 2; ++a)
                for (int i = 0; i < 2; ++i)
                    for (int k = 0; k < 2; ++k) lift(a * 2 + k, i * 2 + k) = root(a, i);
            const Eigen::Matrix4cd o = lift * jdelta * lift.adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eo(o, Eigen::EigenvaluesOnly);
            best = std::max(best, eo.eigenvalues().cwiseAbs().sum());
        }
    }
    return best;
}

ComplexMatrix conjugate_choi(const ComplexMatrix& choi, const ComplexMatrix& c) {
    std::vector<ComplexMatrix> ks;
    for (const auto& k : kraus_from_choi(choi, 2, 2)) ks.push_back(c * k * c.adjoint());
    return choi_from_kraus(ks);
}

double trace_norm_of(const ComplexMatrix& a) {
    double s = 0.0;
    for (double v : oracle::jacobi_eigenvalues(0.5 * (a + a.adjoint()))) s += std::abs(v);
    return s;
}

}  // namespace

TEST(SequenceChannel, TrivialCases) {
    const auto gates = random_gates(5, 1);
    EXPECT_LT(max_abs(sequence_channel(gates, 0.3, 0.0).choi - id_choi()), 1e-12);
    const ComplexMatrix u = unitary_from_hamiltonian(pauli_z(), 0.2);
    EXPECT_LT(max_abs(sequence_channel({0}, 1.0, 0.2).choi - choi_from_kraus({u})), 1e-14);
    EXPECT_THROW(sequence_channel(gates, 1.2, 0.1), ValidationError);
    EXPECT_THROW(sequence_channel(gates, 0.5, 2.0), ValidationError);
    EXPECT_THROW(sequence_channel({}, 0.5, 0.1), ValidationError);
}

TEST(SequenceChannelProperty, KrausMixtureEqualsZzDilation) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto gates = random_gates(1 + trial % 12, 200 + trial);
        const double p = u(rng), delta = 1.5 * u(rng);
        const SequenceChannel sc = sequence_channel(gates, p, delta);
        EXPECT_TRUE(is_cptp(sc.choi, 2, 2, 1e-10));
        EXPECT_LT(max_abs(sc.choi - sequence_channel_by_dilation(gates, p, delta)), 1e-10);
    }
}

TEST(Diamond, ZeroDifference) {
    const ComplexMatrix zero = ComplexMatrix::Zero(4, 4);
    EXPECT_NEAR(diamond_primal(zero).value, 0.0, 1e-14);
    const DiamondResult s = diamond_sdp(id_choi(), id_choi());
    EXPECT_NEAR(s.value, 0.0, 1e-7);
    EXPECT_TRUE(s.converged);
}

TEST(Diamond, UnitaryRotationMatchesBruteForceGrid) {
    const double delta = kPi / 100.0;
    const ComplexMatrix jd = choi_from_kraus({unitary_from_hamiltonian(pauli_z(), delta)}) - id_choi();
    const double grid = brute_force_diamond(jd, 1000);
    const DiamondResult primal = diamond_primal(jd);
    EXPECT_NEAR(primal.value, grid, 1e-4);
    EXPECT_NEAR(primal.value, 2.0 * std::sin(delta), 1e-9);
    EXPECT_NEAR(trace_norm_of(extended_output(jd, primal.best_input)), primal.value, 1e-10);
    const DiamondResult sdp = diamond_sdp(jd + id_choi(), id_choi());
    EXPECT_NEAR(sdp.value, primal.value, 1e-5);
    EXPECT_LT(sdp.gap, 1e-7);
}

TEST(Diamond, ExtendedOutputRejectsWrongShapes) {
    EXPECT_THROW(extended_output(ComplexMatrix::Zero(4, 4), ComplexVector::Zero(3)), DimensionError);
    EXPECT_THROW(diamond_primal(ComplexMatrix::Zero(9, 9)), DimensionError);
    EXPECT_THROW(diamond_sdp(ComplexMatrix::Zero(9, 9), ComplexMatrix::Zero(9, 9)), DimensionError);
}

TEST(DiamondProperty, MethodsAgreeAndRespectBoundOrdering) {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const auto gates = random_gates(2 + trial, 300 + trial);
        const SequenceChannel sc = sequence_channel(gates, u(rng), 0.02 + 0.3 * u(rng));
        const DiamondResult p = diamond_primal(sc.choi - id_choi());
        const DiamondResult s = diamond_sdp(sc.choi, id_choi());
        EXPECT_GE(s.value, p.value - 1e-5);
        EXPECT_NEAR(s.value, p.value, 1e-5);
        EXPECT_GE(p.value, 0.0);
        EXPECT_LE(p.value, 2.0);
    }
}

TEST(DiamondProperty, UnitarilyInvariant) {
    const CliffordGroup& g = clifford_group();
    for (int trial = 0; trial < 6; ++trial) {
        const SequenceChannel sc = sequence_channel(random_gates(4, 400 + trial), 0.25, 0.1);
        const ComplexMatrix c = g.element(3 + trial);
        const double a = diamond_sdp(sc.choi, id_choi()).value;
        const double b = diamond_sdp(conjugate_choi(sc.choi, c), id_choi()).value;
        EXPECT_NEAR(a, b, 1e-8);
    }
}

TEST(DiamondProperty, BranchSwapSymmetryAndDeltaMonotonicity) {
    for (int trial = 0; trial < 5; ++trial) {
        const auto gates = random_gates(6, 500 + trial);
        // Swapping p and 1 - p flips the rotation sign, which equals complex
        // conjugation of every branch unitary. The diamond norm is invariant
        // under conjugation, so the partner of a sequence is its conjugate.
        std::vector<GateIndex> conj;
        for (GateIndex k : gates) conj.push_back(clifford_group().find(clifford_group().element(k).conjugate()));
        for (double p : {0.1, 0.3}) {
            const double a = diamond_sdp(sequence_channel(gates, p, 0.05).choi, id_choi()).value;
            const double b = diamond_sdp(sequence_channel(conj, 1.0 - p, 0.05).choi, id_choi()).value;
            EXPECT_NEAR(a, b, 1e-6);
        }
        double prev = 2.0;
        for (double delta : {0.4, 0.2, 0.1, 0.05, 0.01, 0.001}) {
            const double v = diamond_sdp(sequence_channel(gates, 0.2, delta).choi, id_choi()).value;
            EXPECT_LE(v, prev + 1e-7);
            prev = v;
        }
        EXPECT_LT(prev, 1e-2);
    }
}

TEST(DiamondProperty, BranchSwapSymmetryHoldsOnAverage) {
    // Conjugation permutes the Clifford group, so the sequence average is
    // symmetric in p even though single sequences are not.
    const CliffordGroup& g = clifford_group();
    double lo = 0.0, hi = 0.0;
    for (GateIndex a = 0; a < 24; ++a) {
        const std::vector<GateIndex> gates = {a, g.inverse(a)};
        lo += diamond_sdp(sequence_channel(gates, 0.2, 0.1).choi, id_choi()).value;
        hi += diamond_sdp(sequence_channel(gates, 0.8, 0.1).choi, id_choi()).value;
    }
    EXPECT_NEAR(lo, hi, 24 * 1e-6);
}

TEST(Perturbative, SymmetricMixingKillsFirstOrderAndEmptySequence) {
    std::mt19937_64 rng(103);
    const ComplexMatrix chi = random_density_matrix(4, rng);
    const auto gates = random_gates(5, 600);
    const PerturbativeTerms t = perturbative_expansion(gates, chi);
    EXPECT_LT(max_abs(t.combine(0.5, 0.1) + 0.01 * t.second), 1e-15);
    const PerturbativeTerms e = perturbative_expansion({0}, chi);
    const ComplexMatrix iz = tensor(identity(2), pauli_z());
    EXPECT_LT(max_abs(e.first - (chi * iz - iz * chi)), 1e-14);
    EXPECT_THROW(perturbative_expansion(gates, 2.0 * chi), ValidationError);
}

TEST(PerturbativeProperty, ResidualIsThirdOrder) {
    std::mt19937_64 rng(104);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix chi = random_density_matrix(4, rng);
        const auto gates = random_gates(3 + trial, 700 + trial);
        const PerturbativeTerms t = perturbative_expansion(gates, chi);
        std::vector<double> c;
        for (double delta : {kPi / 100, kPi / 200, kPi / 400}) {
            const double p = 0.3;
            const double err = trace_norm_of(exact_difference(gates, p, delta, chi) - t.combine(p, delta));
            c.push_back(err / std::pow(delta, 3));
        }
        // The fitted constant is stable under halving delta.
        EXPECT_NEAR(c[1] / c[0], 1.0, 0.1);
        EXPECT_NEAR(c[2] / c[1], 1.0, 0.1);
    }
}

TEST(Sweep, MinimumAtSymmetricMixingAndDeterminism) {
    SweepOptions opt;
    opt.sequences = 10;
    opt.seed = 5;
    opt.threads = 1;
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const auto rows = mixing_sweep({4}, grid, kPi / 100, opt);
    ASSERT_EQ(rows.size(), grid.size());
    std::size_t argmin = 0, argmax = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].mean < rows[argmin].mean) argmin = i;
        if (rows[i].mean > rows[argmax].mean) argmax = i;
        EXPECT_EQ(rows[i].failures, 0u);
    }
    EXPECT_EQ(argmin, 5u);
    EXPECT_TRUE(argmax == 0 || argmax == 10);
    opt.threads = 3;
    const auto again = mixing_sweep({4}, grid, kPi / 100, opt);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].mean, again[i].mean);
        EXPECT_EQ(rows[i].std_error, again[i].std_error);
    }
    EXPECT_EQ(mixing_sweep({4}, {0.5}, 0.1, opt).size(), 1u);
}

TEST(Sweep, DeltaScalingSlopes) {
    SweepOptions opt;
    opt.sequences = 8;
    opt.seed = 6;
    std::vector<SweepRow> rows;
    for (double delta : {kPi / 50, kPi / 100, kPi / 200, kPi / 400}) {
        const auto r = mixing_sweep({8}, {0.0, 0.5}, delta, opt);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const auto fits = delta_scaling_fit(rows);
    ASSERT_EQ(fits.size(), 2u);
    EXPECT_NEAR(fits[0].slope, 1.0, 0.15);
    EXPECT_NEAR(fits[1].slope, 2.0, 0.15);
}
