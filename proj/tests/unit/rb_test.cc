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
#include "rbcorr/rb.h"

using namespace rbcorr;

namespace {

Spam noisy_spam(std::mt19937_64& rng) {
    Spam s;
    s.rho = random_density_matrix(2, rng);
    s.effect = 0.9 * basis_op(2, 0, 0) + 0.05 * identity(2);
    return s;
}

TimeDependentMarkovian random_markovian(std::size_t steps, std::mt19937_64& rng) {
    TimeDependentMarkovian m;
    for (std::size_t t = 0; t < steps; ++t) {
        // Mostly-coherent noise close to identity so that q_t stays near 1.
        const ComplexMatrix v = haar_unitary(2, rng);
        const ComplexMatrix u = unitary_from_hamiltonian(v * pauli_z() * v.adjoint(), 0.05);
        m.channels.push_back(compose(depolarizing_channel(2, 0.97), unitary_channel(u)));
    }
    return m;
}

CccModel random_ccc(std::mt19937_64& rng, std::size_t branches = 2) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CccModel m;
    double total = 0.0;
    for (std::size_t i = 0; i < branches; ++i) {
        m.weights.push_back(0.1 + u(rng));
        total += m.weights.back();
        // A Pauli channel has q = 1 - 4/3 (px + py + pz); keep q in (0.6, 0.98).
        const double s = 0.015 + 0.285 * u(rng);
        const double a = u(rng), b = u(rng), c = u(rng);
        m.branches.push_back(pauli_channel(s * a / (a + b + c), s * b / (a + b + c), s * c / (a + b + c)));
    }
    for (auto& w : m.weights) w /= total;
    return m;
}

// Two settings, two outcomes; instrument elements are weighted Pauli channels,
// so every beta is positive.
CffModel random_cff(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CffModel m;
    const double p0 = 0.2 + 0.6 * u(rng);
    m.initial_settings = {p0, 1.0 - p0};
    for (int x = 0; x < 2; ++x) {
        const double w = 0.2 + 0.6 * u(rng);
        std::vector<Channel> inst;
        for (double weight : {w, 1.0 - w}) {
            const double s = 0.015 + 0.285 * u(rng);
            const Channel pc = pauli_channel(s * 0.5, s * 0.3, s * 0.2);
            inst.push_back(Channel::from_choi(weight * pc.choi(), 2));
        }
        m.instruments.push_back(inst);
    }
    m.kernel.assign(2, std::vector<std::vector<double>>(2));
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            const double p = u(rng);
            m.kernel[x][a] = {p, 1.0 - p};
        }
    return m;
}

HamiltonianCoupled controlled_model(double d1, double d2) {
    HamiltonianCoupled m;
    m.terms = {{basis_op(2, 0, 0), 0.5 * d1 * pauli_z()}, {basis_op(2, 1, 1), 0.5 * d2 * pauli_z()}};
    m.dt = 1.0;
    ComplexMatrix env(2, 2);
    env << 0.6, 0.3, 0.3, 0.4;
    m.env_state = env;
    return m;
}

double ideal_decay(double q) { return q; }

}  // namespace

TEST(Sequences, InverseGateRestoresIdentity) {
    const CliffordGroup& g = clifford_group();
    std::mt19937_64 rng(81);
    const Sequence one = generate_sequence(1, rng);
    ASSERT_EQ(one.gates.size(), 2u);
    EXPECT_EQ(one.gates[1], g.inverse(one.gates[0]));
    for (int trial = 0; trial < 1000; ++trial) {
        const Sequence s = generate_sequence(1 + trial % 30, rng, trial % 2 == 0);
        EXPECT_EQ(s.gates.size(), 2u + trial % 30);
        GateIndex acc = g.identity_index();
        for (GateIndex k : s.gates) acc = g.compose(k, acc);
        EXPECT_EQ(acc, g.identity_index());
        EXPECT_EQ(s.frame.has_value(), trial % 2 == 0);
    }
    EXPECT_THROW(generate_sequence(0, rng), ValidationError);
}

TEST(Simulation, NoiselessSequencesSurviveWithCertainty) {
    std::mt19937_64 rng(82);
    RBConfig cfg;
    cfg.lengths = {1, 5, 17};
    cfg.sequences = 4;
    cfg.shots = 100;
    cfg.noise = TimeDependentMarkovian{{identity_channel(2)}};
    cfg.spam = ideal_spam();
    for (bool randomize : {false, true}) {
        const Sequence s = generate_sequence(12, rng, randomize);
        cfg.randomize_spam = randomize;
        EXPECT_NEAR(survival_probability(s, cfg.noise, cfg.spam), 1.0, 1e-12);
        EXPECT_EQ(simulate_sequence(s, cfg, rng), 1.0);
    }
    const ASFCurve c = run_rb(cfg);
    for (const auto& p : c.points) {
        EXPECT_EQ(p.mean, 1.0);
        EXPECT_EQ(p.std_error, 0.0);
    }
}

TEST(Simulation, ZeroNoiseCurveIsFlatAtSpamOverlap) {
    std::mt19937_64 rng(83);
    RBConfig cfg;
    cfg.lengths = {2, 4, 8};
    cfg.sequences = 5;
    cfg.shots = 1;
    cfg.noise = CccModel{{1.0}, {identity_channel(2)}};
    cfg.spam = noisy_spam(rng);
    const double overlap = (cfg.spam.effect * cfg.spam.rho).trace().real();
    for (std::size_t m : cfg.lengths) {
        EXPECT_NEAR(exact_asf(cfg.noise, cfg.spam, m, false), overlap, 1e-12);
        EXPECT_NEAR(analytic_asf(cfg.noise, cfg.spam, m, false), overlap, 1e-12);
    }
}

TEST(AnalyticProperty, TimeDependentMarkovianMatchesExactAverage) {
    std::mt19937_64 rng(84);
    for (int trial = 0; trial < 5; ++trial) {
        const NoiseModel model = random_markovian(21, rng);
        Spam spam = noisy_spam(rng);
        for (std::size_t m : {1u, 2u, 7u, 20u}) {
            EXPECT_NEAR(analytic_asf(model, spam, m, false), exact_asf(model, spam, m, false), 1e-9) << m;
            EXPECT_NEAR(analytic_asf(model, ideal_spam(), m, true), exact_asf(model, ideal_spam(), m, true), 1e-9);
        }
    }
}

TEST(AnalyticProperty, CccMatchesExactAverage) {
    std::mt19937_64 rng(85);
    for (int trial = 0; trial < 5; ++trial) {
        const CccModel ccc = random_ccc(rng, 2 + trial % 2);
        const Spam spam = noisy_spam(rng);
        for (std::size_t m : {1u, 3u, 10u}) {
            EXPECT_NEAR(analytic_asf(ccc, spam, m, false), exact_asf(ccc, spam, m, false), 1e-10);
            EXPECT_NEAR(analytic_asf(ccc, ideal_spam(), m, true), exact_asf(ccc, ideal_spam(), m, true), 1e-10);
        }
    }
}

TEST(AnalyticProperty, CffMatchesExactAverage) {
    std::mt19937_64 rng(86);
    for (int trial = 0; trial < 5; ++trial) {
        const CffModel cff = random_cff(rng);
        const Spam spam = noisy_spam(rng);
        for (std::size_t m : {1u, 2u, 6u}) {
            EXPECT_NEAR(analytic_asf(cff, spam, m, false), exact_asf(cff, spam, m, false), 1e-10);
            EXPECT_NEAR(analytic_asf(cff, ideal_spam(), m, true), exact_asf(cff, ideal_spam(), m, true), 1e-10);
        }
    }
}

TEST(AnalyticProperty, HamiltonianMatchesExactAverage) {
    const HamiltonianCoupled h = controlled_model(0.3, 0.8);
    std::mt19937_64 rng(87);
    const Spam spam = noisy_spam(rng);
    for (std::size_t m : {1u, 4u, 9u}) {
        EXPECT_NEAR(analytic_asf(h, spam, m, false), exact_asf(h, spam, m, false), 1e-10);
        EXPECT_NEAR(analytic_asf(h, ideal_spam(), m, true), exact_asf(h, ideal_spam(), m, true), 1e-10);
    }
}

TEST(Analytic, UnitaryBranchCccHasEqualHalfAmplitudes) {
    // rho = E = |0><0| and z-rotation branches: F(m) = A (q1^m + q2^m)/2 + B.
    const HamiltonianCoupled h = [] {
        HamiltonianCoupled m = controlled_model(0.5, 1.4);
        m.env_state = identity(2) / 2.0;
        return m;
    }();
    const double q1 = (4 * std::pow(std::cos(0.25), 2) - 1) / 3, q2 = (4 * std::pow(std::cos(0.7), 2) - 1) / 3;
    for (std::size_t m : {1u, 5u, 30u}) {
        const double expect = 0.5 * (std::pow(q1, m) + std::pow(q2, m)) / 2.0 + 0.5;
        EXPECT_NEAR(analytic_asf(h, ideal_spam(), m, false), expect, 1e-12);
        EXPECT_NEAR(exact_asf(h, ideal_spam(), m, false), expect, 1e-12);
    }
}

TEST(Analytic, OscillatingToyModel) {
    const CccModel toy{{0.85, 0.15}, {identity_channel(2), bit_flip_channel()}};
    std::vector<std::size_t> ms;
    for (std::size_t m = 1; m <= 12; ++m) ms.push_back(m);
    const ASFCurve c = analytic_curve(toy, ideal_spam(), ms, true);
    for (const auto& p : c.points) {
        const double expect = 0.5 * (0.85 + 0.15 * std::pow(-1.0 / 3.0, static_cast<double>(p.m) + 1)) + 0.5;
        EXPECT_NEAR(p.mean, expect, 1e-15);
        EXPECT_NEAR(exact_asf(toy, ideal_spam(), p.m, true), expect, 1e-12);
    }
    FitResult fit;
    fit.exponents = {1.0 / 3.0};
    const WitnessVerdict v = memory_witness(fit, c);
    EXPECT_TRUE(v.non_monotone);
    EXPECT_TRUE(v.witness);
}

TEST(Simulation, BornRuleAgreesWithPropagationForEveryModelClass) {
    std::mt19937_64 rng(88);
    const Spam spam = noisy_spam(rng);
    const std::vector<NoiseModel> models = {random_markovian(4, rng), random_ccc(rng), random_cff(rng),
                                            controlled_model(0.4, 1.1)};
    for (const auto& model : models) {
        for (bool randomize : {false, true}) {
            for (std::size_t m : {1u, 2u}) {
                const Sequence s = generate_sequence(m, rng, randomize);
                EXPECT_NEAR(born_rule_survival(s, model, spam), survival_probability(s, model, spam), 1e-10)
                    << model_class(model) << " m=" << m << " randomized=" << randomize;
            }
        }
    }
}

TEST(Simulation, HamiltonianAndItsCccDecompositionAgreePerSequence) {
    std::mt19937_64 rng(89);
    HamiltonianCoupled h = controlled_model(0.6, 1.7);
    h.env_state = identity(2) / 2.0;  // diagonal in the eigenbasis, so the decomposition is exact
    const CccModel ccc = to_ccc(h);
    const Spam spam = noisy_spam(rng);
    for (int trial = 0; trial < 20; ++trial) {
        const Sequence s = generate_sequence(1 + trial, rng);
        EXPECT_NEAR(survival_probability(s, h, spam), survival_probability(s, ccc, spam), 1e-10);
    }
}

TEST(Simulation, MonteCarloCurveAgreesWithAnalyticWithinFourSigma) {
    RBConfig cfg;
    cfg.lengths = {1, 5, 10, 20, 40};
    cfg.sequences = 200;
    cfg.shots = 200;
    cfg.noise = CccModel{{0.5, 0.5}, {depolarizing_channel(2, 0.9), depolarizing_channel(2, 0.99)}};
    cfg.spam = ideal_spam();
    cfg.seed = 1234;
    const ASFCurve c = run_rb(cfg);
    ASSERT_EQ(c.points.size(), cfg.lengths.size());
    for (const auto& p : c.points) {
        const double expect = analytic_asf(cfg.noise, cfg.spam, p.m, false);
        EXPECT_LE(std::abs(p.mean - expect), 4.0 * p.std_error + 1e-12) << p.m;
        EXPECT_EQ(p.k, 200u);
        EXPECT_EQ(p.shots, 200u);
    }
    EXPECT_EQ(c.seed, 1234u);
    EXPECT_EQ(c.model_digest, model_digest(cfg.noise));
}

TEST(Simulation, RunIsDeterministicAcrossWorkerCounts) {
    std::mt19937_64 rng(90);
    RBConfig cfg;
    cfg.lengths = {2, 6, 11};
    cfg.sequences = 17;
    cfg.shots = 50;
    cfg.noise = random_cff(rng);
    cfg.spam = noisy_spam(rng);
    cfg.randomize_spam = true;
    cfg.seed = 77;
    cfg.threads = 1;
    const ASFCurve a = run_rb(cfg);
    cfg.threads = 4;
    const ASFCurve b = run_rb(cfg);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].mean, b.points[i].mean);
        EXPECT_EQ(a.points[i].std_error, b.points[i].std_error);
    }
    cfg.seed = 78;
    EXPECT_NE(run_rb(cfg).points[0].mean, a.points[0].mean);
}

TEST(Simulation, ConfigValidation) {
    RBConfig cfg;
    cfg.noise = TimeDependentMarkovian{{identity_channel(2)}};
    cfg.spam = ideal_spam();
    EXPECT_THROW(validate_config(cfg), ValidationError);
    cfg.lengths = {0};
    EXPECT_THROW(validate_config(cfg), ValidationError);
    cfg.lengths = {1};
    cfg.shots = 0;
    EXPECT_THROW(validate_config(cfg), ValidationError);
    cfg.shots = 1;
    cfg.spam.effect = 2.0 * identity(2);
    EXPECT_THROW(validate_config(cfg), ValidationError);
    cfg.spam = ideal_spam();
    cfg.noise = TimeDependentMarkovian{{identity_channel(3)}};
    EXPECT_THROW(validate_config(cfg), ValidationError);
}

TEST(ErrorRate, ReducesToMarkovianAndIsNondecreasing) {
    const double q = 0.97;
    const CccModel single{{1.0}, {depolarizing_channel(2, q)}};
    for (std::size_t m : {0u, 1u, 10u}) EXPECT_NEAR(sequence_error_rate(single, m), 0.5 * (1 - std::pow(q, m + 1.0)), 1e-14);
    EXPECT_NEAR(sequence_error_rate(single, 0), (1 - q) / 2, 1e-14);
    const CccModel ideal{{0.3, 0.7}, {identity_channel(2), identity_channel(2)}};
    EXPECT_EQ(sequence_error_rate(ideal, 25), 0.0);
    std::mt19937_64 rng(91);
    const CccModel ccc = random_ccc(rng, 3);
    for (std::size_t m = 0; m < 50; ++m) EXPECT_LE(sequence_error_rate(ccc, m), sequence_error_rate(ccc, m + 1));
}

TEST(ErrorRate, TwoBranchAndSingleFitCurvesCross) {
    const CccModel two{{0.451, 0.549}, {depolarizing_channel(2, 0.918), depolarizing_channel(2, 0.990)}};
    const CccModel one{{1.0}, {depolarizing_channel(2, 0.981)}};
    const double early = sequence_error_rate(two, 1) - sequence_error_rate(one, 1);
    const double late = sequence_error_rate(two, 150) - sequence_error_rate(one, 150);
    EXPECT_LT(early * late, 0.0);
}

TEST(HaarSpam, ClosedFormMatchesMonteCarlo) {
    std::mt19937_64 rng(92);
    const HaarSpamCheck id = haar_spam_average_check(identity_channel(2), 2000, rng);
    EXPECT_NEAR(id.rhs, 0.5, 1e-14);
    EXPECT_NEAR(id.lhs, 0.5, 1e-12);
    const HaarSpamCheck dep = haar_spam_average_check(depolarizing_channel(2, 0.0), 2000, rng);
    EXPECT_NEAR(dep.rhs, 0.0, 1e-14);
    EXPECT_NEAR(dep.lhs, 0.0, 1e-12);
    const HaarSpamCheck rc = haar_spam_average_check(random_channel(2, 2, rng), 20000, rng);
    EXPECT_LE(std::abs(rc.lhs - rc.rhs), 4.0 * rc.lhs_stderr);
}

TEST(MonotonicityProperty, ClassicalMemoryCurvesStrictlyDecrease) {
    std::mt19937_64 rng(93);
    std::vector<std::size_t> ms;
    for (std::size_t m = 1; m <= 30; ++m) ms.push_back(m);
    for (int trial = 0; trial < 50; ++trial) {
        const NoiseModel model = trial % 2 == 0 ? NoiseModel(random_ccc(rng, 2 + trial % 3)) : NoiseModel(random_cff(rng));
        const ASFCurve c = analytic_curve(model, ideal_spam(), ms, true);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            EXPECT_LT(c.points[i].mean, c.points[i - 1].mean) << model_class(model) << " trial " << trial;
        }
        FitResult fit = fit_esprit(c, {});
        EXPECT_FALSE(memory_witness(fit, c).witness) << trial;
    }
}

TEST(MonotonicityProperty, InjectedDecayAboveOneTriggersWitness) {
    std::mt19937_64 rng(94);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::size_t> ms;
    for (std::size_t m = 1; m <= 40; ++m) ms.push_back(m);
    for (int trial = 0; trial < 50; ++trial) {
        const CccModel ccc = random_ccc(rng);
        const double injected = 1.005 + 0.05 * u(rng);
        std::vector<double> y;
        for (std::size_t m : ms) {
            double v = 0.5;
            const double p0 = ccc.weights[0];
            v += 0.5 * p0 * std::pow(ideal_decay(decay_parameter(ccc.branches[0].choi(), 2)), m + 1.0);
            v += 0.5 * (1 - p0) * std::pow(injected, m + 1.0) * 0.01;
            y.push_back(v);
        }
        const ASFCurve c = make_curve(ms, y);
        const WitnessVerdict v = memory_witness(fit_esprit(c, {}), c);
        EXPECT_TRUE(v.witness) << trial;
        EXPECT_TRUE(v.exponent_above_one) << trial;
    }
}
