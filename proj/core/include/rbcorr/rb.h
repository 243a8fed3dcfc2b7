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

#ifndef RBCORR_RB_H
#define RBCORR_RB_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rbcorr/channels.h"
#include "rbcorr/clifford.h"
#include "rbcorr/curve.h"
#include "rbcorr/noise.h"
#include "rbcorr/process.h"

namespace rbcorr {

/// State preparation and measurement. The optional channels model SPAM noise:
/// the prepared state is P(rho) and the measured effect is applied to M(.).
struct Spam {
    ComplexMatrix rho;
    ComplexMatrix effect;
    std::optional<Channel> preparation;
    std::optional<Channel> measurement;
};

/// rho = E = |0><0| with ideal channels.
Spam ideal_spam(std::size_t d = 2);

struct RBConfig {
    std::vector<std::size_t> lengths;
    std::size_t sequences = 1;
    std::size_t shots = 1;
    NoiseModel noise;
    Spam spam;
    bool randomize_spam = false;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

void validate_config(const RBConfig& config);

/// m random gates followed by the motion-reversal gate; with randomised SPAM
/// also a frame gate V applied before the sequence and undone after it.
struct Sequence {
    std::vector<GateIndex> gates;
    std::optional<GateIndex> frame;
};

Sequence generate_sequence(std::size_t m, std::mt19937_64& rng, bool randomize_spam = false);

/// Exact survival probability Tr(E M(S(P rho))) of one sequence. Noise acts
/// before every gate.
double survival_probability(const Sequence& seq, const NoiseModel& model, const Spam& spam);

/// Survival estimate from `shots` binomial samples (shots = 0 gives the exact value).
double simulate_sequence(const Sequence& seq, const RBConfig& config, std::mt19937_64& rng);

/// The same survival probability computed through the process matrix and the
/// generalised Born rule. Cost grows as d^(4(m+1)); intended for m <= 4.
double born_rule_survival(const Sequence& seq, const NoiseModel& model, const Spam& spam);

/// Mean and standard error over k sequences per length; sequence j at length m
/// draws from a stream derived from (seed, m, j), so results do not depend on
/// the thread count.
ASFCurve run_rb(const RBConfig& config);

/// Exact average over all 24^m sequences of length m, by dynamic programming
/// over the composite gate.
double exact_asf(const NoiseModel& model, const Spam& spam, std::size_t m, bool randomize_spam);

/// Closed-form ASF. Markovian and CCC without randomisation carry q^m with the
/// first noise map in the SPAM constant; with randomisation every noise map is
/// twirled and the decay enters as q^(m+1).
double analytic_asf(const NoiseModel& model, const Spam& spam, std::size_t m, bool randomize_spam);

ASFCurve analytic_curve(const NoiseModel& model, const Spam& spam, const std::vector<std::size_t>& lengths,
                        bool randomize_spam);

/// r(m) = (d-1)/d (1 - sum_x p_x q_x^(m+1)).
double sequence_error_rate(const CccModel& model, std::size_t m);

struct HaarSpamCheck {
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    double rhs = 0.0;
};

/// Monte-Carlo estimate of the Haar average of <psi|N(psi - I/d)|psi> and the
/// closed form q (1 - 1/d).
HaarSpamCheck haar_spam_average_check(const Channel& channel, std::size_t samples, std::mt19937_64& rng);

}  // namespace rbcorr

#endif  // RBCORR_RB_H
