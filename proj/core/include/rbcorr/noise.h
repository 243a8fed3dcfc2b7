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

#ifndef RBCORR_NOISE_H
#define RBCORR_NOISE_H

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "rbcorr/channels.h"
#include "rbcorr/curve.h"
#include "rbcorr/fitting.h"
#include "rbcorr/process.h"

namespace rbcorr {

/// Step t (counted from 0) uses channels[min(t, size - 1)]; a single channel
/// is time-independent noise.
struct TimeDependentMarkovian {
    std::vector<Channel> channels;

    const Channel& at(std::size_t t) const { return channels[std::min(t, channels.size() - 1)]; }
};

/// The branch x is drawn once with probability weights[x] and then applies
/// branches[x] at every step.
struct CccModel {
    std::vector<double> weights;
    std::vector<Channel> branches;
};

/// Classical feed-forward with one-step memory. At each step the hidden
/// setting x is drawn from initial_settings (first step) or from
/// kernel[x_prev][a_prev] (later steps), and the instrument
/// instruments[x] = {N_{a|x}}_a is applied, producing the hidden outcome a.
struct CffModel {
    std::vector<double> initial_settings;
    std::vector<std::vector<Channel>> instruments;
    std::vector<std::vector<std::vector<double>>> kernel;
};

/// System-environment coupling H = sum_x H_x^E (x) H_x^S applied for time dt
/// before every gate, with the environment starting in env_state.
struct HamiltonianCoupled {
    std::vector<HamiltonianTerm> terms;
    double dt = 1.0;
    ComplexMatrix env_state;
};

using NoiseModel = std::variant<TimeDependentMarkovian, CccModel, CffModel, HamiltonianCoupled>;

const char* model_class(const NoiseModel& model);
std::size_t system_dim(const NoiseModel& model);

/// Throws ValidationError / DimensionError if the model is not well formed.
void validate_model(const NoiseModel& model);

/// FNV-1a hash (hex) of a canonical text rendering of the model.
std::string model_digest(const NoiseModel& model);

/// q = (<<I|J|I>> - 1)/(d^2 - 1) for a CPTP Choi matrix J.
double decay_parameter(const ComplexMatrix& choi, std::size_t d);

/// beta = (<<I|J|I>> - Tr(J)/d)/(d^2 - 1) for a CP instrument element.
double cff_beta(const ComplexMatrix& choi, std::size_t d);

/// Tr(J)/d: the probability of the element on a maximally mixed input.
double cff_tau(const ComplexMatrix& choi, std::size_t d);

struct BranchDecay {
    double weight = 0.0;
    double decay = 1.0;
};

std::vector<BranchDecay> branch_decays(const HamiltonianCoupled& model);

/// The same model in CCC form (one unitary branch per environment eigenvector).
CccModel to_ccc(const HamiltonianCoupled& model);

struct BlindnessReport {
    std::vector<std::vector<double>> spectra;
    std::vector<double> cosine_sums;
    std::vector<double> gaps;
    std::vector<double> weights;
    std::vector<double> decays;
    bool is_blind = false;
    /// For d = 2: every pair of gaps satisfies gap - gap' or gap + gap' in
    /// (2 pi / t) Z within the tolerance.
    bool gap_condition = false;
    double tolerance = 1e-9;
};

BlindnessReport blindness_check(const HamiltonianCoupled& model, double tolerance = 1e-9);

struct WitnessVerdict {
    bool exponent_above_one = false;
    bool non_monotone = false;
    bool witness = false;
    double max_exponent = 0.0;
    std::vector<std::size_t> increasing_at;
    std::vector<std::string> reasons;
};

/// Flags exponents above 1 + sigmas * stderr and adjacent length pairs whose
/// mean increases by more than sigmas * combined standard error.
WitnessVerdict memory_witness(const FitResult& fit, const ASFCurve& curve, double sigmas = 3.0);

}  // namespace rbcorr

#endif  // RBCORR_NOISE_H
