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

#ifndef RBCORR_WORST_CASE_H
#define RBCORR_WORST_CASE_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rbcorr/clifford.h"
#include "rbcorr/numerics.h"

namespace rbcorr {

/// The averaged channel of one gate sequence under the two-branch mixture:
/// with probability p every noise step is exp(-i delta Z), otherwise
/// exp(+i delta Z). Noise acts before each gate; `gates` includes the final
/// inverting gate.
struct SequenceChannel {
    ComplexMatrix choi;
    std::vector<GateIndex> gates;
    double p = 0.0;
    double delta = 0.0;
};

SequenceChannel sequence_channel(const std::vector<GateIndex>& gates, double p, double delta);

/// Choi matrix of the same channel obtained by propagating the ZZ dilation
/// exp(-i delta Z (x) Z) with environment sqrt(p)|0> + sqrt(1-p)|1>.
ComplexMatrix sequence_channel_by_dilation(const std::vector<GateIndex>& gates, double p, double delta);

enum class DiamondMethod { kPrimal, kSdp };

const char* to_string(DiamondMethod m);

struct DiamondResult {
    double value = 0.0;
    DiamondMethod method = DiamondMethod::kPrimal;
    /// Best input (ancilla first) for the primal method.
    ComplexVector best_input;
    std::size_t restarts = 0;
    /// Primal: change in the best value over the final polish. SDP: the
    /// barrier duality-gap bound.
    double gap = 0.0;
    bool converged = true;
};

/// (I (x) Delta)(|psi><psi|) for a Choi matrix with the input factor first.
ComplexMatrix extended_output(const ComplexMatrix& choi_delta, const ComplexVector& psi);

struct PrimalOptions {
    std::size_t restarts = 32;
    std::uint64_t seed = 0x7a3c1d;
    double tolerance = 1e-9;
};

/// max_psi ||(I (x) Delta)(|psi><psi|)||_1 over unit vectors on ancilla (x)
/// system. Each restart runs a monotone sign/eigenvector ascent from a Haar
/// start and then a coordinate pattern search over the seven angle and phase
/// parameters. The value is a lower bound on the diamond norm.
DiamondResult diamond_primal(const ComplexMatrix& choi_delta, const PrimalOptions& options = {});

/// max 1/2 Tr[X (J_R - J_I)] s.t. -2 (rho (x) I) <= X <= 2 (rho (x) I),
/// rho >= 0, Tr rho = 1, solved by a log-barrier interior-point method until
/// the barrier gap bound is below 1e-7. rho sits on the Choi input factor.
DiamondResult diamond_sdp(const ComplexMatrix& choi_r, const ComplexMatrix& choi_id);

struct PerturbativeTerms {
    ComplexMatrix first;   // Lambda_1(chi)
    ComplexMatrix second;  // Lambda_2(chi)

    /// i (2p - 1) delta Lambda_1 - delta^2 Lambda_2.
    ComplexMatrix combine(double p, double delta) const;
};

/// Expansion of (I (x) R)(chi) - chi to second order in delta, with chi on
/// ancilla (x) system.
PerturbativeTerms perturbative_expansion(const std::vector<GateIndex>& gates, const ComplexMatrix& chi);

/// Exact (I (x) R)(chi) - chi for comparison with the expansion.
ComplexMatrix exact_difference(const std::vector<GateIndex>& gates, double p, double delta, const ComplexMatrix& chi);

struct SweepRow {
    std::size_t length = 0;
    double p = 0.0;
    double delta = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t sequences = 0;
    std::size_t failures = 0;
    /// Largest |sdp - primal| over the sequences (when both were run).
    double max_method_gap = 0.0;
    DiamondMethod method = DiamondMethod::kSdp;
};

struct SweepOptions {
    std::size_t sequences = 50;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    /// Also run the primal method on every instance and record the gap.
    bool cross_check = false;
};

/// Mean diamond distance over random sequences for every (length, p). The
/// same sequences are reused across the p grid.
std::vector<SweepRow> mixing_sweep(const std::vector<std::size_t>& lengths, const std::vector<double>& p_grid,
                                   double delta, const SweepOptions& options);

struct ScalingFit {
    double p = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares slope of log(mean) against log(delta) for each p.
std::vector<ScalingFit> delta_scaling_fit(const std::vector<SweepRow>& rows);

}  // namespace rbcorr

#endif  // RBCORR_WORST_CASE_H
