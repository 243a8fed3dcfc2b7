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

#ifndef RBCORR_PROCESS_H
#define RBCORR_PROCESS_H

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbcorr/channels.h"
#include "rbcorr/numerics.h"

namespace rbcorr {

// Wires of a multi-time process. At time slot t the experimenter receives the
// system on S_I^t and returns it on S_O^t; the process maps S_O^{t-1} (plus
// any environment) to S_I^t. Canonical order: by time, then S_I < S_O < E.

enum class WireKind : int { kSystemIn = 0, kSystemOut = 1, kEnvironment = 2 };

struct WireId {
    WireKind kind = WireKind::kSystemIn;
    int time = 0;

    friend bool operator==(const WireId&, const WireId&) = default;
    friend std::strong_ordering operator<=>(const WireId& a, const WireId& b) {
        if (auto c = a.time <=> b.time; c != 0) return c;
        return static_cast<int>(a.kind) <=> static_cast<int>(b.kind);
    }
};

inline WireId system_in(int t) { return {WireKind::kSystemIn, t}; }
inline WireId system_out(int t) { return {WireKind::kSystemOut, t}; }
inline WireId environment(int t) { return {WireKind::kEnvironment, t}; }

std::string to_string(const WireId& id);

struct LabeledSpace {
    WireId id;
    std::size_t dim = 1;
};

/// An operator on a tensor product of labelled spaces; the first listed space
/// is the slowest Kronecker index.
class LabeledOperator {
  public:
    LabeledOperator() = default;
    LabeledOperator(ComplexMatrix matrix, std::vector<LabeledSpace> spaces);

    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<LabeledSpace>& spaces() const { return spaces_; }
    std::vector<std::size_t> dims() const;
    std::optional<std::size_t> position(const WireId& id) const;
    bool has(const WireId& id) const { return position(id).has_value(); }

    /// Same operator with its factors listed in `order` (a permutation of the
    /// current labels).
    LabeledOperator reordered(const std::vector<WireId>& order) const;
    /// Factors sorted into canonical wire order.
    LabeledOperator canonical() const;

  private:
    ComplexMatrix matrix_;
    std::vector<LabeledSpace> spaces_;
};

/// A (x) B with the shared spaces partially transposed in A and traced out.
/// The result lists A's remaining spaces, then B's.
LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

/// Choi operator sum_ij |i><j| (x) U|i><j|U^dag with input spaces listed
/// first. Composite indices follow the order of `in` and `out`.
LabeledOperator choi_of_unitary(const ComplexMatrix& u, const std::vector<LabeledSpace>& in,
                                const std::vector<LabeledSpace>& out);

LabeledOperator choi_of_channel(const Channel& channel, WireId in, WireId out);

/// Choi of X -> Tr(E X) I/d on (S_I^t, S_O^t): the terminal measurement slot.
LabeledOperator measurement_element(const ComplexMatrix& effect, int t);

struct Instrument {
    std::vector<LabeledOperator> elements;
    int setting = 0;

    /// Throws ValidationError unless every element is CP and the sum is TP.
    void validate() const;
};

/// W on S_I^0, S_O^0, ..., S_I^n, S_O^n for a process with n channel steps.
struct ProcessMatrix {
    LabeledOperator op;
    std::size_t steps = 0;
};

/// W = rho (x) |N_1>> (x) ... (x) |N_n>> (x) I on the final output.
ProcessMatrix build_markovian(const ComplexMatrix& rho, const std::vector<Channel>& channels);

/// W = sum_x p_x W_x with each W_x Markovian.
ProcessMatrix build_ccc(const std::vector<double>& weights, const std::vector<ComplexMatrix>& states,
                        const std::vector<std::vector<Channel>>& branches);
ProcessMatrix build_ccc(const std::vector<double>& weights, const ComplexMatrix& rho,
                        const std::vector<std::vector<Channel>>& branches);

/// Classical feed-forward process. `root_states[x0][a0]` are sub-normalised
/// states with sum_a0 Tr = 1 for each x0; `instruments[x][a]` are CP maps whose
/// sum over a is CPTP. `kernel(outcomes, settings)` returns the distribution
/// of the next setting given the full history so far.
struct CffProcessSpec {
    std::vector<double> initial_settings;
    std::vector<std::vector<ComplexMatrix>> root_states;
    std::vector<std::vector<Channel>> instruments;
    std::function<std::vector<double>(const std::vector<std::size_t>& outcomes,
                                      const std::vector<std::size_t>& settings)>
        kernel;
    std::size_t steps = 0;
};

ProcessMatrix build_cff(const CffProcessSpec& spec);

/// W = rho_SE * |U_1>> * ... * |U_n>> * I^{E_n}. Joint operators are ordered
/// environment (x) system.
ProcessMatrix build_from_dilation(const ComplexMatrix& rho_se, std::size_t env_dim,
                                  const std::vector<ComplexMatrix>& unitaries);

/// Tr(W^T M) with M the tensor product of the instrument elements, clamped to
/// [0, 1]. Throws DimensionError if the instrument wires do not cover W.
double born_probability(const ProcessMatrix& w, const std::vector<LabeledOperator>& elements);

struct HamiltonianTerm {
    ComplexMatrix env;
    ComplexMatrix sys;
};

/// sum_x H_x^E (x) H_x^S.
ComplexMatrix joint_hamiltonian(const std::vector<HamiltonianTerm>& terms);

struct CccDecomposition {
    std::vector<double> weights;
    std::vector<ComplexMatrix> unitaries;
    std::vector<ComplexMatrix> system_states;
    /// eigenvalues[lambda][x]: eigenvalue of H_x^E on the lambda-th basis vector.
    std::vector<std::vector<double>> eigenvalues;
    ComplexMatrix basis;
};

/// Splits a Hamiltonian with pairwise commuting environment terms into
/// classical branches. Throws OutOfClassError if the terms do not commute.
CccDecomposition hamiltonian_ccc_decomposition(const std::vector<HamiltonianTerm>& terms, double dt,
                                               const ComplexMatrix& rho_se);

}  // namespace rbcorr

#endif  // RBCORR_PROCESS_H
