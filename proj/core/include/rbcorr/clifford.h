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

#ifndef RBCORR_CLIFFORD_H
#define RBCORR_CLIFFORD_H

#include <cstddef>
#include <random>
#include <vector>

#include "rbcorr/numerics.h"

namespace rbcorr {

using GateIndex = std::size_t;

/// The single-qubit Clifford group modulo global phase, generated from H and S.
/// Element 0 is the identity. Immutable once built.
class CliffordGroup {
  public:
    static constexpr std::size_t kOrder = 24;

    CliffordGroup();

    std::size_t order() const { return elements_.size(); }
    std::size_t dimension() const { return 2; }

    const ComplexMatrix& element(GateIndex g) const { return elements_.at(g); }
    const std::vector<ComplexMatrix>& elements() const { return elements_; }

    /// Index of U_a U_b (b is applied first).
    GateIndex compose(GateIndex a, GateIndex b) const { return table_[a * order() + b]; }
    GateIndex inverse(GateIndex g) const { return inverse_[g]; }
    GateIndex identity_index() const { return 0; }

    /// Index of a unitary equal to some element up to global phase; throws
    /// ValidationError if none matches within 1e-9.
    GateIndex find(const ComplexMatrix& u) const;

  private:
    std::vector<ComplexMatrix> elements_;
    std::vector<GateIndex> table_;
    std::vector<GateIndex> inverse_;
};

/// Process-wide instance, built on first use.
const CliffordGroup& clifford_group();

/// Builds a fresh group (for tests that want to check construction).
CliffordGroup generate_group();

/// Uniform draw of a group element.
GateIndex sample_uniform(std::mt19937_64& rng);

/// Multiplies by the phase that makes the first entry with |z| > 1e-9 real and
/// positive.
ComplexMatrix canonicalize_phase(const ComplexMatrix& u);

/// Second-moment coefficients of a two-copy operator under the Clifford twirl.
struct TwirlCoefficients {
    double c_identity = 0.0;
    double c_swap = 0.0;
};

/// Coefficients of the twirl of O = (Choi partially transposed on its output
/// factor): c_I = (Tr O - Tr(F O)/d)/(d^2-1), c_F = (Tr(F O) - Tr O/d)/(d^2-1).
TwirlCoefficients twirl_coefficients(const ComplexMatrix& choi, std::size_t d);

/// The same coefficients evaluated for a bare two-copy operator O (no transpose).
TwirlCoefficients twirl_coefficients_of_operator(const ComplexMatrix& op, std::size_t d);

/// (1/|G|) sum_g (U_g^dag (x) U_g^dag) O (U_g (x) U_g), summed explicitly.
ComplexMatrix group_twirl(const ComplexMatrix& op);

}  // namespace rbcorr

#endif  // RBCORR_CLIFFORD_H
