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

#ifndef RBCORR_CHANNELS_H
#define RBCORR_CHANNELS_H

#include <cstddef>
#include <random>
#include <vector>

#include "rbcorr/numerics.h"

namespace rbcorr {

// Choi convention used everywhere: J = sum_ij |i><j| (x) N(|i><j|), input
// factor first. The superoperator acts on row-major vectorisations,
// vec(X)[a*d + b] = X(a, b).

ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus);
std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, std::size_t d_in,
                                           std::size_t d_out, double cutoff = 1e-14);
ComplexMatrix choi_to_superop(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out);
ComplexMatrix superop_to_choi(const ComplexMatrix& superop, std::size_t d_in, std::size_t d_out);

/// N(rho) = Tr_in[(rho^T (x) I) J].
ComplexMatrix apply_choi(const ComplexMatrix& choi, const ComplexMatrix& rho, std::size_t d_in,
                         std::size_t d_out);

bool is_completely_positive(const ComplexMatrix& choi, double tol = kSolverTol);
bool is_trace_preserving(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out,
                         double tol = kSolverTol);
bool is_cptp(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out,
             double tol = kSolverTol);

/// Throws ValidationError naming `what` unless the Choi matrix is CPTP.
void require_cptp(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out, const char* what);

/// A completely positive map held both as a Choi matrix and as Kraus operators.
/// Instrument elements (trace non-increasing) are valid Channel values too.
class Channel {
  public:
    Channel() = default;

    static Channel from_choi(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out);
    static Channel from_choi(const ComplexMatrix& choi, std::size_t d) { return from_choi(choi, d, d); }
    static Channel from_kraus(std::vector<ComplexMatrix> kraus);
    static Channel from_unitary(const ComplexMatrix& u);

    std::size_t input_dim() const { return d_in_; }
    std::size_t output_dim() const { return d_out_; }
    const ComplexMatrix& choi() const { return choi_; }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

    ComplexMatrix apply(const ComplexMatrix& rho) const;
    bool trace_preserving(double tol = kSolverTol) const {
        return is_trace_preserving(choi_, d_in_, d_out_, tol);
    }

  private:
    ComplexMatrix choi_;
    std::vector<ComplexMatrix> kraus_;
    std::size_t d_in_ = 0;
    std::size_t d_out_ = 0;
};

/// second o first.
Channel compose(const Channel& second, const Channel& first);

Channel identity_channel(std::size_t d);
Channel unitary_channel(const ComplexMatrix& u);

/// rho -> q rho + (1 - q) Tr(rho) I/d. Valid (CP) for -1/(d^2-1) <= q <= 1.
Channel depolarizing_channel(std::size_t d, double q);

/// Qubit Pauli channel with error probabilities (px, py, pz).
Channel pauli_channel(double px, double py, double pz);

/// rho -> X rho X.
Channel bit_flip_channel();

/// Random CPTP map from a Haar isometry with `kraus_rank` Kraus operators.
Channel random_channel(std::size_t d, std::size_t kraus_rank, std::mt19937_64& rng);

}  // namespace rbcorr

#endif  // RBCORR_CHANNELS_H
