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

#ifndef RBCORR_NUMERICS_H
#define RBCORR_NUMERICS_H

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rbcorr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Tolerances shared across modules.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kSolverTol = 1e-8;
inline constexpr double kHermitianTol = 1e-12;

// ---------------------------------------------------------------------------
// Construction helpers. All operators are written in the fixed computational
// basis {|0>, |1>, ...}; nothing in the library changes basis implicitly.
// ---------------------------------------------------------------------------

ComplexMatrix identity(std::size_t d);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
ComplexMatrix phase_s();

/// |i><j| in dimension d.
ComplexMatrix basis_op(std::size_t d, std::size_t i, std::size_t j);

/// SWAP on C^d (x) C^d: sum_ij |i><j| (x) |j><i|.
ComplexMatrix swap_operator(std::size_t d);

/// Unnormalized maximally entangled projector |I>><<I| = sum_ij |ii><jj|.
ComplexMatrix max_entangled_projector(std::size_t d);

bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& u, double tol = kStructuralTol);

/// Returns `a` after checking A = A^dagger within 1e-12 (relative to the
/// largest entry); throws ValidationError otherwise.
ComplexMatrix hermitian(const ComplexMatrix& a);

/// Largest absolute entry.
double max_abs(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Tensor structure.
// ---------------------------------------------------------------------------

/// Kronecker product; the first factor is the slow index.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor(std::span<const ComplexMatrix> factors);

enum class ReduceMode { kTrace, kTranspose };

/// Partial trace or partial transpose over the `targets` factors of an
/// operator on (x)_k C^{factor_dims[k]}.
ComplexMatrix reduce(const ComplexMatrix& op, std::span<const std::size_t> factor_dims,
                     std::span<const std::size_t> targets, ReduceMode mode);

/// Reorders tensor factors: factor `perm[k]` of the input becomes factor k of
/// the output.
ComplexMatrix permute_factors(const ComplexMatrix& op, std::span<const std::size_t> factor_dims,
                              std::span<const std::size_t> perm);

// ---------------------------------------------------------------------------
// Spectral routines.
// ---------------------------------------------------------------------------

enum class SpectralKind { kHermitianEig, kSvd };

/// For kHermitianEig: values are eigenvalues, left == right == eigenvectors,
/// op = left * diag(values) * right^dagger. For kSvd: values are singular
/// values, op = left * diag(values) * right^dagger. Values are sorted in
/// descending order in both cases.
struct SpectralDecomposition {
    RealVector values;
    ComplexMatrix left;
    ComplexMatrix right;

    ComplexMatrix reconstruct() const;
};

SpectralDecomposition spectral(const ComplexMatrix& op, SpectralKind kind);

/// Eigenvalues of a general square matrix (unordered).
ComplexVector eigenvalues(const ComplexMatrix& op);

/// Eigenvalues of a Hermitian matrix, descending.
RealVector hermitian_eigenvalues(const ComplexMatrix& op);

/// Tr sqrt(A^dagger A).
double trace_norm(const ComplexMatrix& op);

/// exp(-i t h) for Hermitian h (hbar = 1).
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t);

/// Principal square root of a positive semidefinite matrix; small negative
/// eigenvalues from rounding are clipped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& a);

}  // namespace rbcorr

#endif  // RBCORR_NUMERICS_H
