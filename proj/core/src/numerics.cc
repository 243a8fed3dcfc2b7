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

#include "rbcorr/numerics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rbcorr/errors.h"

namespace rbcorr {

namespace {

std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_square(const ComplexMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

// Row-major digits of `index` in the mixed radix given by `dims`.
void digits_of(std::size_t index, std::span<const std::size_t> dims, std::vector<std::size_t>& out) {
    out.resize(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

}  // namespace

ComplexMatrix identity(std::size_t d) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix hadamard() {
    ComplexMatrix m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

ComplexMatrix phase_s() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

ComplexMatrix basis_op(std::size_t d, std::size_t i, std::size_t j) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return m;
}

ComplexMatrix swap_operator(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d * d);
    ComplexMatrix f = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            f(static_cast<Eigen::Index>(i * d + j), static_cast<Eigen::Index>(j * d + i)) = 1.0;
        }
    }
    return f;
}

ComplexMatrix max_entangled_projector(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d * d);
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            p(static_cast<Eigen::Index>(i * d + i), static_cast<Eigen::Index>(j * d + j)) = 1.0;
        }
    }
    return p;
}

double max_abs(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, max_abs(a));
    return max_abs(a - a.adjoint()) <= tol * scale;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return max_abs(u.adjoint() * u - identity(static_cast<std::size_t>(u.rows()))) <= tol;
}

ComplexMatrix hermitian(const ComplexMatrix& a) {
    if (!is_hermitian(a)) {
        throw ValidationError("matrix is not Hermitian within 1e-12");
    }
    return a;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (const auto& f : factors) out = tensor(out, f);
    return out;
}

ComplexMatrix reduce(const ComplexMatrix& op, std::span<const std::size_t> factor_dims,
                     std::span<const std::size_t> targets, ReduceMode mode) {
    check_square(op, "reduce");
    const std::size_t total = product(factor_dims);
    if (total != static_cast<std::size_t>(op.rows())) {
        throw DimensionError("reduce: factor dimensions multiply to " + std::to_string(total) +
                             " but operator has dimension " + std::to_string(op.rows()));
    }
    std::vector<bool> is_target(factor_dims.size(), false);
    for (auto t : targets) {
        if (t >= factor_dims.size() || is_target[t]) {
            throw DimensionError("reduce: invalid or repeated target factor " + std::to_string(t));
        }
        is_target[t] = true;
    }

    // Split every linear index into (kept part, target part).
    std::vector<std::size_t> kept_index(total), target_index(total);
    std::vector<std::size_t> digits;
    for (std::size_t idx = 0; idx < total; ++idx) {
        digits_of(idx, factor_dims, digits);
        std::size_t keep = 0, targ = 0;
        for (std::size_t k = 0; k < factor_dims.size(); ++k) {
            if (is_target[k]) {
                targ = targ * factor_dims[k] + digits[k];
            } else {
                keep = keep * factor_dims[k] + digits[k];
            }
        }
        kept_index[idx] = keep;
        target_index[idx] = targ;
    }

    if (mode == ReduceMode::kTrace) {
        std::size_t kept_dim = 1;
        for (std::size_t k = 0; k < factor_dims.size(); ++k) {
            if (!is_target[k]) kept_dim *= factor_dims[k];
        }
        const auto n = static_cast<Eigen::Index>(kept_dim);
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (std::size_t r = 0; r < total; ++r) {
            for (std::size_t c = 0; c < total; ++c) {
                if (target_index[r] == target_index[c]) {
                    out(static_cast<Eigen::Index>(kept_index[r]), static_cast<Eigen::Index>(kept_index[c])) +=
                        op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                }
            }
        }
        return out;
    }

    // Partial transpose: exchange the target digits between row and column.
    std::vector<std::size_t> rd, cd;
    ComplexMatrix out(op.rows(), op.cols());
    for (std::size_t r = 0; r < total; ++r) {
        digits_of(r, factor_dims, rd);
        for (std::size_t c = 0; c < total; ++c) {
            digits_of(c, factor_dims, cd);
            std::size_t nr = 0, nc = 0;
            for (std::size_t k = 0; k < factor_dims.size(); ++k) {
                const std::size_t a = is_target[k] ? cd[k] : rd[k];
                const std::size_t b = is_target[k] ? rd[k] : cd[k];
                nr = nr * factor_dims[k] + a;
                nc = nc * factor_dims[k] + b;
            }
            out(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc)) =
                op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

ComplexMatrix permute_factors(const ComplexMatrix& op, std::span<const std::size_t> factor_dims,
                              std::span<const std::size_t> perm) {
    check_square(op, "permute_factors");
    const std::size_t total = product(factor_dims);
    if (total != static_cast<std::size_t>(op.rows()) || perm.size() != factor_dims.size()) {
        throw DimensionError("permute_factors: dimension mismatch");
    }
    std::vector<bool> seen(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || seen[p]) throw DimensionError("permute_factors: not a permutation");
        seen[p] = true;
    }
    std::vector<std::size_t> new_dims(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = factor_dims[perm[k]];

    std::vector<std::size_t> mapped(total);
    std::vector<std::size_t> digits;
    for (std::size_t idx = 0; idx < total; ++idx) {
        digits_of(idx, factor_dims, digits);
        std::size_t out = 0;
        for (std::size_t k = 0; k < perm.size(); ++k) out = out * new_dims[k] + digits[perm[k]];
        mapped[idx] = out;
    }
    ComplexMatrix out(op.rows(), op.cols());
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            out(static_cast<Eigen::Index>(mapped[r]), static_cast<Eigen::Index>(mapped[c])) =
                op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    return left * values.cast<Complex>().asDiagonal() * right.adjoint();
}

SpectralDecomposition spectral(const ComplexMatrix& op, SpectralKind kind) {
    if (kind == SpectralKind::kHermitianEig) {
        check_square(op, "spectral");
        if (!is_hermitian(op, 1e-10)) {
            throw ValidationError("spectral: hermitian_eig requires a Hermitian input");
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op);
        if (solver.info() != Eigen::Success) {
            throw ConvergenceError("spectral: Hermitian eigensolver did not converge");
        }
        // Eigen sorts ascending; flip to descending.
        SpectralDecomposition out;
        out.values = solver.eigenvalues().reverse();
        out.left = solver.eigenvectors().rowwise().reverse();
        out.right = out.left;
        return out;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(op, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw ConvergenceError("spectral: SVD did not converge");
    }
    SpectralDecomposition out;
    out.values = svd.singularValues();
    // Thin factors so that reconstruct() works for rectangular inputs.
    const Eigen::Index k = out.values.size();
    out.left = svd.matrixU().leftCols(k);
    out.right = svd.matrixV().leftCols(k);
    return out;
}

ComplexVector eigenvalues(const ComplexMatrix& op) {
    check_square(op, "eigenvalues");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(op, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigenvalues: complex Schur iteration did not converge");
    }
    return solver.eigenvalues();
}

RealVector hermitian_eigenvalues(const ComplexMatrix& op) {
    check_square(op, "hermitian_eigenvalues");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("hermitian_eigenvalues: did not converge");
    }
    return solver.eigenvalues().reverse();
}

double trace_norm(const ComplexMatrix& op) {
    check_square(op, "trace_norm");
    if (op.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(op);
    return svd.singularValues().sum();
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t) {
    check_square(h, "unitary_from_hamiltonian");
    if (!is_hermitian(h, 1e-10)) {
        throw ValidationError("unitary_from_hamiltonian: Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("unitary_from_hamiltonian: eigensolver did not converge");
    }
    const RealVector& lambda = solver.eigenvalues();
    ComplexVector phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::exp(Complex(0.0, -t * lambda(k)));
    }
    const ComplexMatrix& v = solver.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("psd_sqrt: eigensolver did not converge");
    }
    RealVector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const ComplexMatrix& v = solver.eigenvectors();
    return v * root.cast<Complex>().asDiagonal() * v.adjoint();
}

double min_eigenvalue(const ComplexMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("min_eigenvalue: eigensolver did not converge");
    }
    return solver.eigenvalues()(0);
}

}  // namespace rbcorr
