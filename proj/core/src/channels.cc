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

#include "rbcorr/channels.h"

#include <cmath>
#include <string>

#include "rbcorr/errors.h"
#include "rbcorr/random.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;

void check_choi_shape(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out,
                      const char* what) {
    const auto n = static_cast<Idx>(d_in * d_out);
    if (choi.rows() != n || choi.cols() != n) {
        throw DimensionError(std::string(what) + ": Choi matrix is " + std::to_string(choi.rows()) +
                             "x" + std::to_string(choi.cols()) + ", expected " +
                             std::to_string(n) + "x" + std::to_string(n));
    }
}

}  // namespace

ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw ValidationError("choi_from_kraus: no Kraus operators");
    const Idx d_out = kraus.front().rows();
    const Idx d_in = kraus.front().cols();
    ComplexMatrix choi = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
    ComplexVector v(d_in * d_out);
    for (const auto& k : kraus) {
        if (k.rows() != d_out || k.cols() != d_in) {
            throw DimensionError("choi_from_kraus: Kraus operators differ in shape");
        }
        for (Idx i = 0; i < d_in; ++i) {
            for (Idx o = 0; o < d_out; ++o) v(i * d_out + o) = k(o, i);
        }
        choi.noalias() += v * v.adjoint();
    }
    return choi;
}

std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, std::size_t d_in,
                                           std::size_t d_out, double cutoff) {
    check_choi_shape(choi, d_in, d_out, "kraus_from_choi");
    const auto dec = spectral(0.5 * (choi + choi.adjoint()), SpectralKind::kHermitianEig);
    const double scale = std::max(1.0, std::abs(dec.values(0)));
    if (dec.values(dec.values.size() - 1) < -kSolverTol * scale) {
        throw ValidationError("kraus_from_choi: Choi matrix has a negative eigenvalue " +
                              std::to_string(dec.values(dec.values.size() - 1)));
    }
    std::vector<ComplexMatrix> kraus;
    const auto di = static_cast<Idx>(d_in);
    const auto dout = static_cast<Idx>(d_out);
    for (Idx k = 0; k < dec.values.size(); ++k) {
        if (dec.values(k) <= cutoff * scale) continue;
        const double s = std::sqrt(dec.values(k));
        ComplexMatrix op(dout, di);
        for (Idx i = 0; i < di; ++i) {
            for (Idx o = 0; o < dout; ++o) op(o, i) = s * dec.left(i * dout + o, k);
        }
        kraus.push_back(std::move(op));
    }
    if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(dout, di));
    return kraus;
}

ComplexMatrix choi_to_superop(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out) {
    check_choi_shape(choi, d_in, d_out, "choi_to_superop");
    const auto di = static_cast<Idx>(d_in);
    const auto dout = static_cast<Idx>(d_out);
    ComplexMatrix s(dout * dout, di * di);
    for (Idx i = 0; i < di; ++i)
        for (Idx j = 0; j < di; ++j)
            for (Idx o = 0; o < dout; ++o)
                for (Idx p = 0; p < dout; ++p) s(o * dout + p, i * di + j) = choi(i * dout + o, j * dout + p);
    return s;
}

ComplexMatrix superop_to_choi(const ComplexMatrix& superop, std::size_t d_in, std::size_t d_out) {
    const auto di = static_cast<Idx>(d_in);
    const auto dout = static_cast<Idx>(d_out);
    if (superop.rows() != dout * dout || superop.cols() != di * di) {
        throw DimensionError("superop_to_choi: shape does not match the given dimensions");
    }
    ComplexMatrix choi(di * dout, di * dout);
    for (Idx i = 0; i < di; ++i)
        for (Idx j = 0; j < di; ++j)
            for (Idx o = 0; o < dout; ++o)
                for (Idx p = 0; p < dout; ++p) choi(i * dout + o, j * dout + p) = superop(o * dout + p, i * di + j);
    return choi;
}

ComplexMatrix apply_choi(const ComplexMatrix& choi, const ComplexMatrix& rho, std::size_t d_in,
                         std::size_t d_out) {
    check_choi_shape(choi, d_in, d_out, "apply_choi");
    const auto di = static_cast<Idx>(d_in);
    const auto dout = static_cast<Idx>(d_out);
    if (rho.rows() != di || rho.cols() != di) throw DimensionError("apply_choi: state has wrong size");
    ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
    for (Idx i = 0; i < di; ++i)
        for (Idx j = 0; j < di; ++j) out += rho(i, j) * choi.block(i * dout, j * dout, dout, dout);
    return out;
}

bool is_completely_positive(const ComplexMatrix& choi, double tol) {
    if (!is_hermitian(choi, std::max(tol, kHermitianTol))) return false;
    return min_eigenvalue(0.5 * (choi + choi.adjoint())) >= -tol;
}

bool is_trace_preserving(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out, double tol) {
    check_choi_shape(choi, d_in, d_out, "is_trace_preserving");
    const std::size_t dims[] = {d_in, d_out};
    const std::size_t out_factor[] = {1};
    const ComplexMatrix marginal = reduce(choi, dims, out_factor, ReduceMode::kTrace);
    return max_abs(marginal - identity(d_in)) <= tol;
}

bool is_cptp(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out, double tol) {
    return is_trace_preserving(choi, d_in, d_out, tol) && is_completely_positive(choi, tol);
}

void require_cptp(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out, const char* what) {
    if (!is_completely_positive(choi)) {
        throw ValidationError(std::string(what) + ": map is not completely positive");
    }
    if (!is_trace_preserving(choi, d_in, d_out)) {
        throw ValidationError(std::string(what) + ": map is not trace preserving");
    }
}

Channel Channel::from_choi(const ComplexMatrix& choi, std::size_t d_in, std::size_t d_out) {
    check_choi_shape(choi, d_in, d_out, "Channel::from_choi");
    Channel ch;
    ch.kraus_ = kraus_from_choi(choi, d_in, d_out);
    ch.choi_ = choi;
    ch.d_in_ = d_in;
    ch.d_out_ = d_out;
    return ch;
}

Channel Channel::from_kraus(std::vector<ComplexMatrix> kraus) {
    Channel ch;
    ch.choi_ = choi_from_kraus(kraus);
    ch.d_in_ = static_cast<std::size_t>(kraus.front().cols());
    ch.d_out_ = static_cast<std::size_t>(kraus.front().rows());
    ch.kraus_ = std::move(kraus);
    return ch;
}

Channel Channel::from_unitary(const ComplexMatrix& u) {
    if (!is_unitary(u)) throw ValidationError("Channel::from_unitary: matrix is not unitary");
    return from_kraus({u});
}

ComplexMatrix Channel::apply(const ComplexMatrix& rho) const {
    if (rho.rows() != static_cast<Idx>(d_in_) || rho.cols() != static_cast<Idx>(d_in_)) {
        throw DimensionError("Channel::apply: state dimension does not match channel input");
    }
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Idx>(d_out_), static_cast<Idx>(d_out_));
    for (const auto& k : kraus_) out.noalias() += k * rho * k.adjoint();
    return out;
}

Channel compose(const Channel& second, const Channel& first) {
    if (second.input_dim() != first.output_dim()) {
        throw DimensionError("compose: output of first map does not match input of second");
    }
    const ComplexMatrix s = choi_to_superop(second.choi(), second.input_dim(), second.output_dim()) *
                            choi_to_superop(first.choi(), first.input_dim(), first.output_dim());
    return Channel::from_choi(superop_to_choi(s, first.input_dim(), second.output_dim()),
                              first.input_dim(), second.output_dim());
}

Channel identity_channel(std::size_t d) { return Channel::from_kraus({identity(d)}); }

Channel unitary_channel(const ComplexMatrix& u) { return Channel::from_unitary(u); }

Channel depolarizing_channel(std::size_t d, double q) {
    const double dd = static_cast<double>(d);
    if (q > 1.0 + kStructuralTol || q < -1.0 / (dd * dd - 1.0) - kStructuralTol) {
        throw ValidationError("depolarizing_channel: q = " + std::to_string(q) +
                              " is outside the completely positive range");
    }
    const ComplexMatrix choi = q * max_entangled_projector(d) + (1.0 - q) / dd * identity(d * d);
    return Channel::from_choi(choi, d, d);
}

Channel pauli_channel(double px, double py, double pz) {
    const double pi = 1.0 - px - py - pz;
    if (px < 0 || py < 0 || pz < 0 || pi < -kStructuralTol) {
        throw ValidationError("pauli_channel: probabilities must be nonnegative and sum to <= 1");
    }
    std::vector<ComplexMatrix> kraus;
    kraus.push_back(std::sqrt(std::max(pi, 0.0)) * identity(2));
    kraus.push_back(std::sqrt(px) * pauli_x());
    kraus.push_back(std::sqrt(py) * pauli_y());
    kraus.push_back(std::sqrt(pz) * pauli_z());
    return Channel::from_kraus(std::move(kraus));
}

Channel bit_flip_channel() { return Channel::from_kraus({pauli_x()}); }

Channel random_channel(std::size_t d, std::size_t kraus_rank, std::mt19937_64& rng) {
    if (kraus_rank == 0) throw ValidationError("random_channel: kraus_rank must be >= 1");
    // First d columns of a Haar unitary on C^{d*r} form an isometry C^d -> C^r (x) C^d.
    const ComplexMatrix u = haar_unitary(d * kraus_rank, rng);
    const auto dd = static_cast<Idx>(d);
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < kraus_rank; ++k) {
        kraus.push_back(u.block(static_cast<Idx>(k) * dd, 0, dd, dd));
    }
    return Channel::from_kraus(std::move(kraus));
}

}  // namespace rbcorr
