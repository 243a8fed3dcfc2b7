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

#include "rbcorr/clifford.h"

#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <tuple>

#include "rbcorr/errors.h"

namespace rbcorr {

namespace {

constexpr double kGrid = 1e-9;

using Key = std::vector<long long>;

// Entries rounded onto a 1e-9 grid after phase canonicalization.
Key key_of(const ComplexMatrix& u) {
    Key key;
    key.reserve(static_cast<std::size_t>(2 * u.size()));
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
            key.push_back(std::llround(u(r, c).real() / kGrid));
            key.push_back(std::llround(u(r, c).imag() / kGrid));
        }
    }
    return key;
}

bool same_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    // |Tr(A^dag B)| = d exactly when B = e^{i phi} A for unitaries.
    const double overlap = std::abs((a.adjoint() * b).trace());
    return std::abs(overlap - static_cast<double>(a.rows())) < 1e-9;
}

}  // namespace

ComplexMatrix canonicalize_phase(const ComplexMatrix& u) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
            const Complex z = u(r, c);
            if (std::abs(z) > 1e-9) {
                return u * (std::abs(z) / z);
            }
        }
    }
    return u;
}

CliffordGroup::CliffordGroup() {
    const ComplexMatrix gens[] = {hadamard(), phase_s()};
    std::map<Key, GateIndex> index_of;

    auto insert = [&](const ComplexMatrix& u) -> GateIndex {
        const ComplexMatrix canon = canonicalize_phase(u);
        const Key key = key_of(canon);
        auto it = index_of.find(key);
        if (it != index_of.end()) return it->second;
        const GateIndex g = elements_.size();
        elements_.push_back(canon);
        index_of.emplace(key, g);
        return g;
    };

    insert(identity(2));
    std::deque<GateIndex> frontier{0};
    while (!frontier.empty()) {
        const GateIndex g = frontier.front();
        frontier.pop_front();
        for (const auto& gen : gens) {
            const std::size_t before = elements_.size();
            const GateIndex h = insert(gen * elements_[g]);
            if (elements_.size() > before) frontier.push_back(h);
        }
    }
    if (elements_.size() != kOrder) {
        throw std::logic_error("Clifford closure produced " + std::to_string(elements_.size()) +
                               " elements");
    }

    const std::size_t n = elements_.size();
    table_.assign(n * n, 0);
    inverse_.assign(n, 0);
    for (GateIndex a = 0; a < n; ++a) {
        for (GateIndex b = 0; b < n; ++b) {
            const Key key = key_of(canonicalize_phase(elements_[a] * elements_[b]));
            auto it = index_of.find(key);
            if (it == index_of.end()) throw std::logic_error("Clifford table: product not in group");
            table_[a * n + b] = it->second;
            if (it->second == 0) inverse_[a] = b;
        }
    }
}

GateIndex CliffordGroup::find(const ComplexMatrix& u) const {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("CliffordGroup::find: expected 2x2");
    for (GateIndex g = 0; g < elements_.size(); ++g) {
        if (same_up_to_phase(elements_[g], u)) return g;
    }
    throw ValidationError("CliffordGroup::find: unitary is not a Clifford element");
}

const CliffordGroup& clifford_group() {
    static const CliffordGroup group;
    return group;
}

CliffordGroup generate_group() { return CliffordGroup(); }

GateIndex sample_uniform(std::mt19937_64& rng) {
    std::uniform_int_distribution<GateIndex> dist(0, CliffordGroup::kOrder - 1);
    return dist(rng);
}

TwirlCoefficients twirl_coefficients_of_operator(const ComplexMatrix& op, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d * d);
    if (op.rows() != n || op.cols() != n) {
        throw DimensionError("twirl_coefficients: expected a d^2 x d^2 operator");
    }
    const double dd = static_cast<double>(d);
    const Complex tr = op.trace();
    const Complex tr_swap = (swap_operator(d) * op).trace();
    return TwirlCoefficients{
        .c_identity = ((tr - tr_swap / dd) / (dd * dd - 1.0)).real(),
        .c_swap = ((tr_swap - tr / dd) / (dd * dd - 1.0)).real(),
    };
}

TwirlCoefficients twirl_coefficients(const ComplexMatrix& choi, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d * d);
    if (choi.rows() != n || choi.cols() != n) {
        throw DimensionError("twirl_coefficients: Choi matrix must be d^2 x d^2");
    }
    const std::size_t dims[] = {d, d};
    const std::size_t out_factor[] = {1};
    return twirl_coefficients_of_operator(reduce(choi, dims, out_factor, ReduceMode::kTranspose), d);
}

ComplexMatrix group_twirl(const ComplexMatrix& op) {
    const auto& group = clifford_group();
    if (op.rows() != 4 || op.cols() != 4) throw DimensionError("group_twirl: expected 4x4 operator");
    ComplexMatrix acc = ComplexMatrix::Zero(4, 4);
    for (const auto& u : group.elements()) {
        const ComplexMatrix uu = tensor(u, u);
        acc += uu.adjoint() * op * uu;
    }
    return acc / static_cast<double>(group.order());
}

}  // namespace rbcorr
