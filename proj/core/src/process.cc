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

#include "rbcorr/process.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "rbcorr/errors.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;

std::size_t total_dim(const std::vector<LabeledSpace>& spaces) {
    std::size_t n = 1;
    for (const auto& s : spaces) n *= s.dim;
    return n;
}

void check_density_matrix(const ComplexMatrix& rho, const char* what) {
    if (rho.rows() != rho.cols()) throw DimensionError(std::string(what) + ": state is not square");
    if (!is_hermitian(rho, 1e-10)) throw ValidationError(std::string(what) + ": state is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
        throw ValidationError(std::string(what) + ": state does not have unit trace");
    }
    if (min_eigenvalue(0.5 * (rho + rho.adjoint())) < -1e-10) {
        throw ValidationError(std::string(what) + ": state is not positive semidefinite");
    }
}

void check_weights(const std::vector<double>& w, const char* what) {
    double sum = 0.0;
    for (double p : w) {
        if (p < -1e-12) throw ValidationError(std::string(what) + ": negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw ValidationError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
    }
}

LabeledOperator tensor_op(const LabeledOperator& a, const LabeledOperator& b) {
    std::vector<LabeledSpace> spaces = a.spaces();
    spaces.insert(spaces.end(), b.spaces().begin(), b.spaces().end());
    return LabeledOperator(tensor(a.matrix(), b.matrix()), std::move(spaces));
}

}  // namespace

std::string to_string(const WireId& id) {
    switch (id.kind) {
        case WireKind::kSystemIn: return "S_I^" + std::to_string(id.time);
        case WireKind::kSystemOut: return "S_O^" + std::to_string(id.time);
        case WireKind::kEnvironment: return "E^" + std::to_string(id.time);
    }
    return "?";
}

LabeledOperator::LabeledOperator(ComplexMatrix matrix, std::vector<LabeledSpace> spaces)
    : matrix_(std::move(matrix)), spaces_(std::move(spaces)) {
    const auto n = static_cast<Idx>(total_dim(spaces_));
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw DimensionError("LabeledOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                             std::to_string(matrix_.cols()) + " but spaces multiply to " +
                             std::to_string(n));
    }
    for (std::size_t i = 0; i < spaces_.size(); ++i) {
        if (spaces_[i].dim == 0) throw DimensionError("LabeledOperator: zero-dimensional space");
        for (std::size_t j = 0; j < i; ++j) {
            if (spaces_[i].id == spaces_[j].id) {
                throw DimensionError("LabeledOperator: duplicate wire " + to_string(spaces_[i].id));
            }
        }
    }
}

std::vector<std::size_t> LabeledOperator::dims() const {
    std::vector<std::size_t> d;
    d.reserve(spaces_.size());
    for (const auto& s : spaces_) d.push_back(s.dim);
    return d;
}

std::optional<std::size_t> LabeledOperator::position(const WireId& id) const {
    for (std::size_t i = 0; i < spaces_.size(); ++i) {
        if (spaces_[i].id == id) return i;
    }
    return std::nullopt;
}

LabeledOperator LabeledOperator::reordered(const std::vector<WireId>& order) const {
    if (order.size() != spaces_.size()) {
        throw DimensionError("LabeledOperator::reordered: label count mismatch");
    }
    std::vector<std::size_t> perm;
    std::vector<LabeledSpace> spaces;
    for (const auto& id : order) {
        auto pos = position(id);
        if (!pos) throw DimensionError("LabeledOperator::reordered: unknown wire " + to_string(id));
        perm.push_back(*pos);
        spaces.push_back(spaces_[*pos]);
    }
    bool identity_perm = true;
    for (std::size_t k = 0; k < perm.size(); ++k) identity_perm = identity_perm && perm[k] == k;
    if (identity_perm) return *this;
    const auto d = dims();
    return LabeledOperator(permute_factors(matrix_, d, perm), std::move(spaces));
}

LabeledOperator LabeledOperator::canonical() const {
    std::vector<WireId> order;
    for (const auto& s : spaces_) order.push_back(s.id);
    std::sort(order.begin(), order.end());
    return reordered(order);
}

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
    std::vector<WireId> shared;
    std::vector<WireId> a_rest;
    std::vector<LabeledSpace> out_spaces;
    std::size_t ds = 1;
    for (const auto& s : a.spaces()) {
        if (auto pos = b.position(s.id)) {
            if (b.spaces()[*pos].dim != s.dim) {
                throw DimensionError("link_product: wire " + to_string(s.id) +
                                     " has different dimensions in the two operands");
            }
            shared.push_back(s.id);
            ds *= s.dim;
        } else {
            a_rest.push_back(s.id);
            out_spaces.push_back(s);
        }
    }
    std::vector<WireId> b_rest;
    for (const auto& s : b.spaces()) {
        if (!a.has(s.id)) {
            b_rest.push_back(s.id);
            out_spaces.push_back(s);
        }
    }
    if (shared.empty()) return tensor_op(a, b);

    std::vector<WireId> a_order = a_rest;
    a_order.insert(a_order.end(), shared.begin(), shared.end());
    std::vector<WireId> b_order = shared;
    b_order.insert(b_order.end(), b_rest.begin(), b_rest.end());
    const ComplexMatrix am = a.reordered(a_order).matrix();
    const ComplexMatrix bm = b.reordered(b_order).matrix();

    const Idx da = am.rows() / static_cast<Idx>(ds);
    const Idx db = bm.rows() / static_cast<Idx>(ds);
    const auto s_dim = static_cast<Idx>(ds);

    // C[(xa,xb),(ya,yb)] = sum_{s,t} A[(xa,t),(ya,s)] B[(t,xb),(s,yb)], done as
    // one matrix product after regrouping indices.
    ComplexMatrix at(da * da, s_dim * s_dim);
    for (Idx xa = 0; xa < da; ++xa)
        for (Idx ya = 0; ya < da; ++ya)
            for (Idx t = 0; t < s_dim; ++t)
                for (Idx s = 0; s < s_dim; ++s) at(xa * da + ya, t * s_dim + s) = am(xa * s_dim + t, ya * s_dim + s);
    ComplexMatrix bt(s_dim * s_dim, db * db);
    for (Idx t = 0; t < s_dim; ++t)
        for (Idx s = 0; s < s_dim; ++s)
            for (Idx xb = 0; xb < db; ++xb)
                for (Idx yb = 0; yb < db; ++yb) bt(t * s_dim + s, xb * db + yb) = bm(t * db + xb, s * db + yb);
    const ComplexMatrix ct = at * bt;
    ComplexMatrix c(da * db, da * db);
    for (Idx xa = 0; xa < da; ++xa)
        for (Idx ya = 0; ya < da; ++ya)
            for (Idx xb = 0; xb < db; ++xb)
                for (Idx yb = 0; yb < db; ++yb) c(xa * db + xb, ya * db + yb) = ct(xa * da + ya, xb * db + yb);
    return LabeledOperator(std::move(c), std::move(out_spaces));
}

LabeledOperator choi_of_unitary(const ComplexMatrix& u, const std::vector<LabeledSpace>& in,
                                const std::vector<LabeledSpace>& out) {
    const auto din = static_cast<Idx>(total_dim(in));
    const auto dout = static_cast<Idx>(total_dim(out));
    if (u.rows() != dout || u.cols() != din) {
        throw DimensionError("choi_of_unitary: matrix shape does not match the labelled spaces");
    }
    if (!is_unitary(u)) throw ValidationError("choi_of_unitary: matrix is not unitary");
    ComplexVector v(din * dout);
    for (Idx i = 0; i < din; ++i)
        for (Idx o = 0; o < dout; ++o) v(i * dout + o) = u(o, i);
    std::vector<LabeledSpace> spaces = in;
    spaces.insert(spaces.end(), out.begin(), out.end());
    return LabeledOperator(v * v.adjoint(), std::move(spaces));
}

LabeledOperator choi_of_channel(const Channel& channel, WireId in, WireId out) {
    return LabeledOperator(channel.choi(),
                           {{in, channel.input_dim()}, {out, channel.output_dim()}});
}

LabeledOperator measurement_element(const ComplexMatrix& effect, int t) {
    const auto d = static_cast<std::size_t>(effect.rows());
    return LabeledOperator(tensor(effect.transpose(), identity(d) / static_cast<double>(d)),
                           {{system_in(t), d}, {system_out(t), d}});
}

void Instrument::validate() const {
    if (elements.empty()) throw ValidationError("Instrument: no elements");
    ComplexMatrix sum = ComplexMatrix::Zero(elements[0].matrix().rows(), elements[0].matrix().cols());
    for (const auto& e : elements) {
        if (e.spaces().size() != 2) throw DimensionError("Instrument: elements must act on two wires");
        if (!is_completely_positive(e.matrix())) {
            throw ValidationError("Instrument: element is not completely positive");
        }
        sum += e.reordered({elements[0].spaces()[0].id, elements[0].spaces()[1].id}).matrix();
    }
    if (!is_trace_preserving(sum, elements[0].spaces()[0].dim, elements[0].spaces()[1].dim)) {
        throw ValidationError("Instrument: elements do not sum to a trace-preserving map");
    }
}

ProcessMatrix build_markovian(const ComplexMatrix& rho, const std::vector<Channel>& channels) {
    check_density_matrix(rho, "build_markovian");
    const auto d = static_cast<std::size_t>(rho.rows());
    std::vector<LabeledSpace> spaces{{system_in(0), d}};
    std::vector<ComplexMatrix> factors{rho};
    int t = 0;
    for (const auto& ch : channels) {
        if (ch.input_dim() != d || ch.output_dim() != d) {
            throw DimensionError("build_markovian: channel dimension differs from the state");
        }
        require_cptp(ch.choi(), d, d, "build_markovian");
        factors.push_back(ch.choi());
        spaces.push_back({system_out(t), d});
        spaces.push_back({system_in(t + 1), d});
        ++t;
    }
    factors.push_back(identity(d));
    spaces.push_back({system_out(t), d});
    return ProcessMatrix{LabeledOperator(tensor(factors), std::move(spaces)), channels.size()};
}

ProcessMatrix build_ccc(const std::vector<double>& weights, const std::vector<ComplexMatrix>& states,
                        const std::vector<std::vector<Channel>>& branches) {
    if (weights.size() != branches.size() || states.size() != branches.size() || branches.empty()) {
        throw DimensionError("build_ccc: weights, states and branches must have equal nonzero length");
    }
    check_weights(weights, "build_ccc");
    std::optional<ProcessMatrix> acc;
    for (std::size_t x = 0; x < branches.size(); ++x) {
        ProcessMatrix w = build_markovian(states[x], branches[x]);
        if (!acc) {
            acc = ProcessMatrix{LabeledOperator(weights[x] * w.op.matrix(), w.op.spaces()), w.steps};
            continue;
        }
        if (w.steps != acc->steps || w.op.dims() != acc->op.dims()) {
            throw DimensionError("build_ccc: branches have different step counts or dimensions");
        }
        acc->op = LabeledOperator(acc->op.matrix() + weights[x] * w.op.matrix(), acc->op.spaces());
    }
    return *acc;
}

ProcessMatrix build_ccc(const std::vector<double>& weights, const ComplexMatrix& rho,
                        const std::vector<std::vector<Channel>>& branches) {
    return build_ccc(weights, std::vector<ComplexMatrix>(branches.size(), rho), branches);
}

ProcessMatrix build_cff(const CffProcessSpec& spec) {
    const std::size_t nx = spec.instruments.size();
    if (nx == 0 || spec.initial_settings.size() != spec.root_states.size()) {
        throw DimensionError("build_cff: settings, root states and instruments are inconsistent");
    }
    if (!spec.kernel && spec.steps > 0) throw ValidationError("build_cff: missing kernel");
    check_weights(spec.initial_settings, "build_cff initial settings");

    std::size_t d = 0;
    for (const auto& roots : spec.root_states) {
        double tr = 0.0;
        for (const auto& r : roots) {
            if (d == 0) d = static_cast<std::size_t>(r.rows());
            if (!is_hermitian(r, 1e-10) || min_eigenvalue(0.5 * (r + r.adjoint())) < -1e-10) {
                throw ValidationError("build_cff: root state is not positive");
            }
            tr += r.trace().real();
        }
        if (std::abs(tr - 1.0) > 1e-10) throw ValidationError("build_cff: root states do not sum to unit trace");
    }
    for (const auto& inst : spec.instruments) {
        if (inst.empty()) throw ValidationError("build_cff: empty instrument");
        ComplexMatrix sum = ComplexMatrix::Zero(inst[0].choi().rows(), inst[0].choi().cols());
        for (const auto& e : inst) {
            if (e.input_dim() != d || e.output_dim() != d) throw DimensionError("build_cff: instrument dimension");
            sum += e.choi();
        }
        require_cptp(sum, d, d, "build_cff instrument");
    }

    const auto n = static_cast<Idx>(std::pow(static_cast<double>(d), 2.0 * static_cast<double>(spec.steps + 1)));
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    std::vector<std::size_t> outcomes;
    std::vector<std::size_t> settings;

    std::function<void(std::size_t, double, const ComplexMatrix&)> recurse =
        [&](std::size_t t, double weight, const ComplexMatrix& partial) {
            if (t > spec.steps) {
                acc += weight * tensor(partial, identity(d));
                return;
            }
            const std::vector<double> dist = spec.kernel(outcomes, settings);
            if (dist.size() != nx) throw DimensionError("build_cff: kernel returned wrong support size");
            check_weights(dist, "build_cff kernel");
            for (std::size_t x = 0; x < nx; ++x) {
                if (dist[x] == 0.0) continue;
                for (std::size_t a = 0; a < spec.instruments[x].size(); ++a) {
                    outcomes.push_back(a);
                    settings.push_back(x);
                    recurse(t + 1, weight * dist[x], tensor(partial, spec.instruments[x][a].choi()));
                    outcomes.pop_back();
                    settings.pop_back();
                }
            }
        };

    for (std::size_t x0 = 0; x0 < spec.root_states.size(); ++x0) {
        if (spec.initial_settings[x0] == 0.0) continue;
        for (std::size_t a0 = 0; a0 < spec.root_states[x0].size(); ++a0) {
            outcomes.assign(1, a0);
            settings.assign(1, x0);
            recurse(1, spec.initial_settings[x0], spec.root_states[x0][a0]);
        }
    }

    std::vector<LabeledSpace> spaces;
    for (std::size_t t = 0; t <= spec.steps; ++t) {
        spaces.push_back({system_in(static_cast<int>(t)), d});
        spaces.push_back({system_out(static_cast<int>(t)), d});
    }
    return ProcessMatrix{LabeledOperator(std::move(acc), std::move(spaces)), spec.steps};
}

ProcessMatrix build_from_dilation(const ComplexMatrix& rho_se, std::size_t env_dim,
                                  const std::vector<ComplexMatrix>& unitaries) {
    if (env_dim == 0 || rho_se.rows() % static_cast<Idx>(env_dim) != 0) {
        throw DimensionError("build_from_dilation: joint state dimension is not a multiple of env_dim");
    }
    check_density_matrix(rho_se, "build_from_dilation");
    const std::size_t d = static_cast<std::size_t>(rho_se.rows()) / env_dim;
    LabeledOperator acc(rho_se, {{environment(0), env_dim}, {system_in(0), d}});
    int t = 0;
    for (const auto& u : unitaries) {
        if (u.rows() != rho_se.rows() || u.cols() != rho_se.cols()) {
            throw DimensionError("build_from_dilation: unitary " + std::to_string(t + 1) +
                                 " does not act on the joint space");
        }
        const LabeledOperator j = choi_of_unitary(u, {{environment(t), env_dim}, {system_out(t), d}},
                                                  {{environment(t + 1), env_dim}, {system_in(t + 1), d}});
        acc = link_product(acc, j);
        ++t;
    }
    acc = link_product(acc, LabeledOperator(identity(env_dim), {{environment(t), env_dim}}));
    acc = link_product(acc, LabeledOperator(identity(d), {{system_out(t), d}}));
    return ProcessMatrix{acc.canonical(), unitaries.size()};
}

double born_probability(const ProcessMatrix& w, const std::vector<LabeledOperator>& elements) {
    if (elements.empty()) throw DimensionError("born_probability: no instrument elements");
    LabeledOperator m = elements[0];
    for (std::size_t i = 1; i < elements.size(); ++i) {
        for (const auto& s : elements[i].spaces()) {
            if (m.has(s.id)) throw DimensionError("born_probability: wire " + to_string(s.id) + " used twice");
        }
        m = tensor_op(m, elements[i]);
    }
    if (m.spaces().size() != w.op.spaces().size()) {
        throw DimensionError("born_probability: instrument wires do not match the process wires");
    }
    std::vector<WireId> order;
    for (const auto& s : w.op.spaces()) {
        auto pos = m.position(s.id);
        if (!pos) throw DimensionError("born_probability: process wire " + to_string(s.id) + " not covered");
        if (m.spaces()[*pos].dim != s.dim) throw DimensionError("born_probability: wire dimension mismatch");
        order.push_back(s.id);
    }
    const ComplexMatrix mm = m.reordered(order).matrix();
    const double p = w.op.matrix().cwiseProduct(mm).sum().real();
    return std::clamp(p, 0.0, 1.0);
}

ComplexMatrix joint_hamiltonian(const std::vector<HamiltonianTerm>& terms) {
    if (terms.empty()) throw ValidationError("joint_hamiltonian: no terms");
    ComplexMatrix h;
    for (const auto& term : terms) {
        if (!is_hermitian(term.env, 1e-10) || !is_hermitian(term.sys, 1e-10)) {
            throw ValidationError("joint_hamiltonian: term is not Hermitian");
        }
        if (term.env.rows() != terms[0].env.rows() || term.sys.rows() != terms[0].sys.rows()) {
            throw DimensionError("joint_hamiltonian: terms act on different dimensions");
        }
        const ComplexMatrix k = tensor(term.env, term.sys);
        h = h.size() == 0 ? k : ComplexMatrix(h + k);
    }
    return h;
}

CccDecomposition hamiltonian_ccc_decomposition(const std::vector<HamiltonianTerm>& terms, double dt,
                                               const ComplexMatrix& rho_se) {
    const ComplexMatrix h = joint_hamiltonian(terms);
    const Idx de = terms[0].env.rows();
    const Idx ds = terms[0].sys.rows();
    if (rho_se.rows() != de * ds || rho_se.cols() != de * ds) {
        throw DimensionError("hamiltonian_ccc_decomposition: joint state has the wrong dimension");
    }
    check_density_matrix(rho_se, "hamiltonian_ccc_decomposition");

    double scale = 1.0;
    for (const auto& t : terms) scale = std::max(scale, max_abs(t.env));
    for (std::size_t x = 0; x < terms.size(); ++x) {
        for (std::size_t y = 0; y < x; ++y) {
            const ComplexMatrix c = terms[x].env * terms[y].env - terms[y].env * terms[x].env;
            if (max_abs(c) > 1e-10 * scale * scale) {
                throw OutOfClassError("hamiltonian_ccc_decomposition: environment terms " + std::to_string(y) +
                                      " and " + std::to_string(x) + " do not commute");
            }
        }
    }

    // A generic real combination of commuting Hermitian terms has the joint
    // eigenbasis as an eigenbasis.
    std::mt19937_64 rng(0x9d2c5680a1e3f5b7ULL);
    std::uniform_real_distribution<double> coeff(0.5, 1.5);
    ComplexMatrix combo = ComplexMatrix::Zero(de, de);
    for (const auto& t : terms) combo += coeff(rng) * t.env;
    const auto dec = spectral(combo, SpectralKind::kHermitianEig);
    const ComplexMatrix& v = dec.left;

    CccDecomposition out;
    out.basis = v;
    out.eigenvalues.assign(static_cast<std::size_t>(de), std::vector<double>(terms.size()));
    for (std::size_t x = 0; x < terms.size(); ++x) {
        const ComplexMatrix diag = v.adjoint() * terms[x].env * v;
        ComplexMatrix off = diag;
        off.diagonal().setZero();
        if (max_abs(off) > 1e-9 * scale) {
            throw OutOfClassError("hamiltonian_ccc_decomposition: no common eigenbasis found");
        }
        for (Idx l = 0; l < de; ++l) out.eigenvalues[static_cast<std::size_t>(l)][x] = diag(l, l).real();
    }

    for (Idx l = 0; l < de; ++l) {
        ComplexMatrix hs = ComplexMatrix::Zero(ds, ds);
        for (std::size_t x = 0; x < terms.size(); ++x) {
            hs += out.eigenvalues[static_cast<std::size_t>(l)][x] * terms[x].sys;
        }
        out.unitaries.push_back(unitary_from_hamiltonian(hs, dt));

        ComplexMatrix block = ComplexMatrix::Zero(ds, ds);
        for (Idx i = 0; i < de; ++i)
            for (Idx j = 0; j < de; ++j) block += std::conj(v(i, l)) * v(j, l) * rho_se.block(i * ds, j * ds, ds, ds);
        const double p = std::max(0.0, block.trace().real());
        out.weights.push_back(p);
        out.system_states.push_back(p > 1e-15 ? ComplexMatrix(block / p) : ComplexMatrix(identity(static_cast<std::size_t>(ds)) / static_cast<double>(ds)));
    }
    const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (auto& p : out.weights) p /= total;
    return out;
}

}  // namespace rbcorr
