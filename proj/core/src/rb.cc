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

#include "rbcorr/rb.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "rbcorr/errors.h"
#include "rbcorr/parallel.h"
#include "rbcorr/random.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;
using State = std::vector<ComplexMatrix>;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ComplexMatrix conj(const ComplexMatrix& u, const ComplexMatrix& x) { return u * x * u.adjoint(); }

ComplexMatrix prepared_state(const Spam& spam) {
    return spam.preparation ? spam.preparation->apply(spam.rho) : spam.rho;
}

/// M^dag(E), so that Tr(E M(X)) = Tr(M^dag(E) X).
ComplexMatrix effective_effect(const Spam& spam) {
    if (!spam.measurement) return spam.effect;
    ComplexMatrix out = ComplexMatrix::Zero(spam.effect.rows(), spam.effect.cols());
    for (const auto& k : spam.measurement->kraus()) out += k.adjoint() * spam.effect * k;
    return out;
}

double readout(const ComplexMatrix& effect, const ComplexMatrix& x) {
    return (effect * x).trace().real();
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

ComplexMatrix partial_trace_env(const ComplexMatrix& joint, std::size_t de, std::size_t d) {
    const std::size_t dims[] = {de, d};
    const std::size_t env[] = {0};
    return reduce(joint, dims, env, ReduceMode::kTrace);
}

ComplexMatrix hamiltonian_unitary(const HamiltonianCoupled& m) {
    return unitary_from_hamiltonian(joint_hamiltonian(m.terms), m.dt);
}

// Model-specific pieces shared by the sequence propagator and the group DP.
struct Dynamics {
    std::function<State(const ComplexMatrix&)> lift;        // prepared state -> initial State
    std::function<State(std::size_t, const State&)> noise;  // noise step t
    std::vector<ComplexMatrix> gates;                       // gate unitaries lifted to the State space
    std::function<ComplexMatrix(const State&)> lower;       // State -> system operator
};

State add(State a, const State& b, double scale = 1.0) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
    return a;
}

State scaled(State a, double s) {
    for (auto& x : a) x *= s;
    return a;
}

State apply_gate(const ComplexMatrix& u, const State& s) {
    State out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(conj(u, x));
    return out;
}

State cff_step(const CffModel& m, std::size_t t, const State& s) {
    const std::size_t nx = m.instruments.size();
    State out;
    if (t == 0) {
        for (std::size_t x = 0; x < nx; ++x)
            for (const auto& e : m.instruments[x]) out.push_back(m.initial_settings[x] * e.apply(s[0]));
        return out;
    }
    std::size_t node = 0;
    std::vector<ComplexMatrix> mixed(nx, ComplexMatrix::Zero(s[0].rows(), s[0].cols()));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t a = 0; a < m.instruments[x].size(); ++a, ++node)
            for (std::size_t xn = 0; xn < nx; ++xn) mixed[xn] += m.kernel[x][a][xn] * s[node];
    for (std::size_t x = 0; x < nx; ++x)
        for (const auto& e : m.instruments[x]) out.push_back(e.apply(mixed[x]));
    return out;
}

ComplexMatrix sum_nodes(const State& s) {
    ComplexMatrix acc = s[0];
    for (std::size_t i = 1; i < s.size(); ++i) acc += s[i];
    return acc;
}

std::vector<ComplexMatrix> lifted_gates(std::size_t env_dim) {
    std::vector<ComplexMatrix> out;
    for (const auto& u : clifford_group().elements()) out.push_back(env_dim == 1 ? u : tensor(identity(env_dim), u));
    return out;
}

/// Dynamics for a single Markovian channel list (also used per CCC branch).
Dynamics markov_dynamics(std::function<const Channel&(std::size_t)> channel_at) {
    Dynamics dyn;
    dyn.lift = [](const ComplexMatrix& rho) { return State{rho}; };
    dyn.noise = [channel_at](std::size_t t, const State& s) { return State{channel_at(t).apply(s[0])}; };
    dyn.gates = lifted_gates(1);
    dyn.lower = [](const State& s) { return s[0]; };
    return dyn;
}

/// Each returned (weight, dynamics) pair is propagated independently and the
/// survival probabilities mixed with the weights.
std::vector<std::pair<double, Dynamics>> dynamics_of(const NoiseModel& model) {
    std::vector<std::pair<double, Dynamics>> out;
    std::visit(Overloaded{
                   [&](const TimeDependentMarkovian& m) {
                       out.emplace_back(1.0, markov_dynamics([&m](std::size_t t) -> const Channel& { return m.at(t); }));
                   },
                   [&](const CccModel& m) {
                       for (std::size_t x = 0; x < m.branches.size(); ++x) {
                           if (m.weights[x] == 0.0) continue;
                           const Channel* ch = &m.branches[x];
                           out.emplace_back(m.weights[x], markov_dynamics([ch](std::size_t) -> const Channel& { return *ch; }));
                       }
                   },
                   [&](const CffModel& m) {
                       Dynamics dyn;
                       dyn.lift = [](const ComplexMatrix& rho) { return State{rho}; };
                       dyn.noise = [&m](std::size_t t, const State& s) { return cff_step(m, t, s); };
                       dyn.gates = lifted_gates(1);
                       dyn.lower = sum_nodes;
                       out.emplace_back(1.0, std::move(dyn));
                   },
                   [&](const HamiltonianCoupled& m) {
                       const auto de = static_cast<std::size_t>(m.env_state.rows());
                       const auto d = static_cast<std::size_t>(m.terms[0].sys.rows());
                       const ComplexMatrix u = hamiltonian_unitary(m);
                       const ComplexMatrix sigma = m.env_state;
                       Dynamics dyn;
                       dyn.lift = [sigma](const ComplexMatrix& rho) { return State{tensor(sigma, rho)}; };
                       dyn.noise = [u](std::size_t, const State& s) { return State{conj(u, s[0])}; };
                       dyn.gates = lifted_gates(de);
                       dyn.lower = [de, d](const State& s) { return partial_trace_env(s[0], de, d); };
                       out.emplace_back(1.0, std::move(dyn));
                   },
               },
               model);
    return out;
}

double propagate(const Dynamics& dyn, const Sequence& seq, const ComplexMatrix& rho0, const ComplexMatrix& effect) {
    ComplexMatrix rho = rho0;
    const auto& group = clifford_group();
    if (seq.frame) rho = conj(group.element(*seq.frame), rho);
    State s = dyn.lift(rho);
    for (std::size_t t = 0; t < seq.gates.size(); ++t) {
        s = dyn.noise(t, s);
        s = apply_gate(dyn.gates[seq.gates[t]], s);
    }
    ComplexMatrix out = dyn.lower(s);
    if (seq.frame) out = conj(group.element(*seq.frame).adjoint(), out);
    return readout(effect, out);
}

void check_effect(const ComplexMatrix& e, std::size_t d) {
    if (e.rows() != static_cast<Idx>(d) || e.cols() != static_cast<Idx>(d)) {
        throw DimensionError("spam: effect has the wrong dimension");
    }
    if (!is_hermitian(e, 1e-10)) throw ValidationError("spam: effect is not Hermitian");
    const RealVector ev = hermitian_eigenvalues(0.5 * (e + e.adjoint()));
    if (ev(ev.size() - 1) < -1e-10 || ev(0) > 1.0 + 1e-10) {
        throw ValidationError("spam: effect must satisfy 0 <= E <= I");
    }
}

}  // namespace

Spam ideal_spam(std::size_t d) {
    Spam s;
    s.rho = basis_op(d, 0, 0);
    s.effect = basis_op(d, 0, 0);
    return s;
}

void validate_config(const RBConfig& config) {
    if (config.lengths.empty()) throw ValidationError("rb config: no sequence lengths");
    for (std::size_t m : config.lengths) {
        if (m < 1) throw ValidationError("rb config: sequence lengths must be >= 1");
    }
    if (config.sequences < 1) throw ValidationError("rb config: sequences per length must be >= 1");
    if (config.shots < 1) throw ValidationError("rb config: shots must be >= 1");
    validate_model(config.noise);
    const std::size_t d = system_dim(config.noise);
    if (d != 2) throw ValidationError("rb config: only single-qubit (d = 2) Clifford RB is supported");
    const auto& rho = config.spam.rho;
    if (rho.rows() != 2 || rho.cols() != 2) throw DimensionError("spam: state has the wrong dimension");
    if (!is_hermitian(rho, 1e-10) || std::abs(rho.trace().real() - 1.0) > 1e-10 ||
        min_eigenvalue(0.5 * (rho + rho.adjoint())) < -1e-10) {
        throw ValidationError("spam: rho is not a density matrix");
    }
    check_effect(config.spam.effect, d);
    if (config.spam.preparation) require_cptp(config.spam.preparation->choi(), d, d, "spam preparation");
    if (config.spam.measurement) require_cptp(config.spam.measurement->choi(), d, d, "spam measurement");
}

Sequence generate_sequence(std::size_t m, std::mt19937_64& rng, bool randomize_spam) {
    if (m < 1) throw ValidationError("generate_sequence: m must be >= 1");
    const auto& group = clifford_group();
    Sequence s;
    if (randomize_spam) s.frame = sample_uniform(rng);
    GateIndex product = group.identity_index();
    s.gates.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const GateIndex g = sample_uniform(rng);
        s.gates.push_back(g);
        product = group.compose(g, product);
    }
    s.gates.push_back(group.inverse(product));
    return s;
}

double survival_probability(const Sequence& seq, const NoiseModel& model, const Spam& spam) {
    const ComplexMatrix rho = prepared_state(spam);
    const ComplexMatrix effect = effective_effect(spam);
    double p = 0.0;
    for (const auto& [w, dyn] : dynamics_of(model)) p += w * propagate(dyn, seq, rho, effect);
    return clamp01(p);
}

double simulate_sequence(const Sequence& seq, const RBConfig& config, std::mt19937_64& rng) {
    const double p = survival_probability(seq, config.noise, config.spam);
    if (config.shots == 0) return p;
    std::binomial_distribution<std::size_t> shots(config.shots, p);
    return static_cast<double>(shots(rng)) / static_cast<double>(config.shots);
}

double born_rule_survival(const Sequence& seq, const NoiseModel& model, const Spam& spam) {
    const auto& group = clifford_group();
    const std::size_t m = seq.gates.size() - 1;
    ComplexMatrix rho = prepared_state(spam);
    if (seq.frame) rho = conj(group.element(*seq.frame), rho);
    const std::size_t d = static_cast<std::size_t>(rho.rows());

    std::vector<LabeledOperator> elements;
    for (std::size_t t = 0; t < m; ++t) {
        const int slot = static_cast<int>(t);
        elements.push_back(choi_of_unitary(group.element(seq.gates[t]), {{system_in(slot), d}}, {{system_out(slot), d}}));
    }
    ComplexMatrix last = group.element(seq.gates[m]);
    if (seq.frame) last = group.element(*seq.frame).adjoint() * last;
    elements.push_back(measurement_element(last.adjoint() * effective_effect(spam) * last, static_cast<int>(m)));

    const ProcessMatrix w = std::visit(
        Overloaded{
            [&](const TimeDependentMarkovian& mm) {
                std::vector<Channel> chans;
                for (std::size_t t = 1; t <= m; ++t) chans.push_back(mm.at(t));
                return build_markovian(mm.at(0).apply(rho), chans);
            },
            [&](const CccModel& mm) {
                std::vector<ComplexMatrix> states;
                std::vector<std::vector<Channel>> branches;
                for (const auto& ch : mm.branches) {
                    states.push_back(ch.apply(rho));
                    branches.emplace_back(m, ch);
                }
                return build_ccc(mm.weights, states, branches);
            },
            [&](const CffModel& mm) {
                CffProcessSpec spec;
                spec.initial_settings = mm.initial_settings;
                for (const auto& inst : mm.instruments) {
                    std::vector<ComplexMatrix> roots;
                    for (const auto& e : inst) roots.push_back(e.apply(rho));
                    spec.root_states.push_back(std::move(roots));
                }
                spec.instruments = mm.instruments;
                spec.kernel = [&mm](const std::vector<std::size_t>& outcomes, const std::vector<std::size_t>& settings) {
                    return mm.kernel[settings.back()][outcomes.back()];
                };
                spec.steps = m;
                return build_cff(spec);
            },
            [&](const HamiltonianCoupled& mm) {
                const ComplexMatrix u = hamiltonian_unitary(mm);
                const ComplexMatrix rho_se = conj(u, tensor(mm.env_state, rho));
                return build_from_dilation(rho_se, static_cast<std::size_t>(mm.env_state.rows()),
                                           std::vector<ComplexMatrix>(m, u));
            },
        },
        model);
    return born_probability(w, elements);
}

ASFCurve run_rb(const RBConfig& config) {
    validate_config(config);
    const std::size_t k = config.sequences;
    const std::size_t n_tasks = config.lengths.size() * k;
    std::vector<double> values(n_tasks);
    parallel_for(n_tasks, std::max<std::size_t>(1, config.threads), [&](std::size_t task) {
        const std::size_t li = task / k;
        const std::size_t j = task % k;
        const std::size_t m = config.lengths[li];
        std::mt19937_64 rng = make_stream(config.seed, m, j);
        const Sequence seq = generate_sequence(m, rng, config.randomize_spam);
        values[task] = simulate_sequence(seq, config, rng);
    });

    ASFCurve curve;
    curve.seed = config.seed;
    curve.model_digest = model_digest(config.noise);
    for (std::size_t li = 0; li < config.lengths.size(); ++li) {
        const double* v = values.data() + li * k;
        double mean = 0.0;
        for (std::size_t j = 0; j < k; ++j) mean += v[j];
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (std::size_t j = 0; j < k; ++j) var += (v[j] - mean) * (v[j] - mean);
        const double se = k > 1 ? std::sqrt(var / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
        curve.points.push_back(CurvePoint{config.lengths[li], mean, se, k, config.shots});
    }
    return curve;
}

double exact_asf(const NoiseModel& model, const Spam& spam, std::size_t m, bool randomize_spam) {
    if (m < 1) throw ValidationError("exact_asf: m must be >= 1");
    validate_model(model);
    if (system_dim(model) != 2) throw ValidationError("exact_asf: only d = 2 is supported");
    const auto& group = clifford_group();
    const std::size_t n = group.order();
    const double inv_n = 1.0 / static_cast<double>(n);
    const ComplexMatrix rho = prepared_state(spam);
    const ComplexMatrix effect = effective_effect(spam);

    double total = 0.0;
    for (const auto& [w, dyn] : dynamics_of(model)) {
        // s[k]: average state (times the probability) with composite gate k.
        std::vector<State> s(n);
        std::size_t t0;
        const State init = dyn.lift(rho);
        if (randomize_spam) {
            for (GateIndex v = 0; v < n; ++v) s[v] = scaled(apply_gate(dyn.gates[v], init), inv_n);
            t0 = 0;
        } else {
            const State first = dyn.noise(0, init);
            for (GateIndex k = 0; k < n; ++k) s[k] = scaled(apply_gate(dyn.gates[k], first), inv_n);
            t0 = 1;
        }
        for (std::size_t t = t0; t < m; ++t) {
            std::vector<State> noisy(n);
            for (GateIndex k = 0; k < n; ++k) noisy[k] = dyn.noise(t, s[k]);
            std::vector<State> next(n);
            for (GateIndex kn = 0; kn < n; ++kn) {
                State acc;
                for (GateIndex k = 0; k < n; ++k) {
                    const GateIndex g = group.compose(kn, group.inverse(k));
                    State moved = apply_gate(dyn.gates[g], noisy[k]);
                    acc = acc.empty() ? std::move(moved) : add(std::move(acc), moved);
                }
                next[kn] = scaled(std::move(acc), inv_n);
            }
            s = std::move(next);
        }
        State final_state;
        for (GateIndex k = 0; k < n; ++k) {
            State moved = apply_gate(dyn.gates[group.inverse(k)], dyn.noise(m, s[k]));
            final_state = final_state.empty() ? std::move(moved) : add(std::move(final_state), moved);
        }
        total += w * readout(effect, dyn.lower(final_state));
    }
    return total;
}

namespace {

double traceless_readout(const ComplexMatrix& effect, const ComplexMatrix& x) {
    const auto d = static_cast<std::size_t>(x.rows());
    return readout(effect, x - x.trace() * identity(d) / static_cast<double>(d));
}

double power(double q, std::size_t e) { return std::pow(q, static_cast<double>(e)); }

}  // namespace

double analytic_asf(const NoiseModel& model, const Spam& spam, std::size_t m, bool randomize_spam) {
    validate_model(model);
    const std::size_t d = system_dim(model);
    const double dd = static_cast<double>(d);
    const ComplexMatrix rho = prepared_state(spam);
    const ComplexMatrix effect = effective_effect(spam);
    const double b = readout(effect, identity(d) / dd);

    return std::visit(
        Overloaded{
            [&](const TimeDependentMarkovian& mm) {
                double prod = 1.0;
                for (std::size_t t = randomize_spam ? 0 : 1; t <= m; ++t) prod *= decay_parameter(mm.at(t).choi(), d);
                const double a = randomize_spam ? traceless_readout(effect, rho) : traceless_readout(effect, mm.at(0).apply(rho));
                return a * prod + b;
            },
            [&](const CccModel& mm) {
                double acc = 0.0;
                for (std::size_t x = 0; x < mm.branches.size(); ++x) {
                    const double q = decay_parameter(mm.branches[x].choi(), d);
                    if (randomize_spam) {
                        acc += mm.weights[x] * power(q, m + 1) * traceless_readout(effect, rho);
                    } else {
                        acc += mm.weights[x] * power(q, m) * traceless_readout(effect, mm.branches[x].apply(rho));
                    }
                }
                return acc + b;
            },
            [&](const CffModel& mm) {
                // Nodes (x, a) in instrument order; T[(x',a'),(x,a)] = p(x'|x,a) beta_{a'|x'}.
                std::vector<std::pair<std::size_t, std::size_t>> nodes;
                std::vector<double> beta;
                for (std::size_t x = 0; x < mm.instruments.size(); ++x)
                    for (std::size_t a = 0; a < mm.instruments[x].size(); ++a) {
                        nodes.emplace_back(x, a);
                        beta.push_back(cff_beta(mm.instruments[x][a].choi(), d));
                    }
                const auto nn = static_cast<Idx>(nodes.size());
                Eigen::MatrixXd tm(nn, nn);
                for (Idx i = 0; i < nn; ++i)
                    for (Idx j = 0; j < nn; ++j) {
                        const auto [xj, aj] = nodes[static_cast<std::size_t>(j)];
                        tm(i, j) = mm.kernel[xj][aj][nodes[static_cast<std::size_t>(i)].first] * beta[static_cast<std::size_t>(i)];
                    }
                if (randomize_spam) {
                    Eigen::VectorXd v(nn);
                    for (Idx i = 0; i < nn; ++i) v(i) = mm.initial_settings[nodes[static_cast<std::size_t>(i)].first] * beta[static_cast<std::size_t>(i)];
                    for (std::size_t t = 0; t < m; ++t) v = tm * v;
                    return traceless_readout(effect, rho) * v.sum() + b;
                }
                Eigen::VectorXd w = Eigen::VectorXd::Ones(nn);
                for (std::size_t t = 0; t < m; ++t) w = tm.transpose() * w;
                double acc = b;
                for (Idx i = 0; i < nn; ++i) {
                    const auto [x, a] = nodes[static_cast<std::size_t>(i)];
                    acc += w(i) * traceless_readout(effect, mm.initial_settings[x] * mm.instruments[x][a].apply(rho));
                }
                return acc;
            },
            [&](const HamiltonianCoupled& mm) {
                const CccDecomposition dec = hamiltonian_ccc_decomposition(mm.terms, mm.dt, tensor(mm.env_state, rho));
                double acc = b;
                for (std::size_t l = 0; l < dec.unitaries.size(); ++l) {
                    const double tr = std::abs(dec.unitaries[l].trace());
                    const double q = (tr * tr - 1.0) / (dd * dd - 1.0);
                    if (randomize_spam) {
                        acc += dec.weights[l] * power(q, m + 1) * traceless_readout(effect, dec.system_states[l]);
                    } else {
                        acc += dec.weights[l] * power(q, m) *
                               traceless_readout(effect, conj(dec.unitaries[l], dec.system_states[l]));
                    }
                }
                return acc;
            },
        },
        model);
}

ASFCurve analytic_curve(const NoiseModel& model, const Spam& spam, const std::vector<std::size_t>& lengths,
                        bool randomize_spam) {
    ASFCurve c;
    c.model_digest = model_digest(model);
    for (std::size_t m : lengths) c.points.push_back(CurvePoint{m, analytic_asf(model, spam, m, randomize_spam), 0.0, 0, 0});
    return c;
}

double sequence_error_rate(const CccModel& model, std::size_t m) {
    validate_model(model);
    const std::size_t d = model.branches[0].input_dim();
    const double dd = static_cast<double>(d);
    double acc = 0.0;
    for (std::size_t x = 0; x < model.branches.size(); ++x) {
        acc += model.weights[x] * power(decay_parameter(model.branches[x].choi(), d), m + 1);
    }
    return (dd - 1.0) / dd * (1.0 - acc);
}

HaarSpamCheck haar_spam_average_check(const Channel& channel, std::size_t samples, std::mt19937_64& rng) {
    const std::size_t d = channel.input_dim();
    const double dd = static_cast<double>(d);
    HaarSpamCheck out;
    out.rhs = decay_parameter(channel.choi(), d) * (1.0 - 1.0 / dd);
    if (samples == 0) return out;
    const ComplexMatrix mixed = identity(d) / dd;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const ComplexVector psi = haar_state(d, rng);
        const ComplexMatrix proj = psi * psi.adjoint();
        const double v = (psi.adjoint() * channel.apply(proj - mixed) * psi)(0, 0).real();
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(samples);
    out.lhs = sum / n;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - n * out.lhs * out.lhs) / (n - 1.0)) : 0.0;
    out.lhs_stderr = std::sqrt(var / n);
    return out;
}

}  // namespace rbcorr
