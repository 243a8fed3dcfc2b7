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

#include "rbcorr/noise.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "rbcorr/errors.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_distribution(const std::vector<double>& p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= -1e-12)) throw ValidationError(what + ": negative or NaN probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw ValidationError(what + ": probabilities sum to " + std::to_string(sum));
}

double entangled_overlap(const ComplexMatrix& choi, std::size_t d) {
    Complex acc = 0.0;
    const auto dd = static_cast<Idx>(d);
    for (Idx i = 0; i < dd; ++i)
        for (Idx j = 0; j < dd; ++j) acc += choi(i * dd + i, j * dd + j);
    return acc.real();
}

class Renderer {
  public:
    void text(const std::string& s) {
        out_ += s;
        out_ += ';';
    }
    void number(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g,", x);
        out_ += buf;
    }
    void matrix(const ComplexMatrix& m) {
        number(static_cast<double>(m.rows()));
        number(static_cast<double>(m.cols()));
        for (Idx r = 0; r < m.rows(); ++r)
            for (Idx c = 0; c < m.cols(); ++c) {
                number(m(r, c).real());
                number(m(r, c).imag());
            }
        out_ += ';';
    }
    const std::string& str() const { return out_; }

  private:
    std::string out_;
};

}  // namespace

const char* model_class(const NoiseModel& model) {
    return std::visit(Overloaded{
                          [](const TimeDependentMarkovian&) { return "markovian"; },
                          [](const CccModel&) { return "ccc"; },
                          [](const CffModel&) { return "cff"; },
                          [](const HamiltonianCoupled&) { return "hamiltonian"; },
                      },
                      model);
}

std::size_t system_dim(const NoiseModel& model) {
    return std::visit(Overloaded{
                          [](const TimeDependentMarkovian& m) -> std::size_t {
                              return m.channels.empty() ? 0 : m.channels[0].input_dim();
                          },
                          [](const CccModel& m) -> std::size_t {
                              return m.branches.empty() ? 0 : m.branches[0].input_dim();
                          },
                          [](const CffModel& m) -> std::size_t {
                              return m.instruments.empty() || m.instruments[0].empty()
                                         ? 0
                                         : m.instruments[0][0].input_dim();
                          },
                          [](const HamiltonianCoupled& m) -> std::size_t {
                              return m.terms.empty() ? 0 : static_cast<std::size_t>(m.terms[0].sys.rows());
                          },
                      },
                      model);
}

void validate_model(const NoiseModel& model) {
    const std::size_t d = system_dim(model);
    if (d == 0) throw ValidationError("noise model is empty");
    std::visit(
        Overloaded{
            [d](const TimeDependentMarkovian& m) {
                for (const auto& ch : m.channels) {
                    if (ch.input_dim() != d || ch.output_dim() != d) throw DimensionError("markovian: channel dimensions differ");
                    require_cptp(ch.choi(), d, d, "markovian channel");
                }
            },
            [d](const CccModel& m) {
                if (m.weights.size() != m.branches.size()) throw DimensionError("ccc: weights and branches differ in length");
                check_distribution(m.weights, "ccc weights");
                for (const auto& ch : m.branches) {
                    if (ch.input_dim() != d || ch.output_dim() != d) throw DimensionError("ccc: branch dimensions differ");
                    require_cptp(ch.choi(), d, d, "ccc branch");
                }
            },
            [d](const CffModel& m) {
                const std::size_t nx = m.instruments.size();
                if (m.initial_settings.size() != nx) throw DimensionError("cff: initial_settings size differs from instrument count");
                check_distribution(m.initial_settings, "cff initial settings");
                if (m.kernel.size() != nx) throw DimensionError("cff: kernel must have one block per setting");
                for (std::size_t x = 0; x < nx; ++x) {
                    const auto& inst = m.instruments[x];
                    if (inst.empty()) throw ValidationError("cff: empty instrument");
                    ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Idx>(d * d), static_cast<Idx>(d * d));
                    for (const auto& e : inst) {
                        if (e.input_dim() != d || e.output_dim() != d) throw DimensionError("cff: instrument dimensions differ");
                        if (!is_completely_positive(e.choi())) throw ValidationError("cff: instrument element is not CP");
                        sum += e.choi();
                    }
                    require_cptp(sum, d, d, "cff instrument");
                    if (m.kernel[x].size() != inst.size()) throw DimensionError("cff: kernel needs one row per outcome");
                    for (const auto& row : m.kernel[x]) {
                        if (row.size() != nx) throw DimensionError("cff: kernel row must cover every setting");
                        check_distribution(row, "cff kernel row");
                    }
                }
            },
            [d](const HamiltonianCoupled& m) {
                const ComplexMatrix h = joint_hamiltonian(m.terms);
                (void)h;
                const Idx de = m.terms[0].env.rows();
                if (m.env_state.rows() != de || m.env_state.cols() != de) {
                    throw DimensionError("hamiltonian: environment state has the wrong dimension");
                }
                if (!is_hermitian(m.env_state, 1e-10) || std::abs(m.env_state.trace().real() - 1.0) > 1e-10 ||
                    min_eigenvalue(0.5 * (m.env_state + m.env_state.adjoint())) < -1e-10) {
                    throw ValidationError("hamiltonian: environment state is not a density matrix");
                }
                if (!std::isfinite(m.dt)) throw ValidationError("hamiltonian: dt must be finite");
                (void)d;
            },
        },
        model);
}

std::string model_digest(const NoiseModel& model) {
    Renderer r;
    r.text(model_class(model));
    std::visit(Overloaded{
                   [&r](const TimeDependentMarkovian& m) {
                       for (const auto& ch : m.channels) r.matrix(ch.choi());
                   },
                   [&r](const CccModel& m) {
                       for (double w : m.weights) r.number(w);
                       for (const auto& ch : m.branches) r.matrix(ch.choi());
                   },
                   [&r](const CffModel& m) {
                       for (double w : m.initial_settings) r.number(w);
                       for (const auto& inst : m.instruments) {
                           r.text("instrument");
                           for (const auto& e : inst) r.matrix(e.choi());
                       }
                       for (const auto& block : m.kernel)
                           for (const auto& row : block)
                               for (double p : row) r.number(p);
                   },
                   [&r](const HamiltonianCoupled& m) {
                       r.number(m.dt);
                       for (const auto& t : m.terms) {
                           r.matrix(t.env);
                           r.matrix(t.sys);
                       }
                       r.matrix(m.env_state);
                   },
               },
               model);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : r.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

double decay_parameter(const ComplexMatrix& choi, std::size_t d) {
    require_cptp(choi, d, d, "decay_parameter");
    const double dd = static_cast<double>(d);
    return (entangled_overlap(choi, d) - 1.0) / (dd * dd - 1.0);
}

double cff_beta(const ComplexMatrix& choi, std::size_t d) {
    const auto n = static_cast<Idx>(d * d);
    if (choi.rows() != n || choi.cols() != n) throw DimensionError("cff_beta: Choi matrix must be d^2 x d^2");
    if (!is_completely_positive(choi)) throw ValidationError("cff_beta: element has a negative eigenvalue");
    const double dd = static_cast<double>(d);
    return (entangled_overlap(choi, d) - choi.trace().real() / dd) / (dd * dd - 1.0);
}

double cff_tau(const ComplexMatrix& choi, std::size_t d) { return choi.trace().real() / static_cast<double>(d); }

namespace {

ComplexMatrix decomposition_state(const HamiltonianCoupled& model) {
    const auto d = static_cast<std::size_t>(model.terms[0].sys.rows());
    return tensor(model.env_state, identity(d) / static_cast<double>(d));
}

}  // namespace

std::vector<BranchDecay> branch_decays(const HamiltonianCoupled& model) {
    const CccDecomposition dec = hamiltonian_ccc_decomposition(model.terms, model.dt, decomposition_state(model));
    const double d = static_cast<double>(model.terms[0].sys.rows());
    std::vector<BranchDecay> out;
    for (std::size_t l = 0; l < dec.unitaries.size(); ++l) {
        const double tr = std::abs(dec.unitaries[l].trace());
        out.push_back(BranchDecay{dec.weights[l], (tr * tr - 1.0) / (d * d - 1.0)});
    }
    return out;
}

CccModel to_ccc(const HamiltonianCoupled& model) {
    const CccDecomposition dec = hamiltonian_ccc_decomposition(model.terms, model.dt, decomposition_state(model));
    CccModel out;
    out.weights = dec.weights;
    for (const auto& u : dec.unitaries) out.branches.push_back(unitary_channel(u));
    return out;
}

BlindnessReport blindness_check(const HamiltonianCoupled& model, double tolerance) {
    const CccDecomposition dec = hamiltonian_ccc_decomposition(model.terms, model.dt, decomposition_state(model));
    const auto d = static_cast<std::size_t>(model.terms[0].sys.rows());
    BlindnessReport rep;
    rep.tolerance = tolerance;
    rep.weights = dec.weights;
    const double t = model.dt;
    for (std::size_t l = 0; l < dec.eigenvalues.size(); ++l) {
        ComplexMatrix hs = ComplexMatrix::Zero(static_cast<Idx>(d), static_cast<Idx>(d));
        for (std::size_t x = 0; x < model.terms.size(); ++x) hs += dec.eigenvalues[l][x] * model.terms[x].sys;
        const RealVector e = hermitian_eigenvalues(hs);
        std::vector<double> spec(e.data(), e.data() + e.size());
        double c = 0.0;
        for (std::size_t m = 0; m < spec.size(); ++m)
            for (std::size_t n = 0; n < m; ++n) c += std::cos(t * (spec[m] - spec[n]));
        rep.spectra.push_back(spec);
        rep.cosine_sums.push_back(c);
        if (d == 2) rep.gaps.push_back(spec[0] - spec[1]);
        const double tr = std::abs(dec.unitaries[l].trace());
        const double dd = static_cast<double>(d);
        rep.decays.push_back((tr * tr - 1.0) / (dd * dd - 1.0));
    }
    double spread = 0.0;
    for (double a : rep.cosine_sums)
        for (double b : rep.cosine_sums) spread = std::max(spread, std::abs(a - b));
    rep.is_blind = spread <= tolerance;

    if (d == 2) {
        const double angle_tol = std::sqrt(2.0 * tolerance);
        auto on_lattice = [&](double g) {
            const double phase = t * g / (2.0 * std::numbers::pi);
            return std::abs(phase - std::round(phase)) * 2.0 * std::numbers::pi <= angle_tol;
        };
        rep.gap_condition = true;
        for (double a : rep.gaps)
            for (double b : rep.gaps) rep.gap_condition = rep.gap_condition && (on_lattice(a - b) || on_lattice(a + b));
    }
    return rep;
}

WitnessVerdict memory_witness(const FitResult& fit, const ASFCurve& curve, double sigmas) {
    WitnessVerdict v;
    for (std::size_t i = 0; i < fit.exponents.size(); ++i) {
        const double q = fit.exponents[i];
        v.max_exponent = i == 0 ? q : std::max(v.max_exponent, q);
        const double se = i < fit.exponent_stderr.size() ? fit.exponent_stderr[i] : 0.0;
        if (q > 1.0 + sigmas * se + 1e-12) {
            v.exponent_above_one = true;
            char buf[96];
            std::snprintf(buf, sizeof buf, "exponent %.6g exceeds 1 by more than %.3g sigma", q, sigmas);
            v.reasons.emplace_back(buf);
        }
    }
    std::vector<CurvePoint> pts = curve.points;
    std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.m < b.m; });
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double rise = pts[i + 1].mean - pts[i].mean;
        const double se = std::hypot(pts[i].std_error, pts[i + 1].std_error);
        if (rise > sigmas * se + 1e-12) {
            v.non_monotone = true;
            v.increasing_at.push_back(pts[i].m);
        }
    }
    if (v.non_monotone) {
        v.reasons.push_back("curve increases significantly at " + std::to_string(v.increasing_at.size()) +
                            " adjacent length pair(s)");
    }
    v.witness = v.exponent_above_one || v.non_monotone;
    return v;
}

}  // namespace rbcorr
