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

#include "rbcorr/worst_case.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rbcorr/channels.h"
#include "rbcorr/errors.h"
#include "rbcorr/parallel.h"
#include "rbcorr/random.h"
#include "rbcorr/rb.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;
using Mat4 = Eigen::Matrix4cd;

void check_mixing(double p, double delta) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("mixing parameter p must lie in [0, 1]");
    if (!(delta >= 0.0 && delta < std::numbers::pi / 2)) {
        throw ValidationError("rotation angle delta must lie in [0, pi/2)");
    }
}

ComplexMatrix branch_unitary(const std::vector<GateIndex>& gates, double angle) {
    const auto& group = clifford_group();
    const ComplexMatrix n = unitary_from_hamiltonian(pauli_z(), angle);
    ComplexMatrix u = identity(2);
    for (GateIndex g : gates) u = group.element(g) * n * u;
    return u;
}

// psi_{ai} with ancilla index a as the slow index.
ComplexMatrix as_square(const ComplexVector& psi, Idx d) {
    ComplexMatrix m(d, d);
    for (Idx a = 0; a < d; ++a)
        for (Idx i = 0; i < d; ++i) m(a, i) = psi(a * d + i);
    return m;
}

// H with Tr(Y O(psi)) = psi^dag H psi.
ComplexMatrix pullback(const ComplexMatrix& choi, const ComplexMatrix& y, Idx d) {
    ComplexMatrix h = ComplexMatrix::Zero(d * d, d * d);
    for (Idx b = 0; b < d; ++b)
        for (Idx j = 0; j < d; ++j)
            for (Idx a = 0; a < d; ++a)
                for (Idx i = 0; i < d; ++i) {
                    Complex acc = 0.0;
                    for (Idx k = 0; k < d; ++k)
                        for (Idx l = 0; l < d; ++l) acc += y(b * d + l, a * d + k) * choi(i * d + k, j * d + l);
                    h(b * d + j, a * d + i) = acc;
                }
    return 0.5 * (h + h.adjoint());
}

constexpr int kParams = 7;
using Vec4 = Eigen::Vector4cd;

// (Psi (x) I) J (Psi (x) I)^dag for a qubit channel, in fixed-size arithmetic.
Mat4 extended_output4(const Mat4& j, const Vec4& psi) {
    Mat4 lift = Mat4::Zero();
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) lift(a * 2 + k, i * 2 + k) = psi(a * 2 + i);
    return lift * j * lift.adjoint();
}

double trace_norm4(const Mat4& o) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(o, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

Vec4 from_params(const std::array<double, kParams>& x) {
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(x[1]);
    const double c[4] = {std::cos(x[0]), s1 * std::cos(x[1]), s1 * s2 * std::cos(x[2]), s1 * s2 * std::sin(x[2])};
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = std::polar(c[i], x[3 + i]);
    return v;
}

std::array<double, kParams> to_params(const Vec4& v) {
    std::array<double, kParams> x{};
    const double c0 = std::abs(v(0));
    const double c1 = std::abs(v(1));
    const double c2 = std::abs(v(2));
    const double c3 = std::abs(v(3));
    x[0] = std::acos(std::clamp(c0, 0.0, 1.0));
    x[1] = std::atan2(std::hypot(c2, c3), c1);
    x[2] = std::atan2(c3, c2);
    for (int i = 0; i < 4; ++i) x[3 + i] = std::arg(v(i));
    return x;
}

}  // namespace

const char* to_string(DiamondMethod m) { return m == DiamondMethod::kPrimal ? "primal" : "sdp"; }

SequenceChannel sequence_channel(const std::vector<GateIndex>& gates, double p, double delta) {
    check_mixing(p, delta);
    if (gates.empty()) throw ValidationError("sequence_channel: empty gate sequence");
    const ComplexMatrix u1 = branch_unitary(gates, delta);
    const ComplexMatrix u2 = branch_unitary(gates, -delta);
    SequenceChannel out;
    out.choi = choi_from_kraus({std::sqrt(p) * u1, std::sqrt(1.0 - p) * u2});
    out.gates = gates;
    out.p = p;
    out.delta = delta;
    return out;
}

ComplexMatrix sequence_channel_by_dilation(const std::vector<GateIndex>& gates, double p, double delta) {
    check_mixing(p, delta);
    const auto& group = clifford_group();
    ComplexVector phi(2);
    phi << std::sqrt(p), std::sqrt(1.0 - p);
    const ComplexMatrix sigma = phi * phi.adjoint();
    const ComplexMatrix coupling = unitary_from_hamiltonian(tensor(pauli_z(), pauli_z()), delta);
    ComplexMatrix total = identity(4);
    for (GateIndex g : gates) total = tensor(identity(2), group.element(g)) * coupling * total;
    ComplexMatrix choi = ComplexMatrix::Zero(4, 4);
    const std::size_t dims[] = {2, 2};
    const std::size_t env[] = {0};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const ComplexMatrix joint = total * tensor(sigma, basis_op(2, i, j)) * total.adjoint();
            choi += tensor(basis_op(2, i, j), reduce(joint, dims, env, ReduceMode::kTrace));
        }
    return choi;
}

ComplexMatrix extended_output(const ComplexMatrix& choi_delta, const ComplexVector& psi) {
    const auto d = static_cast<Idx>(std::llround(std::sqrt(static_cast<double>(choi_delta.rows()))));
    if (d * d != choi_delta.rows() || psi.size() != d * d) {
        throw DimensionError("extended_output: input must live on ancilla (x) system of the channel dimension");
    }
    const ComplexMatrix lift = tensor(as_square(psi, d), identity(static_cast<std::size_t>(d)));
    return lift * choi_delta * lift.adjoint();
}

DiamondResult diamond_primal(const ComplexMatrix& choi_delta, const PrimalOptions& options) {
    if (choi_delta.rows() != 4 || choi_delta.cols() != 4) {
        throw DimensionError("diamond_primal: expected a 4x4 Choi difference (qubit channels)");
    }
    if (!is_hermitian(choi_delta, 1e-10)) throw ValidationError("diamond_primal: Choi difference is not Hermitian");
    const Mat4 j = 0.5 * (choi_delta + choi_delta.adjoint());
    const ComplexMatrix jd = j;
    const Idx d = 2;
    auto objective = [&](const Vec4& psi) { return trace_norm4(extended_output4(j, psi)); };

    DiamondResult best;
    best.method = DiamondMethod::kPrimal;
    best.value = -1.0;
    best.restarts = options.restarts;
    std::mt19937_64 rng(options.seed);
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
        Vec4 psi = haar_state(4, rng);
        double f = objective(psi);

        // Sign / top-eigenvector ascent: f never decreases.
        for (int it = 0; it < 500; ++it) {
            Eigen::SelfAdjointEigenSolver<Mat4> es(extended_output4(j, psi));
            const Eigen::Vector4d lam = es.eigenvalues();
            ComplexMatrix y = ComplexMatrix::Zero(4, 4);
            for (Idx k = 0; k < 4; ++k) {
                const double s = lam(k) > 0 ? 1.0 : (lam(k) < 0 ? -1.0 : 0.0);
                y += s * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
            }
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> top(pullback(jd, y, d));
            const Vec4 cand = top.eigenvectors().col(3).normalized();
            const double fc = objective(cand);
            if (fc <= f + 1e-15) break;
            psi = cand;
            f = fc;
        }

        // Coordinate pattern search over the seven parameters.
        const double before_polish = f;
        std::array<double, kParams> x = to_params(psi);
        double step = 1e-2;
        std::size_t evals = 0;
        while (step > options.tolerance && evals < 3000) {
            bool improved = false;
            for (int c = 0; c < kParams; ++c) {
                for (double sgn : {1.0, -1.0}) {
                    std::array<double, kParams> trial = x;
                    trial[c] += sgn * step;
                    const double ft = objective(from_params(trial));
                    ++evals;
                    if (ft > f + 1e-15) {
                        x = trial;
                        f = ft;
                        improved = true;
                        break;
                    }
                }
            }
            step = improved ? std::min(2.0 * step, 1e-2) : 0.5 * step;
        }
        if (f > best.value) {
            best.value = f;
            best.best_input = from_params(x);
            best.gap = f - before_polish;
        }
    }
    best.value = std::clamp(best.value, 0.0, 2.0);
    return best;
}

DiamondResult diamond_sdp(const ComplexMatrix& choi_r, const ComplexMatrix& choi_id) {
    if (choi_r.rows() != 4 || choi_r.cols() != 4 || choi_id.rows() != 4 || choi_id.cols() != 4) {
        throw DimensionError("diamond_sdp: expected 4x4 Choi matrices (qubit channels)");
    }
    const Mat4 jd = (0.5 * ((choi_r - choi_id) + (choi_r - choi_id).adjoint())).eval();
    const Complex i1(0.0, 1.0);

    // Variables z = (x_0..x_15, r_1..r_3): X = sum x_k B_k, rho = (I + r.sigma)/2.
    constexpr int kX = 16;
    constexpr int kN = 19;
    std::array<Mat4, kX> basis;
    int idx = 0;
    for (int a = 0; a < 4; ++a) {
        basis[idx] = Mat4::Zero();
        basis[idx](a, a) = 1.0;
        ++idx;
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            basis[idx] = Mat4::Zero();
            basis[idx](a, b) = 1.0;
            basis[idx](b, a) = 1.0;
            ++idx;
            basis[idx] = Mat4::Zero();
            basis[idx](a, b) = -i1;
            basis[idx](b, a) = i1;
            ++idx;
        }
    const ComplexMatrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
    std::array<Mat4, kN> a_minus;  // derivatives of F1 = 2 rho(x)I - X
    std::array<Mat4, kN> a_plus;   // derivatives of F2 = 2 rho(x)I + X
    for (int k = 0; k < kX; ++k) {
        a_minus[k] = -basis[k];
        a_plus[k] = basis[k];
    }
    for (int k = 0; k < 3; ++k) {
        const Mat4 lifted = tensor(paulis[k], identity(2));
        a_minus[kX + k] = lifted;
        a_plus[kX + k] = lifted;
    }
    Eigen::Matrix<double, kN, 1> c = Eigen::Matrix<double, kN, 1>::Zero();
    for (int k = 0; k < kX; ++k) c(k) = -0.5 * (basis[k] * jd).trace().real();

    using Vec = Eigen::Matrix<double, kN, 1>;
    auto build = [&](const Vec& z, Mat4& f1, Mat4& f2) {
        f1 = Mat4::Identity();
        f2 = Mat4::Identity();
        for (int k = 0; k < kN; ++k) {
            f1 += z(k) * a_minus[k];
            f2 += z(k) * a_plus[k];
        }
    };
    auto log_det = [](const Mat4& f, bool& ok) {
        Eigen::LLT<Mat4> llt(f);
        ok = llt.info() == Eigen::Success;
        if (!ok) return 0.0;
        double s = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double v = llt.matrixLLT()(k, k).real();
            if (!(v > 0.0)) {
                ok = false;
                return 0.0;
            }
            s += std::log(v);
        }
        return 2.0 * s;
    };
    auto barrier = [&](const Vec& z, double t, bool& ok) {
        Mat4 f1, f2;
        build(z, f1, f2);
        bool ok1, ok2;
        const double l1 = log_det(f1, ok1);
        const double l2 = log_det(f2, ok2);
        ok = ok1 && ok2;
        return t * c.dot(z) - l1 - l2;
    };

    Vec z = Vec::Zero();
    double t = 1.0;
    constexpr double kNu = 8.0;
    constexpr double kMu = 10.0;
    bool converged = true;
    std::size_t newton_total = 0;
    while (true) {
        for (int it = 0; it < 200; ++it) {
            Mat4 f1, f2;
            build(z, f1, f2);
            const Mat4 g1 = f1.llt().solve(Mat4::Identity());
            const Mat4 g2 = f2.llt().solve(Mat4::Identity());
            std::array<Mat4, kN> p1, p2;
            Vec grad = t * c;
            for (int k = 0; k < kN; ++k) {
                p1[k] = g1 * a_minus[k];
                p2[k] = g2 * a_plus[k];
                grad(k) -= p1[k].trace().real() + p2[k].trace().real();
            }
            Eigen::Matrix<double, kN, kN> hess;
            for (int k = 0; k < kN; ++k)
                for (int l = k; l < kN; ++l) {
                    const double v = (p1[k] * p1[l]).trace().real() + (p2[k] * p2[l]).trace().real();
                    hess(k, l) = v;
                    hess(l, k) = v;
                }
            const Vec dz = -hess.ldlt().solve(grad);
            const double decrement = -grad.dot(dz);
            ++newton_total;
            if (!(decrement >= 0.0) || decrement / 2.0 < 1e-11) break;
            bool ok;
            const double phi0 = barrier(z, t, ok);
            double s = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
                const double phi = barrier(z + s * dz, t, ok);
                if (ok && phi < phi0 && phi <= phi0 - 0.25 * s * decrement) {
                    accepted = s > 1e-9;
                    break;
                }
            }
            if (!accepted) {
                // Rounding floor: no step decreases the barrier. Only a large
                // remaining decrement means the centering actually failed.
                if (decrement / 2.0 > 1e-6) converged = false;
                break;
            }
            z += s * dz;
            if (it == 199) converged = false;
        }
        if (kNu / t < 1e-7) break;
        t *= kMu;
    }

    Mat4 x = Mat4::Zero();
    for (int k = 0; k < kX; ++k) x += z(k) * basis[k];
    DiamondResult out;
    out.method = DiamondMethod::kSdp;
    out.value = std::clamp(0.5 * (x * jd).trace().real(), 0.0, 2.0);
    out.gap = kNu / t;
    out.converged = converged;
    out.restarts = newton_total;
    return out;
}

ComplexMatrix PerturbativeTerms::combine(double p, double delta) const {
    const Complex i1(0.0, 1.0);
    return i1 * (2.0 * p - 1.0) * delta * first - delta * delta * second;
}

PerturbativeTerms perturbative_expansion(const std::vector<GateIndex>& gates, const ComplexMatrix& chi) {
    if (chi.rows() != 4 || chi.cols() != 4) throw DimensionError("perturbative_expansion: chi must be 4x4");
    if (!is_hermitian(chi, 1e-10) || std::abs(chi.trace().real() - 1.0) > 1e-10 ||
        min_eigenvalue(0.5 * (chi + chi.adjoint())) < -1e-10) {
        throw ValidationError("perturbative_expansion: chi is not a density matrix");
    }
    if (gates.empty()) throw ValidationError("perturbative_expansion: empty gate sequence");
    const auto& group = clifford_group();
    // P_0 = Z, P_j = K_j^dag Z K_j with K_j the product of the first j gates;
    // the final inverting gate contributes no noise term of its own.
    std::vector<ComplexMatrix> ps{pauli_z()};
    ComplexMatrix k = identity(2);
    for (std::size_t j = 0; j + 1 < gates.size(); ++j) {
        k = group.element(gates[j]) * k;
        ps.push_back(k.adjoint() * pauli_z() * k);
    }
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    for (const auto& p : ps) s += p;
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    for (std::size_t a = 0; a < ps.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) t += ps[a] * ps[b];
    const ComplexMatrix is = tensor(identity(2), s);
    const ComplexMatrix it = tensor(identity(2), t);
    PerturbativeTerms out;
    out.first = chi * is - is * chi;
    out.second = static_cast<double>(ps.size()) * chi + it * chi + chi * it.adjoint() - is * chi * is;
    return out;
}

ComplexMatrix exact_difference(const std::vector<GateIndex>& gates, double p, double delta, const ComplexMatrix& chi) {
    check_mixing(p, delta);
    const ComplexMatrix u1 = tensor(identity(2), branch_unitary(gates, delta));
    const ComplexMatrix u2 = tensor(identity(2), branch_unitary(gates, -delta));
    return p * u1 * chi * u1.adjoint() + (1.0 - p) * u2 * chi * u2.adjoint() - chi;
}

std::vector<SweepRow> mixing_sweep(const std::vector<std::size_t>& lengths, const std::vector<double>& p_grid,
                                   double delta, const SweepOptions& options) {
    if (lengths.empty() || p_grid.empty()) throw ValidationError("mixing_sweep: empty length or p grid");
    for (double p : p_grid) check_mixing(p, delta);
    if (options.sequences == 0) throw ValidationError("mixing_sweep: need at least one sequence");
    const std::size_t ns = options.sequences;
    const std::size_t np = p_grid.size();
    struct Cell {
        double value = 0.0;
        double gap = 0.0;
        bool failed = false;
        bool used_primal = false;
    };
    std::vector<Cell> cells(lengths.size() * ns * np);
    const ComplexMatrix id_choi = max_entangled_projector(2);
    parallel_for(lengths.size() * ns, std::max<std::size_t>(1, options.threads), [&](std::size_t task) {
        const std::size_t li = task / ns;
        const std::size_t j = task % ns;
        std::mt19937_64 rng = make_stream(options.seed, lengths[li], j);
        const Sequence seq = generate_sequence(lengths[li], rng);
        for (std::size_t pi = 0; pi < np; ++pi) {
            Cell& cell = cells[task * np + pi];
            const ComplexMatrix choi = sequence_channel(seq.gates, p_grid[pi], delta).choi;
            std::optional<double> primal;
            if (options.cross_check) primal = diamond_primal(choi - id_choi).value;
            try {
                const DiamondResult r = diamond_sdp(choi, id_choi);
                if (!r.converged) throw ConvergenceError("sdp did not converge");
                cell.value = r.value;
                if (primal) cell.gap = std::abs(r.value - *primal);
            } catch (const std::exception&) {
                cell.failed = true;
                cell.used_primal = true;
                cell.value = primal ? *primal : diamond_primal(choi - id_choi).value;
            }
        }
    });

    std::vector<SweepRow> rows;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        for (std::size_t pi = 0; pi < np; ++pi) {
            SweepRow row;
            row.length = lengths[li];
            row.p = p_grid[pi];
            row.delta = delta;
            row.sequences = ns;
            double sum = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const Cell& cell = cells[(li * ns + j) * np + pi];
                sum += cell.value;
                row.failures += cell.failed ? 1 : 0;
                row.max_method_gap = std::max(row.max_method_gap, cell.gap);
                if (cell.used_primal) row.method = DiamondMethod::kPrimal;
            }
            row.mean = sum / static_cast<double>(ns);
            double var = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const double v = cells[(li * ns + j) * np + pi].value - row.mean;
                var += v * v;
            }
            row.std_error = ns > 1 ? std::sqrt(var / static_cast<double>(ns - 1) / static_cast<double>(ns)) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ScalingFit> delta_scaling_fit(const std::vector<SweepRow>& rows) {
    std::map<double, std::vector<std::pair<double, double>>> by_p;
    for (const auto& r : rows) {
        if (r.delta > 0.0 && r.mean > 0.0) by_p[r.p].emplace_back(std::log(r.delta), std::log(r.mean));
    }
    std::vector<ScalingFit> out;
    for (const auto& [p, pts] : by_p) {
        if (pts.size() < 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(pts.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        out.push_back(ScalingFit{p, slope, (sy - slope * sx) / n});
    }
    return out;
}

}  // namespace rbcorr
