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

#include "rbcorr/fitting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rbcorr/errors.h"
#include "rbcorr/random.h"

namespace rbcorr {

namespace {

using Idx = Eigen::Index;

constexpr std::size_t kMaxIterations = 200;
constexpr double kOffsetWindow = 1e-3;
constexpr double kImagCutoff = 1e-6;

double exponent_of(double m, ExponentConvention c) {
    return c == ExponentConvention::kMPlusOne ? m + 1.0 : m;
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

ASFCurve with_values(const ASFCurve& curve, const std::vector<double>& values) {
    ASFCurve out = curve;
    for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].mean = values[i];
    return out;
}

struct LmState {
    double a, q, b;
};

double clamp_decay(double q) { return std::clamp(q, -1.0 + 1e-9, 1.5); }

double cost_of(const LmState& s, const std::vector<double>& e, const std::vector<double>& y) {
    double c = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double r = y[j] - (s.a * std::pow(s.q, e[j]) + s.b);
        c += r * r;
    }
    return c;
}

SingleExponentialFit fit_single_core(const std::vector<double>& e, const std::vector<double>& y) {
    SingleExponentialFit fit;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double scale = std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
    if (*hi - *lo <= 1e-12 * scale) {
        fit.amplitude = 0.0;
        fit.decay = 1.0;
        fit.offset = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        fit.degenerate = true;
        fit.converged = true;
        return fit;
    }

    // Start from the best point of a profiled grid: for fixed q the model is
    // linear in (A, B). The grid also covers q > 1 so growing data is reachable.
    LmState s{*hi - *lo, 0.9, *lo};
    {
        std::vector<double> grid;
        for (int k = 0; k <= 250; ++k) grid.push_back(-0.99 + 2.49 * k / 250.0);
        for (int k = 0; k <= 400; ++k) grid.push_back(0.8 + 0.4 * k / 400.0);
        double best = std::numeric_limits<double>::infinity();
        for (double q : grid) {
            if (std::abs(q - 1.0) < 1e-9) continue;
            Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
            Eigen::Vector2d aty = Eigen::Vector2d::Zero();
            for (std::size_t j = 0; j < y.size(); ++j) {
                const Eigen::Vector2d g(std::pow(q, e[j]), 1.0);
                ata += g * g.transpose();
                aty += g * y[j];
            }
            const Eigen::Vector2d ab = ata.ldlt().solve(aty);
            const LmState trial{ab(0), q, ab(1)};
            const double c = cost_of(trial, e, y);
            if (std::isfinite(c) && c < best) {
                best = c;
                s = trial;
            }
        }
    }

    double cost = cost_of(s, e, y);
    LmState best = s;
    double best_cost = cost;
    double lambda = 1e-3;
    std::size_t it = 0;
    bool converged = false;
    for (; it < kMaxIterations; ++it) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double qe = std::pow(s.q, e[j]);
            const double r = y[j] - (s.a * qe + s.b);
            const double dq = e[j] == 0.0 ? 0.0 : s.a * e[j] * std::pow(s.q, e[j] - 1.0);
            const Eigen::Vector3d g(qe, dq, 1.0);
            jtj += g * g.transpose();
            jtr += g * r;
        }
        bool accepted = false;
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
            Eigen::Matrix3d damped = jtj;
            for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-30);
            const Eigen::Vector3d step = damped.ldlt().solve(jtr);
            LmState trial{s.a + step(0), clamp_decay(s.q + step(1)), s.b + step(2)};
            const double trial_cost = cost_of(trial, e, y);
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const double rel_step = step.norm() / (std::abs(s.a) + std::abs(s.q) + std::abs(s.b) + 1e-300);
                const double dcost = cost - trial_cost;
                s = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-15);
                accepted = true;
                if (rel_step < 1e-13 || dcost <= 1e-16 * (cost + 1e-300) || cost < 1e-30) converged = true;
            } else {
                lambda *= 4.0;
            }
        }
        if (cost < best_cost) {
            best = s;
            best_cost = cost;
        }
        if (!accepted) {
            // No downhill step at any damping: stationary to working precision.
            converged = true;
        }
        if (converged) break;
    }
    fit.amplitude = best.a;
    fit.decay = best.q;
    fit.offset = best.b;
    fit.iterations = it;
    fit.converged = converged;
    return fit;
}

std::vector<Complex> esprit_eigs(const HankelView& view, std::size_t order) {
    const Eigen::MatrixXd& y = view.matrix;
    const auto l = y.rows();
    if (order == 0 || static_cast<Idx>(order) >= l) {
        throw ValidationError("esprit_exponents: order must satisfy 0 < order < window");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU);
    const Eigen::MatrixXd us = svd.matrixU().leftCols(static_cast<Idx>(order));
    const Eigen::MatrixXd j1 = us.topRows(l - 1);
    const Eigen::MatrixXd j2 = us.bottomRows(l - 1);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j1);
    if (qr.rank() < static_cast<Idx>(order)) {
        throw ValidationError("esprit_exponents: shifted signal subspace is rank deficient");
    }
    const Eigen::MatrixXd phi = qr.solve(j2);
    Eigen::EigenSolver<Eigen::MatrixXd> es(phi, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("esprit_exponents: eigen solver failed");
    std::vector<Complex> out;
    for (Idx i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

}  // namespace

const char* to_string(ExponentConvention c) { return c == ExponentConvention::kM ? "m" : "m+1"; }

ExponentConvention parse_convention(const std::string& s) {
    if (s == "m") return ExponentConvention::kM;
    if (s == "m+1") return ExponentConvention::kMPlusOne;
    throw ValidationError("unknown exponent convention '" + s + "' (expected \"m\" or \"m+1\")");
}

FitQuality fit_quality(const std::vector<double>& data, const std::vector<double>& fitted,
                       std::size_t n_params) {
    if (data.size() != fitted.size()) throw DimensionError("fit_quality: series lengths differ");
    const std::size_t n = data.size();
    if (n <= n_params + 1) {
        throw ValidationError("fit_quality: need more than n_params + 1 points");
    }
    const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(n);
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sse += (data[i] - fitted[i]) * (data[i] - fitted[i]);
        sst += (data[i] - mean) * (data[i] - mean);
    }
    FitQuality q;
    q.rmse = std::sqrt(sse / static_cast<double>(n));
    double r2;
    if (sst > 0.0) {
        r2 = 1.0 - sse / sst;
    } else {
        r2 = sse == 0.0 ? 1.0 : 0.0;
    }
    const double dn = static_cast<double>(n);
    q.adjusted_r2 = 1.0 - (1.0 - r2) * (dn - 1.0) / (dn - static_cast<double>(n_params) - 1.0);
    return q;
}

SingleExponentialFit fit_single_exponential(const ASFCurve& curve, ExponentConvention convention,
                                            std::size_t bootstrap, std::uint64_t seed) {
    std::vector<double> e;
    std::vector<double> y;
    for (const auto& p : curve.points) {
        e.push_back(exponent_of(static_cast<double>(p.m), convention));
        y.push_back(p.mean);
    }
    std::vector<double> sorted = e;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 4) {
        throw ValidationError("fit_single_exponential: need at least 4 distinct lengths");
    }
    SingleExponentialFit fit = fit_single_core(e, y);
    fit.convention = convention;

    std::vector<double> fitted(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        fitted[j] = fit.amplitude * std::pow(fit.decay, e[j]) + fit.offset;
    }
    fit.quality = fit_quality(y, fitted, 3);

    if (bootstrap > 0 && !fit.degenerate) {
        std::mt19937_64 rng(derive_seed(seed, 0x51e));
        std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
        std::vector<double> qs;
        std::vector<double> ys(y.size());
        for (std::size_t b = 0; b < bootstrap; ++b) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                const std::size_t r = pick(rng);
                ys[j] = fitted[j] + (y[r] - fitted[r]);
            }
            qs.push_back(fit_single_core(e, ys).decay);
        }
        fit.decay_stderr = sample_std(qs);
    }
    return fit;
}

HankelView hankel_view(const ASFCurve& curve, std::size_t window) {
    const std::size_t n = curve.points.size();
    if (n < 4) throw ValidationError("hankel_view: need at least 4 points");
    HankelView v;
    v.first_length = curve.points[0].m;
    if (curve.points[1].m <= curve.points[0].m) {
        throw ValidationError("hankel_view: lengths must be strictly increasing");
    }
    v.stride = curve.points[1].m - curve.points[0].m;
    for (std::size_t i = 1; i < n; ++i) {
        if (curve.points[i].m != curve.points[i - 1].m + v.stride) {
            throw ValidationError("hankel_view: lengths must be uniformly spaced");
        }
    }
    v.y = curve.means();
    v.window = window == 0 ? n / 2 : window;
    if (v.window < 2 || v.window >= n) throw ValidationError("hankel_view: window out of range");
    const auto l = static_cast<Idx>(v.window);
    const auto cols = static_cast<Idx>(n) - l + 1;
    v.matrix.resize(l, cols);
    for (Idx i = 0; i < l; ++i)
        for (Idx j = 0; j < cols; ++j) v.matrix(i, j) = v.y[static_cast<std::size_t>(i + j)];
    return v;
}

RealVector hankel_singular_spectrum(const ASFCurve& curve) {
    const HankelView v = hankel_view(curve);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.matrix);
    return svd.singularValues();
}

std::size_t select_model_order(const RealVector& s, OrderMethod method, std::size_t manual) {
    if (method == OrderMethod::kManual) return manual;
    if (s.size() < 2) throw ValidationError("select_model_order: need at least 2 singular values");
    const double floor = std::max(s(0), 1e-300) * 1e-17;
    std::size_t best = 1;
    double best_drop = -std::numeric_limits<double>::infinity();
    const Idx last = std::min<Idx>(s.size() - 1, 4);
    for (Idx i = 0; i < last; ++i) {
        const double drop = std::log10(std::max(s(i), floor)) - std::log10(std::max(s(i + 1), floor));
        if (drop > best_drop) {
            best_drop = drop;
            best = static_cast<std::size_t>(i + 1);
        }
    }
    return best;
}

EspritExponents esprit_exponents(const ASFCurve& curve, std::size_t order) {
    const HankelView view = hankel_view(curve);
    EspritExponents out;
    out.raw = esprit_eigs(view, order);
    const double inv_stride = 1.0 / static_cast<double>(view.stride);
    std::vector<double> real_q;
    for (const Complex& z : out.raw) {
        out.max_imag = std::max(out.max_imag, std::abs(z.imag()));
        if (std::abs(z.imag()) > kImagCutoff) {
            out.rejected.push_back(z);
            continue;
        }
        const double zr = z.real();
        double q;
        if (view.stride == 1 || zr > 0.0) {
            q = zr > 0.0 ? std::pow(zr, inv_stride) : zr;
        } else if (view.stride % 2 == 1) {
            q = -std::pow(-zr, inv_stride);
        } else {
            out.rejected.push_back(z);
            continue;
        }
        real_q.push_back(q);
    }
    // The exponent closest to 1 (within the window) carries the offset.
    std::size_t offset_at = real_q.size();
    double closest = kOffsetWindow;
    for (std::size_t i = 0; i < real_q.size(); ++i) {
        const double gap = std::abs(real_q[i] - 1.0);
        if (gap < closest) {
            closest = gap;
            offset_at = i;
        }
    }
    for (std::size_t i = 0; i < real_q.size(); ++i) {
        if (i == offset_at) {
            out.has_offset = true;
        } else {
            out.decays.push_back(real_q[i]);
        }
    }
    std::sort(out.decays.begin(), out.decays.end());
    return out;
}

AmplitudeSolution solve_amplitudes(const ASFCurve& curve, const std::vector<double>& decays,
                                   bool with_offset, ExponentConvention convention) {
    for (std::size_t i = 0; i < decays.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(decays[i] - decays[j]) < 1e-14) {
                throw ValidationError("solve_amplitudes: exponents are not distinct");
            }
        }
    }
    const auto n = static_cast<Idx>(curve.points.size());
    const auto k = static_cast<Idx>(decays.size());
    const Idx cols = k + (with_offset ? 1 : 0);
    if (cols == 0) throw ValidationError("solve_amplitudes: nothing to solve for");
    if (n < cols) throw ValidationError("solve_amplitudes: fewer data points than unknowns");
    Eigen::MatrixXd v(n, cols);
    Eigen::VectorXd y(n);
    for (Idx r = 0; r < n; ++r) {
        const double e = exponent_of(static_cast<double>(curve.points[static_cast<std::size_t>(r)].m), convention);
        for (Idx c = 0; c < k; ++c) v(r, c) = std::pow(decays[static_cast<std::size_t>(c)], e);
        if (with_offset) v(r, k) = 1.0;
        y(r) = curve.points[static_cast<std::size_t>(r)].mean;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd coef = svd.solve(y);
    AmplitudeSolution out;
    const auto& sv = svd.singularValues();
    out.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                   : std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (Idx c = 0; c < k; ++c) {
        out.amplitudes.push_back(coef(c));
        total += coef(c);
    }
    out.offset = with_offset ? coef(k) : 0.0;
    if (std::abs(total) > 1e-300) {
        for (double a : out.amplitudes) out.weights.push_back(a / total);
    }
    return out;
}

std::vector<double> FitResult::evaluate(const std::vector<double>& lengths) const {
    std::vector<double> out;
    out.reserve(lengths.size());
    for (double m : lengths) {
        const double e = exponent_of(m, convention);
        double v = offset;
        for (std::size_t i = 0; i < exponents.size(); ++i) v += amplitudes[i] * std::pow(exponents[i], e);
        out.push_back(v);
    }
    return out;
}

namespace {

FitResult esprit_once(const ASFCurve& curve, const RealVector& svals, std::size_t order,
                      ExponentConvention convention) {
    FitResult r;
    r.convention = convention;
    r.singular_values = svals;
    r.order = order;
    const EspritExponents ex = esprit_exponents(curve, order);
    r.rejected = ex.rejected;
    if (!ex.rejected.empty()) r.flags.push_back("complex_eigenvalues_excluded");
    if (ex.decays.empty()) {
        r.degenerate = true;
        r.flags.push_back("degenerate_no_decay");
    }
    if (ex.decays.empty() && !ex.has_offset) {
        r.offset = std::accumulate(curve.points.begin(), curve.points.end(), 0.0,
                                   [](double acc, const CurvePoint& p) { return acc + p.mean; }) /
                   static_cast<double>(curve.points.size());
        return r;
    }
    const AmplitudeSolution amp = solve_amplitudes(curve, ex.decays, ex.has_offset, convention);
    r.exponents = ex.decays;
    r.amplitudes = amp.amplitudes;
    r.offset = amp.offset;
    r.weights = amp.weights;
    r.condition_number = amp.condition_number;
    return r;
}

}  // namespace

FitResult fit_esprit(const ASFCurve& curve, const EspritOptions& options) {
    const RealVector svals = hankel_singular_spectrum(curve);
    std::size_t order = select_model_order(svals, options.method, options.manual_order);
    const std::size_t window = curve.points.size() / 2;
    if (order >= window) throw ValidationError("fit_esprit: model order must be below the Hankel window");
    FitResult r = esprit_once(curve, svals, order, options.convention);

    const std::vector<double> lengths = curve.lengths();
    const std::vector<double> y = curve.means();
    const std::vector<double> fitted = r.evaluate(lengths);
    const std::size_t n_params = 2 * r.exponents.size() + 1;
    if (y.size() > n_params + 1) {
        const FitQuality q = fit_quality(y, fitted, n_params);
        r.rmse = q.rmse;
        r.adjusted_r2 = q.adjusted_r2;
    } else {
        double sse = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        r.rmse = std::sqrt(sse / static_cast<double>(y.size()));
        r.adjusted_r2 = std::numeric_limits<double>::quiet_NaN();
        r.flags.push_back("too_few_points_for_adjusted_r2");
    }

    if (options.bootstrap > 0 && !r.exponents.empty()) {
        std::mt19937_64 rng(derive_seed(options.seed, 0xe5b));
        std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
        std::vector<std::vector<double>> samples(r.exponents.size());
        std::vector<double> ys(y.size());
        for (std::size_t b = 0; b < options.bootstrap; ++b) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                const std::size_t k = pick(rng);
                ys[j] = fitted[j] + (y[k] - fitted[k]);
            }
            try {
                const EspritExponents ex = esprit_exponents(with_values(curve, ys), order);
                if (ex.decays.size() != r.exponents.size()) continue;
                for (std::size_t i = 0; i < ex.decays.size(); ++i) samples[i].push_back(ex.decays[i]);
            } catch (const std::exception&) {
                continue;
            }
        }
        for (const auto& s : samples) r.exponent_stderr.push_back(sample_std(s));
    }
    return r;
}

FitResult to_fit_result(const SingleExponentialFit& fit) {
    FitResult r;
    r.convention = fit.convention;
    r.degenerate = fit.degenerate;
    r.offset = fit.offset;
    r.order = 1;
    r.rmse = fit.quality.rmse;
    r.adjusted_r2 = fit.quality.adjusted_r2;
    if (fit.degenerate) {
        r.flags.push_back("degenerate_constant_data");
        return r;
    }
    r.exponents = {fit.decay};
    r.amplitudes = {fit.amplitude};
    r.weights = {1.0};
    r.exponent_stderr = {fit.decay_stderr};
    if (!fit.converged) r.flags.push_back("iteration_cap_reached");
    return r;
}

}  // namespace rbcorr
