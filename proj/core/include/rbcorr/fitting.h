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

#ifndef RBCORR_FITTING_H
#define RBCORR_FITTING_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rbcorr/curve.h"
#include "rbcorr/numerics.h"

namespace rbcorr {

/// Whether a decay enters the model as q^m or q^(m+1). The two differ only
/// in how amplitudes are reported (A_m = A_{m+1} q).
enum class ExponentConvention { kM, kMPlusOne };

const char* to_string(ExponentConvention c);
ExponentConvention parse_convention(const std::string& s);

struct FitQuality {
    double rmse = 0.0;
    double adjusted_r2 = 1.0;
};

/// RMSE and adjusted R^2 = 1 - (1 - R^2)(n - 1)/(n - n_params - 1).
/// Throws ValidationError if n <= n_params + 1.
FitQuality fit_quality(const std::vector<double>& data, const std::vector<double>& fitted,
                       std::size_t n_params);

struct SingleExponentialFit {
    double amplitude = 0.0;
    double decay = 1.0;
    double offset = 0.0;
    FitQuality quality;
    std::size_t iterations = 0;
    bool converged = false;
    bool degenerate = false;
    double decay_stderr = 0.0;
    ExponentConvention convention = ExponentConvention::kM;
};

/// Least-squares fit of y = A q^e + B with q in (-1, 1.5]. Levenberg-Marquardt
/// from a log-linear start; returns the best iterate with converged = false if
/// the 200-iteration cap is hit. `bootstrap` > 0 resamples residuals that many
/// times to estimate the standard error of q.
SingleExponentialFit fit_single_exponential(const ASFCurve& curve,
                                            ExponentConvention convention = ExponentConvention::kM,
                                            std::size_t bootstrap = 0, std::uint64_t seed = 0);

/// Hankel matrix Y[i][j] = y[i + j] of a uniformly spaced series.
struct HankelView {
    std::vector<double> y;
    std::size_t window = 0;
    std::size_t stride = 1;
    std::size_t first_length = 0;
    Eigen::MatrixXd matrix;
};

/// window = 0 selects floor(n/2). Throws ValidationError if lengths are not
/// uniformly spaced or fewer than 4 points are given.
HankelView hankel_view(const ASFCurve& curve, std::size_t window = 0);

RealVector hankel_singular_spectrum(const ASFCurve& curve);

enum class OrderMethod { kManual, kLogGap };

/// kManual returns `manual`; kLogGap returns the position of the largest
/// log10 drop between consecutive singular values, capped at 4.
std::size_t select_model_order(const RealVector& singular_values, OrderMethod method,
                               std::size_t manual = 0);

struct EspritExponents {
    /// Real exponents per unit length, ascending, excluding the offset carrier.
    std::vector<double> decays;
    bool has_offset = false;
    /// Raw eigenvalues of the rotation operator (per stride).
    std::vector<Complex> raw;
    /// Eigenvalues excluded because |imag| > 1e-6.
    std::vector<Complex> rejected;
    double max_imag = 0.0;
};

EspritExponents esprit_exponents(const ASFCurve& curve, std::size_t order);

struct AmplitudeSolution {
    std::vector<double> amplitudes;
    double offset = 0.0;
    std::vector<double> weights;
    double condition_number = 1.0;
};

/// Linear least squares on the full series for y = sum_i A_i q_i^e (+ B).
AmplitudeSolution solve_amplitudes(const ASFCurve& curve, const std::vector<double>& decays,
                                   bool with_offset, ExponentConvention convention);

struct FitResult {
    std::vector<double> exponents;
    std::vector<double> amplitudes;
    double offset = 0.0;
    std::vector<double> weights;
    double rmse = 0.0;
    double adjusted_r2 = 1.0;
    std::size_t order = 0;
    ExponentConvention convention = ExponentConvention::kM;
    std::vector<double> exponent_stderr;
    RealVector singular_values;
    std::vector<Complex> rejected;
    double condition_number = 1.0;
    bool degenerate = false;
    std::vector<std::string> flags;

    std::vector<double> evaluate(const std::vector<double>& lengths) const;
};

struct EspritOptions {
    OrderMethod method = OrderMethod::kLogGap;
    std::size_t manual_order = 0;
    ExponentConvention convention = ExponentConvention::kMPlusOne;
    std::size_t bootstrap = 0;
    std::uint64_t seed = 0;
};

/// Full pipeline: singular spectrum, model order, ESPRIT exponents, amplitude
/// solve and fit metrics. `order` counts the offset carrier.
FitResult fit_esprit(const ASFCurve& curve, const EspritOptions& options = {});

FitResult to_fit_result(const SingleExponentialFit& fit);

}  // namespace rbcorr

#endif  // RBCORR_FITTING_H
