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

#ifndef RBCORR_CURVE_H
#define RBCORR_CURVE_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rbcorr {

struct CurvePoint {
    std::size_t m = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t k = 0;
    std::size_t shots = 0;
};

/// Average sequence fidelity indexed by sequence length, with provenance.
struct ASFCurve {
    std::vector<CurvePoint> points;
    std::uint64_t seed = 0;
    std::string model_digest;

    std::vector<double> lengths() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(static_cast<double>(p.m));
        return out;
    }
    std::vector<double> means() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.mean);
        return out;
    }
};

/// Curve with the given lengths and values; standard errors zero.
inline ASFCurve make_curve(const std::vector<std::size_t>& lengths, const std::vector<double>& values) {
    ASFCurve c;
    for (std::size_t i = 0; i < lengths.size() && i < values.size(); ++i) {
        c.points.push_back(CurvePoint{lengths[i], values[i], 0.0, 1, 0});
    }
    return c;
}

}  // namespace rbcorr

#endif  // RBCORR_CURVE_H
