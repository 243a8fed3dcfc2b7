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

#include "rbcorr/random.h"

#include <Eigen/QR>

namespace rbcorr {

namespace {

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(r, c) = Complex(re, im);
        }
    }
    return g;
}

}  // namespace

ComplexMatrix haar_unitary(std::size_t d, std::mt19937_64& rng) {
    const ComplexMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) q.col(k) *= diag / mag;
    }
    return q;
}

ComplexVector haar_state(std::size_t d, std::mt19937_64& rng) {
    ComplexVector v = ginibre(d, 1, rng).col(0);
    return v / v.norm();
}

ComplexMatrix random_density_matrix(std::size_t d, std::mt19937_64& rng, std::size_t rank) {
    if (rank == 0) rank = d;
    const ComplexMatrix g = ginibre(d, rank, rng);
    const ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

}  // namespace rbcorr
