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

#ifndef RBCORR_ERRORS_H
#define RBCORR_ERRORS_H

#include <stdexcept>
#include <string>

namespace rbcorr {

/// Operand shapes do not agree (matrix sizes, factor dimensions, wire labels).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A precondition on the value of an argument failed (not Hermitian, not CPTP,
/// weights not normalized, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative routine hit its iteration cap.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The model lies outside the class an operation supports, e.g. a Hamiltonian
/// whose environment terms do not commute.
struct OutOfClassError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace rbcorr

#endif  // RBCORR_ERRORS_H
