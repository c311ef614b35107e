// Copyright 2026 The qcoarse Authors
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

#ifndef QCOARSE_ERRORS_HPP
#define QCOARSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcoarse {

/// Argument outside the domain of a function (negative time, non-positive rate).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Malformed user input: bad distribution spec, non-finite samples, unreadable file.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Distribution lacks a finite, positive mean wait.
struct UnsupportedDistribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to produce a trustworthy result.
///
/// `residual` carries whatever defect measure the failing routine had at hand
/// (least-squares residual, isometry defect, negative eigenvalue, ...).
struct NumericalFailure : std::runtime_error {
    NumericalFailure(const std::string &what, double residual_ = 0.0)
        : std::runtime_error(what), residual(residual_) {
    }
    double residual;
};

/// Post-processing removed every candidate term.
struct EmptyDecomposition : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

/// Gram construction produced an inconsistent normalization.
struct InconsistentDecomposition : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

/// Memory state has decayed below representable norm.
struct TailUnderflow : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

}  // namespace qcoarse

#endif  // QCOARSE_ERRORS_HPP
