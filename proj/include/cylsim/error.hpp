// Copyright 2026 The cylsim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace cylsim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (e.g. scallop_f(1.5)).
class DomainError : public Error {
   public:
    using Error::Error;
};

/// An estimator was asked for a value with no data behind it (empty tally,
/// zero coincidences).
class UndefinedEstimate : public Error {
   public:
    using Error::Error;
};

/// Singles/doubles probabilities that cannot come from any 3x3 joint
/// outcome distribution.
class ConstraintViolation : public Error {
   public:
    using Error::Error;
};

/// Least-squares design matrix without full column rank.
class RankDeficient : public Error {
   public:
    using Error::Error;
};

/// Invalid experiment or report configuration.
class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace cylsim
