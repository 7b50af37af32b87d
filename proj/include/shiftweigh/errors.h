/*
 * Copyright 2026 The shiftweigh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHIFTWEIGH_ERRORS_H_
#define SHIFTWEIGH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shiftweigh {

// Bad user input: shapes, ranges, non-finite values, malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs are individually valid but a formula is outside its domain, e.g. a
// bound whose sample-size precondition does not hold yet.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An operation was called with the wrong variant, e.g. a thm2 bound on
// in-RKHS inputs.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Linear algebra broke down (indefinite Gram, singular ridge system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_ERRORS_H_
