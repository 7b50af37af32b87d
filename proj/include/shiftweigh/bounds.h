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

#ifndef SHIFTWEIGH_BOUNDS_H_
#define SHIFTWEIGH_BOUNDS_H_

#include <cstdint>
#include <map>
#include <string>
#include <variant>

namespace shiftweigh {

// Regression function in the RKHS with known norm.
struct InRkhs {
  double norm_m = 0.0;
};
// L2 approximation error of m by RKHS balls decays like C2 R^(-theta/2).
struct PolyApprox {
  double C2 = 0.0;
  double theta = 1.0;
};
// Sup-norm approximation error decays like Cinf (log R)^(-s).
struct LogApprox {
  double Cinf = 0.0;
  double s = 1.0;
};
// Plug-in kernel ridge regression with m in the range of a power of the
// integral operator; C1 is the (uncomputable) estimation constant.
struct PluginPoly {
  double C1 = 0.0;
  double theta = 1.0;
};

using Regime = std::variant<InRkhs, PolyApprox, LogApprox, PluginPoly>;

struct BoundInputs {
  double B = 1.0;      // sup of the density ratio, >= 1
  double C = 1.0;      // kernel sup constant, sup k(x, x) <= C^2
  double delta = 0.05;  // failure probability, in (0, 1)
  std::uint64_t n_tr = 1;
  std::uint64_t n_te = 1;
  Regime regime = InRkhs{};
};

// Checks B >= 1, C > 0, 0 < delta < 1, n >= 1 and the regime constants.
void validate(const BoundInputs& inputs);

struct BoundValue {
  std::string name;
  double total = 0.0;
  // Additive components; total is their sum.
  std::map<std::string, double> terms;
  // Non-additive named quantities (M, C_theta, D2, D_inf, ...).
  std::map<std::string, double> constants;
  // Exponents of the polynomial decay in n_tr and n_te (0 when the decay is
  // only logarithmic); see rate_label.
  double rate_exponent_tr = 0.0;
  double rate_exponent_te = 0.0;
  std::string rate_label;
};

// B sqrt(log(2/delta) / (2 n_tr)): Hoeffding deviation of the true-ratio
// weighted mean (and of the label noise term).
double hoeffding_last_term(double B, std::uint64_t n_tr, double delta);

// C sqrt(2 (B^2/n_tr + 1/n_te) log(2/delta)): deviation of the empirical
// discrepancy L-hat at the true ratio.
double emp_discrepancy_bound(double B, double C, std::uint64_t n_tr,
                             std::uint64_t n_te, double delta);

// (1 + 2/theta) (theta/2)^(2/(theta+2)).
double c_theta(double theta);
// 2C sqrt(2 (B^2/n_tr + 1/n_te) log(8/delta)) + BC sqrt(log(8/delta)/(2 n_tr)).
double d2(double B, double C, std::uint64_t n_tr, std::uint64_t n_te,
          double delta);
// 2C sqrt(2 (B^2/n_tr + 1/n_te) log(6/delta)).
double d_inf(double B, double C, std::uint64_t n_tr, std::uint64_t n_te,
             double delta);

// m in H: (1 + 2 C |m|_H) sqrt(2 (B^2/n_tr + 1/n_te) log(6/delta)).
BoundValue bound_thm1(const BoundInputs& inputs);
// Polynomial approximation error.
BoundValue bound_thm2(const BoundInputs& inputs);
// Logarithmic approximation error. Requires s B Cinf / D_inf > 1, i.e. large
// enough samples; DomainError otherwise.
BoundValue bound_thm3(const BoundInputs& inputs);
// Plug-in estimator.
BoundValue bound_thm4(const BoundInputs& inputs);

// Dispatches on the regime.
BoundValue bound_for(const BoundInputs& inputs);

// theta / (2 (theta + 2)): decay exponent of the KMM bound under polynomial
// approximation error.
double rate_exponent_kmm(double theta);
// 3 theta / (12 theta + 16): decay exponent in n_tr of the plug-in bound.
double rate_exponent_plugin(double theta);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_BOUNDS_H_
