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

#include "shiftweigh/bounds.h"

#include <cmath>
#include <sstream>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("delta must lie strictly inside (0, 1)");
  }
}

void check_count(std::uint64_t n, const char* name) {
  if (n < 1) throw InputError(std::string(name) + " must be >= 1");
}

void check_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(name) + " must be finite and >= 0");
  }
}

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw InputError("theta must be finite and > 0");
  }
}

// 2 (B^2/n_tr + 1/n_te).
double spread(double B, std::uint64_t n_tr, std::uint64_t n_te) {
  return 2.0 * (B * B / static_cast<double>(n_tr) +
                1.0 / static_cast<double>(n_te));
}

BoundValue finish(BoundValue v) {
  double total = 0.0;
  for (const auto& [name, value] : v.terms) total += value;
  v.total = total;
  return v;
}

template <typename T>
const T& require_regime(const BoundInputs& in, const char* bound,
                        const char* regime) {
  const T* r = std::get_if<T>(&in.regime);
  if (r == nullptr) {
    std::ostringstream os;
    os << bound << " needs " << regime << " regime inputs";
    throw UsageError(os.str());
  }
  return *r;
}

}  // namespace

void validate(const BoundInputs& in) {
  if (!(in.B >= 1.0) || !std::isfinite(in.B)) {
    throw InputError("B must be >= 1 due to the normalization constraint");
  }
  if (!(in.C > 0.0) || !std::isfinite(in.C)) {
    throw InputError("C must be finite and > 0");
  }
  check_delta(in.delta);
  check_count(in.n_tr, "n_tr");
  check_count(in.n_te, "n_te");
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, InRkhs>) {
          check_nonneg(r.norm_m, "norm_m");
        } else if constexpr (std::is_same_v<T, PolyApprox>) {
          check_nonneg(r.C2, "C2");
          check_theta(r.theta);
        } else if constexpr (std::is_same_v<T, LogApprox>) {
          check_nonneg(r.Cinf, "Cinf");
          if (!(r.s > 0.0) || !std::isfinite(r.s)) {
            throw InputError("s must be finite and > 0");
          }
        } else {
          check_nonneg(r.C1, "C1");
          check_theta(r.theta);
        }
      },
      in.regime);
}

double hoeffding_last_term(double B, std::uint64_t n_tr, double delta) {
  check_nonneg(B, "B");
  check_count(n_tr, "n_tr");
  check_delta(delta);
  return B * std::sqrt(std::log(2.0 / delta) /
                       (2.0 * static_cast<double>(n_tr)));
}

double emp_discrepancy_bound(double B, double C, std::uint64_t n_tr,
                             std::uint64_t n_te, double delta) {
  check_nonneg(B, "B");
  check_nonneg(C, "C");
  check_count(n_tr, "n_tr");
  check_count(n_te, "n_te");
  check_delta(delta);
  return C * std::sqrt(spread(B, n_tr, n_te) * std::log(2.0 / delta));
}

double c_theta(double theta) {
  check_theta(theta);
  return (1.0 + 2.0 / theta) * std::pow(theta / 2.0, 2.0 / (theta + 2.0));
}

double d2(double B, double C, std::uint64_t n_tr, std::uint64_t n_te,
          double delta) {
  const double log_term = std::log(8.0 / delta);
  return 2.0 * C * std::sqrt(spread(B, n_tr, n_te) * log_term) +
         B * C * std::sqrt(log_term / (2.0 * static_cast<double>(n_tr)));
}

double d_inf(double B, double C, std::uint64_t n_tr, std::uint64_t n_te,
             double delta) {
  return 2.0 * C * std::sqrt(spread(B, n_tr, n_te) * std::log(6.0 / delta));
}

BoundValue bound_thm1(const BoundInputs& in) {
  const auto& r = require_regime<InRkhs>(in, "thm1", "in-RKHS");
  validate(in);
  const double M = 1.0 + 2.0 * in.C * r.norm_m;
  BoundValue v;
  v.name = "thm1";
  v.constants["M"] = M;
  v.terms["parametric"] =
      M * std::sqrt(spread(in.B, in.n_tr, in.n_te) * std::log(6.0 / in.delta));
  v.rate_exponent_tr = -0.5;
  v.rate_exponent_te = -0.5;
  v.rate_label = "O(n_tr^-1/2 + n_te^-1/2)";
  return finish(v);
}

BoundValue bound_thm2(const BoundInputs& in) {
  const auto& r = require_regime<PolyApprox>(in, "thm2", "polynomial");
  validate(in);
  const double th = r.theta;
  const double D2 = d2(in.B, in.C, in.n_tr, in.n_te, in.delta);
  const double Ct = c_theta(th);
  BoundValue v;
  v.name = "thm2";
  v.constants["C_theta"] = Ct;
  v.constants["D2"] = D2;
  v.terms["hoeffding"] =
      in.B * std::sqrt(9.0 / (2.0 * static_cast<double>(in.n_tr)) *
                       std::log(8.0 / in.delta));
  v.terms["approximation"] = Ct * std::pow(in.B * r.C2, 2.0 / (th + 2.0)) *
                             std::pow(D2, th / (th + 2.0));
  v.rate_exponent_tr = -rate_exponent_kmm(th);
  v.rate_exponent_te = -rate_exponent_kmm(th);
  v.rate_label = "O(n_tr^-theta/(2(theta+2)) + n_te^-theta/(2(theta+2)))";
  return finish(v);
}

BoundValue bound_thm3(const BoundInputs& in) {
  const auto& r = require_regime<LogApprox>(in, "thm3", "logarithmic");
  validate(in);
  const double s = r.s;
  const double Dinf = d_inf(in.B, in.C, in.n_tr, in.n_te, in.delta);
  const double log_arg = s * in.B * r.Cinf / Dinf;
  if (!(log_arg > 1.0)) {
    std::ostringstream os;
    os << "thm3 needs s*B*Cinf/D_inf > 1 (got " << log_arg
       << "); the bound only holds once n_tr and n_te are large enough that "
          "D_inf = 2C sqrt(2(B^2/n_tr + 1/n_te) log(6/delta)) < s*B*Cinf";
    throw DomainError(os.str());
  }
  BoundValue v;
  v.name = "thm3";
  v.constants["D_inf"] = Dinf;
  v.constants["log_argument"] = log_arg;
  v.constants["R"] = std::pow(log_arg, s / (s + 1.0));
  v.terms["approximation"] = std::pow(1.0 + 1.0 / s, s) * in.B * r.Cinf *
                             std::pow(std::log(log_arg), -s);
  v.terms["hoeffding"] =
      in.B * std::sqrt(2.0 / static_cast<double>(in.n_tr) *
                       std::log(6.0 / in.delta));
  v.terms["discrepancy"] = std::pow(s * in.B * r.Cinf, s / (s + 1.0)) *
                           std::pow(Dinf, 1.0 / (s + 1.0));
  v.rate_exponent_tr = 0.0;
  v.rate_exponent_te = 0.0;
  v.rate_label = "O(log^-s(n_tr*n_te/(n_tr+n_te)))";
  return finish(v);
}

BoundValue bound_thm4(const BoundInputs& in) {
  const auto& r = require_regime<PluginPoly>(in, "thm4", "plug-in");
  validate(in);
  const double exponent = rate_exponent_plugin(r.theta);
  BoundValue v;
  v.name = "thm4";
  v.terms["test_sampling"] = std::sqrt(
      std::log(4.0 / in.delta) / (2.0 * static_cast<double>(in.n_te)));
  v.terms["regression"] = std::sqrt(in.B) * r.C1 *
                          std::pow(static_cast<double>(in.n_tr), -exponent);
  v.rate_exponent_tr = -exponent;
  v.rate_exponent_te = -0.5;
  v.rate_label = "O(n_tr^-3theta/(12theta+16) + n_te^-1/2)";
  return finish(v);
}

BoundValue bound_for(const BoundInputs& in) {
  return std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, InRkhs>) return bound_thm1(in);
        if constexpr (std::is_same_v<T, PolyApprox>) return bound_thm2(in);
        if constexpr (std::is_same_v<T, LogApprox>) return bound_thm3(in);
        if constexpr (std::is_same_v<T, PluginPoly>) return bound_thm4(in);
      },
      in.regime);
}

double rate_exponent_kmm(double theta) {
  check_theta(theta);
  return theta / (2.0 * (theta + 2.0));
}

double rate_exponent_plugin(double theta) {
  check_theta(theta);
  return 3.0 * theta / (12.0 * theta + 16.0);
}

}  // namespace shiftweigh
