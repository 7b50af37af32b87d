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

// Brute-force references for the KMM program. They only use kernel
// evaluations, never the library's QP assembly.

#ifndef SHIFTWEIGH_TESTS_QP_ORACLES_H_
#define SHIFTWEIGH_TESTS_QP_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "shiftweigh/kernels.h"

namespace testutil {

inline double k_rows(const shiftweigh::KernelSpec& spec,
                     const shiftweigh::FeatureMatrix& A, Eigen::Index i,
                     const shiftweigh::FeatureMatrix& B, Eigen::Index j) {
  return shiftweigh::eval(spec, {A.row(i).data(), static_cast<size_t>(A.cols())},
                          {B.row(j).data(), static_cast<size_t>(B.cols())});
}

// |(1/n) sum_i beta_i phi(x_i) - (1/n') sum_j phi(x'_j)|^2 by double sums.
inline double double_sum_objective(const shiftweigh::KernelSpec& spec,
                                   const shiftweigh::FeatureMatrix& X_tr,
                                   const shiftweigh::FeatureMatrix& X_te,
                                   const Eigen::VectorXd& beta) {
  const double n = static_cast<double>(X_tr.rows());
  const double m = static_cast<double>(X_te.rows());
  long double a = 0, b = 0, c = 0;
  for (Eigen::Index i = 0; i < X_tr.rows(); ++i) {
    for (Eigen::Index j = 0; j < X_tr.rows(); ++j) {
      a += beta(i) * beta(j) * k_rows(spec, X_tr, i, X_tr, j);
    }
    for (Eigen::Index j = 0; j < X_te.rows(); ++j) {
      b += beta(i) * k_rows(spec, X_tr, i, X_te, j);
    }
  }
  for (Eigen::Index i = 0; i < X_te.rows(); ++i) {
    for (Eigen::Index j = 0; j < X_te.rows(); ++j) {
      c += k_rows(spec, X_te, i, X_te, j);
    }
  }
  return static_cast<double>(a / (n * n) - 2 * b / (n * m) + c / (m * m));
}

// Minimum of the double-sum objective over the grid {0, h, ..., B}^n,
// h = 1 / steps_per_unit. The first n - 1 coordinates are enumerated. Along
// the last one the objective is a convex quadratic (its leading coefficient
// is k(x, x) / n^2 > 0), so its grid minimum sits at one of the two grid
// points around the vertex; scan_last = true visits every point instead.
inline double grid_search_minimum(const shiftweigh::KernelSpec& spec,
                                  const shiftweigh::FeatureMatrix& X_tr,
                                  const shiftweigh::FeatureMatrix& X_te,
                                  double B, int steps_per_unit = 100,
                                  bool scan_last = false) {
  const Eigen::Index n = X_tr.rows();
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(X_te.rows());
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = k_rows(spec, X_tr, i, X_tr, j);
    for (Eigen::Index j = 0; j < X_te.rows(); ++j) {
      kappa(i) += k_rows(spec, X_tr, i, X_te, j);
    }
  }
  double c = 0;
  for (Eigen::Index i = 0; i < X_te.rows(); ++i) {
    for (Eigen::Index j = 0; j < X_te.rows(); ++j) c += k_rows(spec, X_te, i, X_te, j);
  }
  c /= m * m;
  const int top = static_cast<int>(std::lround(B * steps_per_unit));
  const double h = 1.0 / steps_per_unit;
  const Eigen::Index last = n - 1;
  std::vector<int> idx(static_cast<size_t>(last), 0);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (Eigen::Index k = 0; k < last; ++k) beta(k) = idx[static_cast<size_t>(k)] * h;
    // f(t) = qa t^2 + qb t + q0 with t = beta_last.
    double q0 = c, qb = 0.0;
    for (Eigen::Index i = 0; i < last; ++i) {
      for (Eigen::Index j = 0; j < last; ++j) q0 += beta(i) * beta(j) * K(i, j) / (nn * nn);
      q0 -= 2.0 * beta(i) * kappa(i) / (nn * m);
      qb += 2.0 * beta(i) * K(i, last) / (nn * nn);
    }
    qb -= 2.0 * kappa(last) / (nn * m);
    const double qa = K(last, last) / (nn * nn);
    auto at = [&](int s) {
      const double t = s * h;
      return (qa * t + qb) * t + q0;
    };
    if (scan_last || !(qa > 0.0)) {
      for (int s = 0; s <= top; ++s) best = std::min(best, at(s));
    } else {
      const double vertex = -qb / (2.0 * qa) / h;
      const int lo = std::clamp(static_cast<int>(std::floor(vertex)), 0, top);
      const int hi = std::clamp(lo + 1, 0, top);
      best = std::min({best, at(lo), at(hi)});
    }
    Eigen::Index k = 0;
    while (k < last && ++idx[static_cast<size_t>(k)] > top) {
      idx[static_cast<size_t>(k)] = 0;
      ++k;
    }
    if (k == last) break;
  }
  return best;
}

}  // namespace testutil

#endif  // SHIFTWEIGH_TESTS_QP_ORACLES_H_
