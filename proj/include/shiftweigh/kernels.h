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

#ifndef SHIFTWEIGH_KERNELS_H_
#define SHIFTWEIGH_KERNELS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace shiftweigh {

// Samples are stored one point per row so a row is a contiguous span.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Gaussian {
  double sigma;  // k(x, x') = exp(-|x - x'|^2 / sigma^2)
};
struct Linear {};
struct Polynomial {
  int degree;
  double offset;  // k(x, x') = (<x, x'> + offset)^degree
};
struct InverseMultiquadric {
  double c;
  double alpha;  // k(x, x') = (c^2 + |x - x'|^2)^(-alpha)
};

using KernelFamily =
    std::variant<Gaussian, Linear, Polynomial, InverseMultiquadric>;

// A kernel family plus the radius of the compact domain the data lives in.
// The radius is only needed to bound kernels that are unbounded on R^d.
class KernelSpec {
 public:
  static KernelSpec gaussian(double sigma);
  static KernelSpec linear(std::optional<double> domain_radius = std::nullopt);
  static KernelSpec polynomial(
      int degree, double offset,
      std::optional<double> domain_radius = std::nullopt);
  static KernelSpec inverse_multiquadric(double c, double alpha);

  const KernelFamily& family() const { return family_; }
  std::optional<double> domain_radius() const { return domain_radius_; }
  KernelSpec with_domain_radius(double radius) const;

  // "gaussian", "linear", "polynomial" or "inverse_multiquadric".
  std::string family_name() const;

  bool operator==(const KernelSpec&) const = default;

 private:
  explicit KernelSpec(KernelFamily family,
                      std::optional<double> domain_radius = std::nullopt)
      : family_(family), domain_radius_(domain_radius) {}

  KernelFamily family_;
  std::optional<double> domain_radius_;
};

// k(x, x2). Throws InputError on dimension mismatch or non-finite entries.
double eval(const KernelSpec& spec, std::span<const double> x,
            std::span<const double> x2);

// Cross-Gram matrix, entry (i, j) = k(X_i, X2_j).
Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& X,
                     const FeatureMatrix& X2);
// Gram matrix of a single sample; exactly symmetric.
Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& X);

// Row sums of the cross-Gram matrix, sum_j k(X_i, X2_j), without storing it.
Eigen::VectorXd gram_row_sums(const KernelSpec& spec, const FeatureMatrix& X,
                              const FeatureMatrix& X2);

// The constant C with sup_x k(x, x) <= C^2 on the domain ball. Linear and
// polynomial kernels need a declared domain radius; InputError otherwise.
double sup_bound(const KernelSpec& spec);

// Diagonally pivoted partial Cholesky factor of gram(spec, X): G ~ L L^T.
// The factorization stops once the largest residual diagonal entry is at most
// `tolerance`; every entry of G - L L^T is then bounded by that value.
struct LowRankGram {
  Eigen::MatrixXd factor;  // rows(X) x rank
  std::vector<Eigen::Index> pivots;
  double max_residual = 0.0;
  bool reached_tolerance = false;
};

LowRankGram pivoted_cholesky(const KernelSpec& spec, const FeatureMatrix& X,
                             double tolerance, Eigen::Index max_rank);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_KERNELS_H_
