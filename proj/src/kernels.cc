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

#include "shiftweigh/kernels.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

// Squared distance by differencing first; the expanded |x|^2 + |y|^2 - 2<x,y>
// form loses the PSD property to cancellation for nearby points.
inline double squared_distance(const double* a, const double* b,
                               Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

inline double dot(const double* a, const double* b, Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) acc += a[k] * b[k];
  return acc;
}

// Evaluators for a fixed family; the variant is dispatched once per matrix.
struct GaussianEval {
  double inv_sigma_sq;
  double operator()(const double* a, const double* b, Eigen::Index d) const {
    return std::exp(-squared_distance(a, b, d) * inv_sigma_sq);
  }
};
struct LinearEval {
  double operator()(const double* a, const double* b, Eigen::Index d) const {
    return dot(a, b, d);
  }
};
struct PolynomialEval {
  int degree;
  double offset;
  double operator()(const double* a, const double* b, Eigen::Index d) const {
    const double base = dot(a, b, d) + offset;
    double out = 1.0;
    for (int p = 0; p < degree; ++p) out *= base;
    return out;
  }
};
struct InverseMultiquadricEval {
  double c_sq;
  double alpha;
  double operator()(const double* a, const double* b, Eigen::Index d) const {
    return std::pow(c_sq + squared_distance(a, b, d), -alpha);
  }
};

template <typename Fn>
decltype(auto) with_evaluator(const KernelSpec& spec, Fn&& fn) {
  return std::visit(
      [&](const auto& fam) -> decltype(auto) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return fn(GaussianEval{1.0 / (fam.sigma * fam.sigma)});
        } else if constexpr (std::is_same_v<T, Linear>) {
          return fn(LinearEval{});
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return fn(PolynomialEval{fam.degree, fam.offset});
        } else {
          return fn(InverseMultiquadricEval{fam.c * fam.c, fam.alpha});
        }
      },
      spec.family());
}

void require_finite(const FeatureMatrix& X, const char* what) {
  if (!X.allFinite()) {
    throw InputError(std::string(what) + " contains non-finite entries");
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    std::ostringstream os;
    os << "feature dimension mismatch: " << a << " vs " << b;
    throw InputError(os.str());
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

KernelSpec KernelSpec::gaussian(double sigma) {
  require_positive(sigma, "sigma");
  return KernelSpec(Gaussian{sigma});
}

KernelSpec KernelSpec::linear(std::optional<double> domain_radius) {
  if (domain_radius) require_positive(*domain_radius, "domain_radius");
  return KernelSpec(Linear{}, domain_radius);
}

KernelSpec KernelSpec::polynomial(int degree, double offset,
                                  std::optional<double> domain_radius) {
  if (degree < 1) throw InputError("polynomial degree must be >= 1");
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw InputError("polynomial offset must be non-negative");
  }
  if (domain_radius) require_positive(*domain_radius, "domain_radius");
  return KernelSpec(Polynomial{degree, offset}, domain_radius);
}

KernelSpec KernelSpec::inverse_multiquadric(double c, double alpha) {
  require_positive(c, "c");
  require_positive(alpha, "alpha");
  return KernelSpec(InverseMultiquadric{c, alpha});
}

KernelSpec KernelSpec::with_domain_radius(double radius) const {
  require_positive(radius, "domain_radius");
  KernelSpec out = *this;
  out.domain_radius_ = radius;
  return out;
}

std::string KernelSpec::family_name() const {
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Gaussian>) return "gaussian";
        if constexpr (std::is_same_v<T, Linear>) return "linear";
        if constexpr (std::is_same_v<T, Polynomial>) return "polynomial";
        return "inverse_multiquadric";
      },
      family_);
}

double eval(const KernelSpec& spec, std::span<const double> x,
            std::span<const double> x2) {
  require_same_dim(static_cast<Eigen::Index>(x.size()),
                   static_cast<Eigen::Index>(x2.size()));
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.begin(), x.end(), finite) ||
      !std::all_of(x2.begin(), x2.end(), finite)) {
    throw InputError("kernel arguments must be finite");
  }
  const auto dim = static_cast<Eigen::Index>(x.size());
  return with_evaluator(spec, [&](const auto& k) {
    return k(x.data(), x2.data(), dim);
  });
}

Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& X,
                     const FeatureMatrix& X2) {
  require_same_dim(X.cols(), X2.cols());
  require_finite(X, "X");
  require_finite(X2, "X2");
  const Eigen::Index n = X.rows(), m = X2.rows(), d = X.cols();
  Eigen::MatrixXd G(n, m);
  with_evaluator(spec, [&](const auto& k) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double* xj = X2.row(j).data();
      for (Eigen::Index i = 0; i < n; ++i) G(i, j) = k(X.row(i).data(), xj, d);
    }
  });
  return G;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& X) {
  require_finite(X, "X");
  const Eigen::Index n = X.rows(), d = X.cols();
  Eigen::MatrixXd G(n, n);
  with_evaluator(spec, [&](const auto& k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double* xj = X.row(j).data();
      for (Eigen::Index i = j; i < n; ++i) {
        G(i, j) = k(X.row(i).data(), xj, d);
        G(j, i) = G(i, j);
      }
    }
  });
  return G;
}

Eigen::VectorXd gram_row_sums(const KernelSpec& spec, const FeatureMatrix& X,
                              const FeatureMatrix& X2) {
  require_same_dim(X.cols(), X2.cols());
  require_finite(X, "X");
  require_finite(X2, "X2");
  const Eigen::Index n = X.rows(), m = X2.rows(), d = X.cols();
  Eigen::VectorXd sums(n);
  with_evaluator(spec, [&](const auto& k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* xi = X.row(i).data();
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) acc += k(xi, X2.row(j).data(), d);
      sums(i) = acc;
    }
  });
  return sums;
}

double sup_bound(const KernelSpec& spec) {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, InverseMultiquadric>) {
          return std::pow(fam.c, -fam.alpha);
        } else {
          if (!spec.domain_radius()) {
            throw InputError(spec.family_name() +
                             " kernel is unbounded on R^d; declare "
                             "domain_radius to obtain its sup bound");
          }
          const double r = *spec.domain_radius();
          if constexpr (std::is_same_v<T, Linear>) {
            return r;
          } else {
            return std::pow(r * r + fam.offset, 0.5 * fam.degree);
          }
        }
      },
      spec.family());
}

LowRankGram pivoted_cholesky(const KernelSpec& spec, const FeatureMatrix& X,
                             double tolerance, Eigen::Index max_rank) {
  require_finite(X, "X");
  if (!(tolerance >= 0.0)) throw InputError("tolerance must be >= 0");
  const Eigen::Index n = X.rows(), d = X.cols();
  max_rank = std::clamp<Eigen::Index>(max_rank, 0, n);

  LowRankGram out;
  Eigen::MatrixXd L(n, max_rank);
  Eigen::VectorXd residual(n);
  with_evaluator(spec, [&](const auto& k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) = k(X.row(i).data(), X.row(i).data(), d);
    }
    Eigen::Index rank = 0;
    while (true) {
      Eigen::Index pivot = 0;
      out.max_residual = n > 0 ? residual.maxCoeff(&pivot) : 0.0;
      if (out.max_residual <= tolerance) {
        out.reached_tolerance = true;
        break;
      }
      if (rank == max_rank) break;
      const double root = std::sqrt(out.max_residual);
      const double* xp = X.row(pivot).data();
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = k(X.row(i).data(), xp, d);
        for (Eigen::Index r = 0; r < rank; ++r) v -= L(i, r) * L(pivot, r);
        L(i, rank) = v / root;
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        residual(i) = std::max(residual(i) - L(i, rank) * L(i, rank), 0.0);
      }
      residual(pivot) = 0.0;
      out.pivots.push_back(pivot);
      ++rank;
    }
    out.factor = L.leftCols(rank);
  });
  return out;
}

}  // namespace shiftweigh
