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

#ifndef SHIFTWEIGH_KMM_H_
#define SHIFTWEIGH_KMM_H_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "shiftweigh/kernels.h"

namespace shiftweigh {

// The kernel mean matching program in beta:
//
//   minimize  f(beta) = beta^T Q beta + q^T beta + const_term
//   s.t.      0 <= beta_i <= box_upper
//
// with Q = K_tr / n_tr^2, q_i = -2/(n_tr n_te) sum_j k(X_i^tr, X_j^te) and
// const_term = 1^T K_te 1 / n_te^2, so that f(beta) is the squared RKHS
// distance between the weighted training mean element and the test mean
// element. Q is held either densely or as a factor F with Q = F F^T.
class QpProblem {
 public:
  static QpProblem dense(Eigen::MatrixXd quadratic, Eigen::VectorXd linear,
                         double const_term, double box_upper);
  static QpProblem factored(Eigen::MatrixXd factor, Eigen::VectorXd linear,
                            double const_term, double box_upper);

  Eigen::Index size() const { return linear_.size(); }
  bool is_factored() const { return factored_; }
  const Eigen::MatrixXd& quadratic() const { return quadratic_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  const Eigen::VectorXd& linear() const { return linear_; }
  double const_term() const { return const_term_; }
  double box_upper() const { return box_upper_; }

  // Q v.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // f(beta), unclamped; may be slightly negative from rounding.
  double objective(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  // Materialized Q (for the factored form, F F^T).
  Eigen::MatrixXd quadratic_matrix() const;

 private:
  QpProblem() = default;

  bool factored_ = false;
  Eigen::MatrixXd quadratic_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd linear_;
  double const_term_ = 0.0;
  double box_upper_ = 1.0;
};

// Dense assembly from the full Gram matrices. Throws InputError when B < 1,
// a sample is empty or feature dimensions differ; NumericalError when the
// training Gram matrix is indefinite beyond 1e-8 n_tr even after jitter.
QpProblem assemble_qp(const KernelSpec& spec, const FeatureMatrix& X_tr,
                      const FeatureMatrix& X_te, double B);

struct FactorOptions {
  // Largest residual diagonal of the joint Gram matrix that is accepted; at
  // 1e-14 every Gram entry is reproduced to rounding level.
  double tolerance = 1e-14;
  Eigen::Index max_rank = 600;
};

// Same program, assembled from a pivoted Cholesky factor of the Gram matrix of
// the pooled sample [X_tr; X_te]. Costs O((n_tr + n_te) r^2) instead of
// O(n_tr (n_tr + n_te)). Falls back to dense assembly when the factor does not
// reach the tolerance within max_rank.
QpProblem assemble_qp_factored(const KernelSpec& spec,
                               const FeatureMatrix& X_tr,
                               const FeatureMatrix& X_te, double B,
                               const FactorOptions& options = {});

enum class GramBackend {
  kAuto,      // factored when n_tr + n_te > kAutoFactorThreshold
  kDense,
  kFactored,
};

inline constexpr Eigen::Index kAutoFactorThreshold = 200;

QpProblem assemble_qp(const KernelSpec& spec, const FeatureMatrix& X_tr,
                      const FeatureMatrix& X_te, double B, GramBackend backend,
                      const FactorOptions& options = {});

struct SolverOptions {
  double tol = 1e-8;
  // 0 selects the default 50 n_tr + 10^4.
  std::size_t max_iter = 0;
  bool accelerate = true;
  // Keep the objective after every accepted iterate in Weights::trace.
  bool record_trace = false;
};

struct Weights {
  Eigen::VectorXd beta;
  double box_upper = 1.0;
  double objective_value = 0.0;  // L-hat(beta), the norm, not its square
  double residual = 0.0;         // projected-gradient stationarity residual
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Projected gradient descent on the box with step 1/(1.05 L), L the gradient
// Lipschitz constant 2 lambda_max(Q) from power iteration, with optional
// Nesterov momentum that is reset whenever a step would increase f. Stops
// when |beta - clip(beta - grad f(beta), 0, B)|_inf <= tol.
Weights solve_kmm(const QpProblem& problem, const SolverOptions& options = {});

// sqrt(max(f(beta), 0)). Rounding can push f a few ulps below zero for a
// perfect match; anything below -1e-10 indicates a broken problem and throws
// NumericalError.
double objective_norm(const QpProblem& problem, const Eigen::VectorXd& beta);

// Largest eigenvalue of Q by power iteration (relative tolerance 1e-6).
double largest_eigenvalue(const QpProblem& problem);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_KMM_H_
