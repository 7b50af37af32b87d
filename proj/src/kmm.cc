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

#include "shiftweigh/kmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

constexpr double kStepMargin = 1.05;
constexpr double kNegativeObjectiveSlack = 1e-10;

void validate_samples(const FeatureMatrix& X_tr, const FeatureMatrix& X_te,
                      double B) {
  if (X_tr.rows() < 1 || X_te.rows() < 1) {
    throw InputError("KMM needs at least one training and one test point");
  }
  if (X_tr.cols() != X_te.cols()) {
    std::ostringstream os;
    os << "feature dimension mismatch: train has " << X_tr.cols()
       << " columns, test has " << X_te.cols();
    throw InputError(os.str());
  }
  if (!(B >= 1.0) || !std::isfinite(B)) {
    throw InputError(
        "box bound B must satisfy B >= 1 due to the normalization constraint "
        "(the true density ratio averages to 1 under the training "
        "distribution)");
  }
}

bool positive_definite(const Eigen::MatrixXd& A) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  return llt.info() == Eigen::Success;
}

// Gram matrices are PSD in exact arithmetic. Accept min eigenvalue down to
// -1e-8 n; otherwise jitter the diagonal once and re-check.
void check_psd(Eigen::MatrixXd& K) {
  const Eigen::Index n = K.rows();
  const double slack = 1e-8 * static_cast<double>(n);
  Eigen::MatrixXd shifted = K;
  shifted.diagonal().array() += slack;
  if (positive_definite(shifted)) return;
  const double jitter = 1e-10 * K.trace() / static_cast<double>(n);
  K.diagonal().array() += jitter;
  shifted.diagonal().array() += jitter;
  if (positive_definite(shifted)) return;
  throw NumericalError(
      "training Gram matrix is indefinite beyond tolerance 1e-8*n_tr even "
      "after diagonal jitter; check the kernel and the inputs");
}

Eigen::VectorXd clip(const Eigen::VectorXd& v, double upper) {
  return v.cwiseMax(0.0).cwiseMin(upper);
}

double residual_of(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad,
                   double upper) {
  if (beta.size() == 0) return 0.0;
  return (beta - clip(beta - grad, upper)).cwiseAbs().maxCoeff();
}

}  // namespace

QpProblem QpProblem::dense(Eigen::MatrixXd quadratic, Eigen::VectorXd linear,
                           double const_term, double box_upper) {
  if (quadratic.rows() != quadratic.cols() ||
      quadratic.rows() != linear.size()) {
    throw InputError("quadratic term must be square and match the linear term");
  }
  QpProblem p;
  p.quadratic_ = std::move(quadratic);
  p.linear_ = std::move(linear);
  p.const_term_ = const_term;
  p.box_upper_ = box_upper;
  return p;
}

QpProblem QpProblem::factored(Eigen::MatrixXd factor, Eigen::VectorXd linear,
                              double const_term, double box_upper) {
  if (factor.rows() != linear.size()) {
    throw InputError("factor rows must match the linear term");
  }
  QpProblem p;
  p.factored_ = true;
  p.factor_ = std::move(factor);
  p.linear_ = std::move(linear);
  p.const_term_ = const_term;
  p.box_upper_ = box_upper;
  return p;
}

Eigen::VectorXd QpProblem::apply(const Eigen::VectorXd& v) const {
  if (factored_) return factor_ * (factor_.transpose() * v);
  return quadratic_ * v;
}

double QpProblem::objective(const Eigen::VectorXd& beta) const {
  if (beta.size() != size()) {
    std::ostringstream os;
    os << "beta has length " << beta.size() << ", expected " << size();
    throw InputError(os.str());
  }
  const double quad = factored_ ? (factor_.transpose() * beta).squaredNorm()
                                : beta.dot(quadratic_ * beta);
  return quad + linear_.dot(beta) + const_term_;
}

Eigen::VectorXd QpProblem::gradient(const Eigen::VectorXd& beta) const {
  return 2.0 * apply(beta) + linear_;
}

Eigen::MatrixXd QpProblem::quadratic_matrix() const {
  if (factored_) return factor_ * factor_.transpose();
  return quadratic_;
}

QpProblem assemble_qp(const KernelSpec& spec, const FeatureMatrix& X_tr,
                      const FeatureMatrix& X_te, double B) {
  validate_samples(X_tr, X_te, B);
  const double n_tr = static_cast<double>(X_tr.rows());
  const double n_te = static_cast<double>(X_te.rows());

  Eigen::MatrixXd K = gram(spec, X_tr);
  check_psd(K);
  Eigen::VectorXd linear =
      (-2.0 / (n_tr * n_te)) * gram_row_sums(spec, X_tr, X_te);
  const double const_term =
      gram_row_sums(spec, X_te, X_te).sum() / (n_te * n_te);
  return QpProblem::dense(K / (n_tr * n_tr), std::move(linear), const_term, B);
}

QpProblem assemble_qp_factored(const KernelSpec& spec,
                               const FeatureMatrix& X_tr,
                               const FeatureMatrix& X_te, double B,
                               const FactorOptions& options) {
  validate_samples(X_tr, X_te, B);
  const Eigen::Index n_tr = X_tr.rows(), n_te = X_te.rows();
  FeatureMatrix pooled(n_tr + n_te, X_tr.cols());
  pooled.topRows(n_tr) = X_tr;
  pooled.bottomRows(n_te) = X_te;

  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
    const std::span<const double> row(pooled.row(i).data(), pooled.cols());
    max_diag = std::max(max_diag, eval(spec, row, row));
  }
  LowRankGram low_rank = pivoted_cholesky(
      spec, pooled, options.tolerance * max_diag, options.max_rank);
  if (!low_rank.reached_tolerance) return assemble_qp(spec, X_tr, X_te, B);

  const Eigen::MatrixXd& L = low_rank.factor;
  const double ntr = static_cast<double>(n_tr), nte = static_cast<double>(n_te);
  const Eigen::VectorXd test_mean =
      L.bottomRows(n_te).transpose() * Eigen::VectorXd::Ones(n_te);
  Eigen::VectorXd linear =
      (-2.0 / (ntr * nte)) * (L.topRows(n_tr) * test_mean);
  const double const_term = test_mean.squaredNorm() / (nte * nte);
  return QpProblem::factored(L.topRows(n_tr) / ntr, std::move(linear),
                             const_term, B);
}

QpProblem assemble_qp(const KernelSpec& spec, const FeatureMatrix& X_tr,
                      const FeatureMatrix& X_te, double B, GramBackend backend,
                      const FactorOptions& options) {
  const bool factor =
      backend == GramBackend::kFactored ||
      (backend == GramBackend::kAuto &&
       X_tr.rows() + X_te.rows() > kAutoFactorThreshold);
  return factor ? assemble_qp_factored(spec, X_tr, X_te, B, options)
                : assemble_qp(spec, X_tr, X_te, B);
}

double largest_eigenvalue(const QpProblem& problem) {
  const Eigen::Index n = problem.size();
  if (n == 0) return 0.0;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
  }
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = problem.apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

Weights solve_kmm(const QpProblem& problem, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw InputError("solver tol must be > 0");
  const Eigen::Index n = problem.size();
  const double B = problem.box_upper();
  if (!(B >= 1.0) || !std::isfinite(B)) {
    throw InputError("box bound B must satisfy B >= 1");
  }
  const bool finite = (problem.is_factored() ? problem.factor().allFinite()
                                             : problem.quadratic().allFinite()) &&
                      problem.linear().allFinite() &&
                      std::isfinite(problem.const_term());
  if (!finite) throw InputError("QP problem has non-finite entries");

  const std::size_t max_iter =
      options.max_iter > 0 ? options.max_iter
                           : 50 * static_cast<std::size_t>(n) + 10000;
  const Eigen::VectorXd& q = problem.linear();
  const double c = problem.const_term();

  Weights out;
  out.box_upper = B;

  const double lambda_max = largest_eigenvalue(problem);
  if (!(lambda_max > 0.0)) {
    // Purely linear objective: the minimizer sits on box corners.
    out.beta = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (q(i) < 0.0) out.beta(i) = B;
      if (q(i) > 0.0) out.beta(i) = 0.0;
    }
    out.residual = residual_of(out.beta, problem.gradient(out.beta), B);
    out.converged = out.residual <= options.tol;
    out.objective_value = objective_norm(problem, out.beta);
    return out;
  }
  const double step = 1.0 / (kStepMargin * 2.0 * lambda_max);

  Eigen::VectorXd beta = clip(Eigen::VectorXd::Ones(n), B);
  Eigen::VectorXd q_beta = problem.apply(beta);
  double f = beta.dot(q_beta) + q.dot(beta) + c;
  if (options.record_trace) out.trace.push_back(f);

  Eigen::VectorXd y = beta, q_y = q_beta;
  double t = 1.0;
  bool momentum = false;
  out.residual = residual_of(beta, 2.0 * q_beta + q, B);

  std::size_t it = 0;
  while (out.residual > options.tol && it < max_iter) {
    ++it;
    Eigen::VectorXd next = clip(y - step * (2.0 * q_y + q), B);
    Eigen::VectorXd q_next = problem.apply(next);
    const double f_next = next.dot(q_next) + q.dot(next) + c;

    if (f_next > f) {
      if (momentum) {
        // Restart from the last accepted iterate.
        y = beta;
        q_y = q_beta;
        t = 1.0;
        momentum = false;
        continue;
      }
      // A plain projected step cannot increase f; this is rounding noise.
      break;
    }

    if (options.accelerate) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double m = (t - 1.0) / t_next;
      y = next + m * (next - beta);
      q_y = q_next + m * (q_next - q_beta);
      t = t_next;
      momentum = m > 0.0;
    } else {
      y = next;
      q_y = q_next;
    }
    beta = std::move(next);
    q_beta = std::move(q_next);
    f = f_next;
    if (options.record_trace) out.trace.push_back(f);
    out.residual = residual_of(beta, 2.0 * q_beta + q, B);
  }

  out.iterations = it;
  out.converged = out.residual <= options.tol;
  out.beta = std::move(beta);
  out.objective_value = std::sqrt(std::max(f, 0.0));
  return out;
}

double objective_norm(const QpProblem& problem, const Eigen::VectorXd& beta) {
  const double f = problem.objective(beta);
  if (f < -kNegativeObjectiveSlack) {
    std::ostringstream os;
    os << "KMM objective evaluated to " << f
       << " < -1e-10; the quadratic term is not PSD";
    throw NumericalError(os.str());
  }
  return std::sqrt(std::max(f, 0.0));
}

}  // namespace shiftweigh
