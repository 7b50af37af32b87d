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

#include "shiftweigh/estimators.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

constexpr double kDensityFloor = 1e-12;

void require_labels(const Dataset& train) {
  if (!train.has_labels()) {
    throw InputError("training data must carry labels for estimation");
  }
}

void require_box(double B) {
  if (!(B >= 1.0) || !std::isfinite(B)) {
    throw InputError(
        "box bound B must satisfy B >= 1 due to the normalization constraint");
  }
}

void require_test_dim(const Dataset& train, const FeatureMatrix& X_te) {
  if (X_te.rows() < 1) throw InputError("test sample is empty");
  if (X_te.cols() != train.dim()) {
    std::ostringstream os;
    os << "feature dimension mismatch: train has " << train.dim()
       << " columns, test has " << X_te.cols();
    throw InputError(os.str());
  }
}

EstimateReport make_report(EstimatorKind kind, const Dataset& train,
                           double unit) {
  EstimateReport r;
  r.kind = kind;
  r.point_unit_scale = unit;
  r.point = train.label_affine().to_original(unit);
  return r;
}

bool use_factor(GramBackend backend, Eigen::Index n) {
  return backend == GramBackend::kFactored ||
         (backend == GramBackend::kAuto && n > kAutoFactorThreshold);
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kKmm:
      return "kmm";
    case EstimatorKind::kPlugin:
      return "plugin";
    case EstimatorKind::kKdeRatio:
      return "kde_ratio";
    case EstimatorKind::kOracle:
      return "oracle";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "kmm") return EstimatorKind::kKmm;
  if (name == "plugin") return EstimatorKind::kPlugin;
  if (name == "kde" || name == "kde_ratio") return EstimatorKind::kKdeRatio;
  if (name == "oracle") return EstimatorKind::kOracle;
  throw InputError("unknown estimator '" + name +
                   "' (expected kmm, plugin, kde or oracle)");
}

WeightsSummary summarize(const Eigen::VectorXd& beta) {
  WeightsSummary s;
  if (beta.size() == 0) return s;
  s.min = beta.minCoeff();
  s.max = beta.maxCoeff();
  s.mean = beta.mean();
  s.normalization_gap = std::abs(s.mean - 1.0);
  return s;
}

KmmFit fit_kmm(const FeatureMatrix& X_tr, const FeatureMatrix& X_te,
               const KernelSpec& spec, double B, const KmmOptions& options) {
  QpProblem problem =
      assemble_qp(spec, X_tr, X_te, B, options.backend, options.factor);
  Weights weights = solve_kmm(problem, options.solver);
  return {std::move(problem), std::move(weights)};
}

EstimateReport kmm_report(const Dataset& train, const Weights& weights) {
  require_labels(train);
  if (weights.beta.size() != train.size()) {
    throw InputError("weights do not match the training sample size");
  }
  const double unit =
      weights.beta.dot(train.labels()) / static_cast<double>(train.size());
  EstimateReport r = make_report(EstimatorKind::kKmm, train, unit);
  WeightsSummary s = summarize(weights.beta);
  s.lhat = weights.objective_value;
  s.iterations = weights.iterations;
  s.converged = weights.converged;
  r.weights = s;
  return r;
}

EstimateReport kmm_estimate(const Dataset& train, const FeatureMatrix& X_te,
                            const KernelSpec& spec, double B,
                            const KmmOptions& options) {
  require_labels(train);
  require_box(B);
  require_test_dim(train, X_te);
  const KmmFit fit = fit_kmm(train.features(), X_te, spec, B, options);
  return kmm_report(train, fit.weights);
}

double default_plugin_lambda(Eigen::Index n_tr) {
  return std::pow(static_cast<double>(n_tr), -2.0 / 3.0);
}

EstimateReport plugin_estimate(const Dataset& train, const FeatureMatrix& X_te,
                               const KernelSpec& spec, double lambda,
                               const PluginOptions& options) {
  require_labels(train);
  require_test_dim(train, X_te);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("plug-in regularization lambda must be > 0");
  }
  const FeatureMatrix& X_tr = train.features();
  const Eigen::VectorXd& y = train.labels();
  const Eigen::Index n_tr = X_tr.rows(), n_te = X_te.rows();
  const double ridge = static_cast<double>(n_tr) * lambda;

  double unit = 0.0;
  if (use_factor(options.backend, n_tr + n_te)) {
    FeatureMatrix pooled(n_tr + n_te, X_tr.cols());
    pooled.topRows(n_tr) = X_tr;
    pooled.bottomRows(n_te) = X_te;
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
      const std::span<const double> row(pooled.row(i).data(), pooled.cols());
      max_diag = std::max(max_diag, eval(spec, row, row));
    }
    const LowRankGram low_rank =
        pivoted_cholesky(spec, pooled, options.factor.tolerance * max_diag,
                         options.factor.max_rank);
    if (low_rank.reached_tolerance) {
      // Woodbury: (L L^T + r I)^-1 y = (y - L (r I + L^T L)^-1 L^T y) / r.
      const Eigen::MatrixXd L_tr = low_rank.factor.topRows(n_tr);
      Eigen::MatrixXd inner = L_tr.transpose() * L_tr;
      inner.diagonal().array() += ridge;
      const Eigen::VectorXd coef =
          (y - L_tr * inner.llt().solve(L_tr.transpose() * y)) / ridge;
      const Eigen::VectorXd test_mean =
          low_rank.factor.bottomRows(n_te).transpose() *
          Eigen::VectorXd::Ones(n_te);
      unit = test_mean.dot(L_tr.transpose() * coef) /
             static_cast<double>(n_te);
      return make_report(EstimatorKind::kPlugin, train, unit);
    }
  }

  Eigen::MatrixXd A = gram(spec, X_tr);
  A.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(ldlt.rcond() > 1e-15)) {
    std::ostringstream os;
    os << "ridge system K + n*lambda*I is numerically singular (reciprocal "
       << "condition estimate " << ldlt.rcond() << ", lambda " << lambda
       << ")";
    throw NumericalError(os.str());
  }
  const Eigen::VectorXd coef = ldlt.solve(y);
  unit = gram_row_sums(spec, X_tr, X_te).dot(coef) / static_cast<double>(n_te);
  return make_report(EstimatorKind::kPlugin, train, unit);
}

double silverman_bandwidth(const FeatureMatrix& X) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (n < 2 || d < 1) return 1.0;
  double sd = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double mean = X.col(k).mean();
    sd += std::sqrt((X.col(k).array() - mean).square().sum() /
                    static_cast<double>(n - 1));
  }
  sd /= static_cast<double>(d);
  if (!(sd > 0.0)) sd = 1.0;
  const double dd = static_cast<double>(d);
  return sd * std::pow(4.0 / ((dd + 2.0) * static_cast<double>(n)),
                       1.0 / (dd + 4.0));
}

Eigen::VectorXd kde_ratio_weights(const FeatureMatrix& X_tr,
                                  const FeatureMatrix& X_te,
                                  double bandwidth_tr, double bandwidth_te,
                                  double B) {
  if (!(bandwidth_tr > 0.0) || !(bandwidth_te > 0.0)) {
    throw InputError("KDE bandwidths must be > 0");
  }
  require_box(B);
  const double d = static_cast<double>(X_tr.cols());
  // exp(-|x|^2 / (2 h^2)) is the Gaussian kernel with sigma = sqrt(2) h.
  auto density = [&](const FeatureMatrix& sample, double h) {
    const double norm = std::pow(2.0 * std::numbers::pi * h * h, -0.5 * d) /
                        static_cast<double>(sample.rows());
    return Eigen::VectorXd(
        norm * gram_row_sums(KernelSpec::gaussian(std::sqrt(2.0) * h), X_tr,
                             sample));
  };
  const Eigen::VectorXd p_tr = density(X_tr, bandwidth_tr);
  const Eigen::VectorXd p_te = density(X_te, bandwidth_te);
  Eigen::VectorXd beta(X_tr.rows());
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    beta(i) = std::clamp(p_te(i) / std::max(p_tr(i), kDensityFloor), 0.0, B);
  }
  return beta;
}

EstimateReport kde_ratio_estimate(const Dataset& train,
                                  const FeatureMatrix& X_te,
                                  double bandwidth_tr, double bandwidth_te,
                                  double B) {
  require_labels(train);
  require_test_dim(train, X_te);
  const Eigen::VectorXd beta = kde_ratio_weights(
      train.features(), X_te, bandwidth_tr, bandwidth_te, B);
  const double unit =
      beta.dot(train.labels()) / static_cast<double>(train.size());
  EstimateReport r = make_report(EstimatorKind::kKdeRatio, train, unit);
  r.weights = summarize(beta);
  return r;
}

EstimateReport oracle_estimate(const Dataset& train,
                               const Eigen::VectorXd& true_beta,
                               std::optional<double> B) {
  require_labels(train);
  if (true_beta.size() != train.size()) {
    std::ostringstream os;
    os << "true_beta has length " << true_beta.size() << ", expected "
       << train.size();
    throw InputError(os.str());
  }
  const double upper = B.value_or(std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < true_beta.size(); ++i) {
    if (!std::isfinite(true_beta(i)) || true_beta(i) < 0.0 ||
        true_beta(i) > upper) {
      std::ostringstream os;
      os << "true_beta[" << i << "] = " << true_beta(i)
         << " is outside [0, B]";
      throw InputError(os.str());
    }
  }
  const double unit =
      true_beta.dot(train.labels()) / static_cast<double>(train.size());
  EstimateReport r = make_report(EstimatorKind::kOracle, train, unit);
  r.weights = summarize(true_beta);
  return r;
}

ClassifierRanking rank_classifiers(const FeatureMatrix& X_tr,
                                   const Eigen::MatrixXd& losses,
                                   const FeatureMatrix& X_te,
                                   const KernelSpec& spec, double B,
                                   const KmmOptions& options,
                                   std::optional<LabelRange> loss_range) {
  if (losses.rows() != X_tr.rows()) {
    std::ostringstream os;
    os << "loss matrix has " << losses.rows() << " rows but there are "
       << X_tr.rows() << " training points";
    throw InputError(os.str());
  }
  if (losses.cols() < 1) throw InputError("need at least one classifier");
  require_box(B);

  Eigen::MatrixXd unit = losses;
  LabelAffine affine;
  for (Eigen::Index j = 0; j < unit.cols(); ++j) {
    affine = to_unit_interval(unit.col(j), loss_range, "loss");
  }

  const KmmFit fit = fit_kmm(X_tr, X_te, spec, B, options);
  const Eigen::VectorXd estimates =
      unit.transpose() * fit.weights.beta / static_cast<double>(X_tr.rows());

  ClassifierRanking ranking;
  for (Eigen::Index j = 0; j < estimates.size(); ++j) {
    ranking.entries.push_back(
        {j, affine.to_original(estimates(j)), estimates(j)});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedClassifier& a, const RankedClassifier& b) {
                     return a.estimate_unit < b.estimate_unit;
                   });
  ranking.weights = summarize(fit.weights.beta);
  ranking.weights.lhat = fit.weights.objective_value;
  ranking.weights.iterations = fit.weights.iterations;
  ranking.weights.converged = fit.weights.converged;
  return ranking;
}

std::map<std::string, double> error_decomposition(
    const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& true_beta,
    const Eigen::VectorXd& regression, const Eigen::VectorXd& labels,
    double ey_te) {
  const Eigen::Index n = beta_hat.size();
  if (true_beta.size() != n || regression.size() != n || labels.size() != n ||
      n == 0) {
    throw InputError("decomposition inputs must have one entry per point");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double noise = inv_n * beta_hat.dot(labels - regression);
  const double mismatch = inv_n * (beta_hat - true_beta).dot(regression);
  const double sampling = inv_n * true_beta.dot(regression) - ey_te;
  return {{"noise_term", noise},
          {"weight_mismatch_term", mismatch},
          {"sampling_term", sampling},
          {"total_error", inv_n * beta_hat.dot(labels) - ey_te}};
}

}  // namespace shiftweigh
