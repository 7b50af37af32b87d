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

#ifndef SHIFTWEIGH_ESTIMATORS_H_
#define SHIFTWEIGH_ESTIMATORS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shiftweigh/dataset.h"
#include "shiftweigh/kernels.h"
#include "shiftweigh/kmm.h"

namespace shiftweigh {

enum class EstimatorKind { kKmm, kPlugin, kKdeRatio, kOracle };

// "kmm", "plugin", "kde_ratio", "oracle".
std::string to_string(EstimatorKind kind);
// Accepts the names above plus "kde" for kKdeRatio. InputError otherwise.
EstimatorKind parse_estimator_kind(const std::string& name);

struct WeightsSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // |mean(beta) - 1|; reported only, never constrained.
  double normalization_gap = 0.0;
  std::optional<double> lhat;  // KMM objective L-hat at the weights
  std::optional<std::size_t> iterations;
  std::optional<bool> converged;
};

WeightsSummary summarize(const Eigen::VectorXd& beta);

struct EstimateReport {
  EstimatorKind kind = EstimatorKind::kKmm;
  double point = 0.0;             // original label units
  double point_unit_scale = 0.0;  // [0, 1] label units, as used by bounds
  std::optional<WeightsSummary> weights;
  // Error decomposition terms; only filled in when the truth is known.
  std::map<std::string, double> diagnostics;
};

struct KmmOptions {
  SolverOptions solver;
  GramBackend backend = GramBackend::kAuto;
  FactorOptions factor;
};

struct KmmFit {
  QpProblem problem;
  Weights weights;
};

// Assembles and solves the KMM program for the given covariates.
KmmFit fit_kmm(const FeatureMatrix& X_tr, const FeatureMatrix& X_te,
               const KernelSpec& spec, double B, const KmmOptions& options = {});

// (1/n_tr) sum_i beta_i y_i for already-solved weights.
EstimateReport kmm_report(const Dataset& train, const Weights& weights);

EstimateReport kmm_estimate(const Dataset& train, const FeatureMatrix& X_te,
                            const KernelSpec& spec, double B,
                            const KmmOptions& options = {});

// n_tr^(-2/3): the regularization used when the smoothness of m is unknown.
double default_plugin_lambda(Eigen::Index n_tr);

struct PluginOptions {
  GramBackend backend = GramBackend::kAuto;
  FactorOptions factor;
};

// Kernel ridge regression m-hat with coefficients solving
// (K_tr + n_tr lambda I) a = y, averaged over the test covariates.
EstimateReport plugin_estimate(const Dataset& train, const FeatureMatrix& X_te,
                               const KernelSpec& spec, double lambda,
                               const PluginOptions& options = {});

// Rule-of-thumb Gaussian KDE bandwidth, sd * (4 / ((d + 2) n))^(1 / (d + 4)),
// with sd the mean per-coordinate sample standard deviation (1.0 if zero).
double silverman_bandwidth(const FeatureMatrix& X);

// Ratio of Gaussian kernel density estimates p_te / max(p_tr, 1e-12) at the
// training points, clipped to [0, B].
Eigen::VectorXd kde_ratio_weights(const FeatureMatrix& X_tr,
                                  const FeatureMatrix& X_te,
                                  double bandwidth_tr, double bandwidth_te,
                                  double B);

EstimateReport kde_ratio_estimate(const Dataset& train,
                                  const FeatureMatrix& X_te,
                                  double bandwidth_tr, double bandwidth_te,
                                  double B);

// Weighted mean with the true density ratio at the training points. When B
// is given every weight must lie in [0, B].
EstimateReport oracle_estimate(const Dataset& train,
                               const Eigen::VectorXd& true_beta,
                               std::optional<double> B = std::nullopt);

struct RankedClassifier {
  Eigen::Index index = 0;
  double estimate = 0.0;       // original loss units
  double estimate_unit = 0.0;  // [0, 1] units
};

struct ClassifierRanking {
  std::vector<RankedClassifier> entries;  // ascending estimated risk
  WeightsSummary weights;
};

// Solves KMM once on the covariates and reuses the weights for every loss
// column. Ties keep the column order.
ClassifierRanking rank_classifiers(const FeatureMatrix& X_tr,
                                   const Eigen::MatrixXd& losses,
                                   const FeatureMatrix& X_te,
                                   const KernelSpec& spec, double B,
                                   const KmmOptions& options = {},
                                   std::optional<LabelRange> loss_range =
                                       std::nullopt);

// Splits the error of a weighted estimate into
//   noise_term            (1/n) sum beta-hat_i (y_i - m_i)
//   weight_mismatch_term  (1/n) sum (beta-hat_i - beta_i) m_i
//   sampling_term         (1/n) sum beta_i m_i - E[Y_te]
// which add up to error = estimate - E[Y_te] exactly (up to rounding).
// Needs the true ratio and regression function, so synthetic data only.
std::map<std::string, double> error_decomposition(
    const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& true_beta,
    const Eigen::VectorXd& regression, const Eigen::VectorXd& labels,
    double ey_te);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_ESTIMATORS_H_
