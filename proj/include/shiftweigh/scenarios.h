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

#ifndef SHIFTWEIGH_SCENARIOS_H_
#define SHIFTWEIGH_SCENARIOS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "shiftweigh/bounds.h"
#include "shiftweigh/dataset.h"
#include "shiftweigh/estimators.h"
#include "shiftweigh/kernels.h"

namespace shiftweigh {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-trial streams from a
// master seed so results do not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);
Rng make_rng(std::uint64_t seed);

// Normal(mean, sd) truncated to [0, 1].
struct TruncatedNormal {
  double mean;
  double sd;

  double mass() const;  // P(0 <= N(mean, sd) <= 1)
  double pdf(double x) const;
  double sample(Rng& rng) const;
};

// Finite mixture of products of truncated normals on [0, 1]^d.
struct BoxMixture {
  struct Component {
    double weight;
    std::vector<TruncatedNormal> coords;
  };
  std::vector<Component> components;

  Eigen::Index dim() const;
  double pdf(std::span<const double> x) const;
  FeatureMatrix sample(Rng& rng, Eigen::Index n) const;
};

enum class RegimeTag { kInRkhs, kPoly, kRough };
std::string to_string(RegimeTag tag);

struct LabelNoise {
  enum class Kind { kBernoulli, kClippedGaussian };
  Kind kind = Kind::kBernoulli;
  double sigma = 0.0;  // clipped Gaussian only
};

// A covariate-shift problem with known truth. Both samples share the label
// mechanism: Y | x is Bernoulli(center(x)) or clip(N(center(x), sigma), 0, 1),
// and the regression function m(x) = E[Y | x] is available in closed form.
struct ShiftScenario {
  std::string id;
  std::string description;
  BoxMixture train;
  BoxMixture test;
  LabelNoise noise;
  std::function<double(std::span<const double>)> center;
  RegimeTag regime = RegimeTag::kInRkhs;
  std::optional<double> norm_m;  // exact RKHS norm when regime is in-RKHS
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  double B_true = 1.0;  // sup of the density ratio on the box
  double ey_te = 0.0;   // E[Y^te] by adaptive quadrature

  Eigen::Index dim() const { return train.dim(); }
  double beta(std::span<const double> x) const;
  double regression(std::span<const double> x) const;
  double sample_label(std::span<const double> x, Rng& rng) const;
};

// S0 no shift, S1 in-RKHS 1-d, S2 rough 1-d, S3 2-d mixture shift. Built once.
const std::vector<ShiftScenario>& builtin_scenarios();
// InputError listing the available ids when unknown.
const ShiftScenario& find_scenario(const std::string& id);

// E[clip(N(center, sigma), 0, 1)].
double clipped_gaussian_mean(double center, double sigma);

// Integral of f over [0, 1]^dim (dim 1 or 2) by adaptive Gauss-Kronrod.
double integrate_box(const std::function<double(std::span<const double>)>& f,
                     Eigen::Index dim, std::vector<double> breakpoints = {});

// sup of f over [0, 1]^dim: grid search then compass refinement to 1e-12.
double maximize_box(const std::function<double(std::span<const double>)>& f,
                    Eigen::Index dim);

// One draw of training data (with labels), test covariates and the truth at
// the training points. Deterministic in the seed.
struct ScenarioSample {
  Dataset train;
  FeatureMatrix X_te;
  Eigen::VectorXd true_beta;
  Eigen::VectorXd regression;
};
ScenarioSample draw_sample(const ShiftScenario& scenario, Eigen::Index n_tr,
                           Eigen::Index n_te, std::uint64_t seed);

// Two synthetic classifiers whose losses are Bernoulli with probabilities
// 0.1 + 0.8 x_0 and a constant chosen so that the first one's true test risk
// exceeds the second's by exactly `gap`. Under the training distribution the
// order is typically reversed.
struct SyntheticClassifiers {
  std::vector<std::function<double(std::span<const double>)>> loss_prob;
  std::vector<double> true_risk;
};
SyntheticClassifiers synthetic_classifiers(const ShiftScenario& scenario,
                                           double gap = 0.2);
// 0/1 losses, one column per classifier, from a single uniform per row.
Eigen::MatrixXd sample_losses(const SyntheticClassifiers& classifiers,
                              const FeatureMatrix& X, Rng& rng);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kKmm;
  std::optional<KernelSpec> kernel;  // default: the scenario kernel
  std::optional<double> B;           // default: the scenario B_true
  std::optional<double> lambda;      // plug-in; default n_tr^(-2/3)
  std::optional<double> bandwidth_tr;  // KDE; default Silverman
  std::optional<double> bandwidth_te;
  KmmOptions kmm;
  bool diagnostics = false;  // fill TrialRecord::diagnostics (KMM only)
};

struct TrialRecord {
  std::string scenario;
  std::string estimator;
  Eigen::Index n_tr = 0;
  Eigen::Index n_te = 0;
  std::uint64_t seed = 0;
  double point = 0.0;      // unit-scale estimate
  double abs_error = 0.0;  // |point - E[Y^te]|
  std::optional<double> lhat;
  std::optional<bool> converged;
  double runtime_ms = 0.0;
  bool failed = false;
  std::string error;
  std::map<std::string, double> diagnostics;
};

TrialRecord run_trial(const ShiftScenario& scenario,
                      const EstimatorConfig& config, Eigen::Index n_tr,
                      Eigen::Index n_te, std::uint64_t seed);

// Calls fn(i) for i in [0, count) on `threads` workers (0 = hardware).
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

double median(std::vector<double> values);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> n_grid;
  std::vector<double> medians;
};

// Least-squares line through (log n, log value).
RateFit fit_rate(const std::vector<double>& n_grid,
                 const std::vector<double>& values);

struct RunOptions {
  Eigen::Index n_te = 0;  // 0: 10 * max(n_grid)
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // grid-major, rep-minor
  RateFit fit;
};

// Trial (grid index g, rep r) uses seed derive_seed(seed, g * reps + r), so
// different estimators swept with the same seed see the same data.
SweepResult sweep_rates(const ShiftScenario& scenario,
                        const EstimatorConfig& config,
                        const std::vector<Eigen::Index>& n_grid,
                        std::size_t reps, const RunOptions& options = {});

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes,
                                          std::size_t trials,
                                          double z = 1.959963984540054);

struct CoverageOptions {
  Eigen::Index n_tr = 1000;
  Eigen::Index n_te = 1000;
  double delta = 0.05;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Replaces B_true in both the solver box and the bound (negative control).
  std::optional<double> B_override;
  KmmOptions kmm;
};

struct CoverageResult {
  std::size_t covered = 0;
  std::size_t reps = 0;
  double fraction = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  BoundValue bound;
  std::vector<TrialRecord> records;
};

// Fraction of KMM trials whose error is within the in-RKHS bound computed
// from the scenario's exact B_true, C = sup_bound(kernel) and |m|_H. Only the
// in-RKHS regime has computable constants; anything else is a UsageError.
CoverageResult measure_coverage(const ShiftScenario& scenario,
                                const Regime& regime,
                                const CoverageOptions& options);

struct ComparisonRow {
  std::string estimator;
  Eigen::Index n_tr = 0;
  double median_abs_error = 0.0;
  double mean_abs_error = 0.0;
  std::size_t failures = 0;
};

struct Comparison {
  std::vector<TrialRecord> records;
  std::vector<ComparisonRow> rows;  // estimator-major, n ascending
};

Comparison compare_estimators(const ShiftScenario& scenario,
                              const std::vector<EstimatorConfig>& configs,
                              const std::vector<Eigen::Index>& n_grid,
                              std::size_t reps, const RunOptions& options = {});

// (1/n) sum_i (beta-hat_i - beta(X_i^tr))^2 with n_tr = n_te = n. Needs a
// Gaussian (characteristic) kernel.
double population_consistency_check(const ShiftScenario& scenario,
                                    Eigen::Index n, std::uint64_t seed,
                                    const KmmOptions& options = {});

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_SCENARIOS_H_
