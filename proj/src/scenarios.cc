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

#include "shiftweigh/scenarios.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

double std_normal_cdf(double t) {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double std_normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

double gauss_bumps(std::span<const double> x,
                   const std::vector<std::vector<double>>& centers,
                   const std::vector<double>& coef, double sigma) {
  double out = 0.0;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    double dist = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - centers[j][k];
      dist += d * d;
    }
    out += coef[j] * std::exp(-dist / (sigma * sigma));
  }
  return out;
}

// sqrt(a^T K_z a): RKHS norm of sum_j a_j k(., z_j).
double bump_norm(const std::vector<std::vector<double>>& centers,
                 const std::vector<double>& coef, const KernelSpec& kernel) {
  double sq = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      sq += coef[i] * coef[j] * eval(kernel, centers[i], centers[j]);
    }
  }
  return std::sqrt(sq);
}

void finalize(ShiftScenario& s, std::vector<double> breakpoints = {}) {
  const ShiftScenario& cs = s;
  s.B_true = maximize_box([&](std::span<const double> x) { return cs.beta(x); },
                          s.dim());
  s.ey_te = integrate_box(
      [&](std::span<const double> x) {
        return cs.regression(x) * cs.test.pdf(x);
      },
      s.dim(), std::move(breakpoints));
}

constexpr double kBumpSigma = 0.5;

ShiftScenario make_s1_like(std::string id, TruncatedNormal train,
                           TruncatedNormal test) {
  static const std::vector<std::vector<double>> centers = {{0.2}, {0.5}, {0.8}};
  static const std::vector<double> coef = {1.5, -2.0, 1.6};
  ShiftScenario s;
  s.id = std::move(id);
  s.train.components = {{1.0, {train}}};
  s.test.components = {{1.0, {test}}};
  s.noise = {LabelNoise::Kind::kBernoulli, 0.0};
  s.center = [](std::span<const double> x) {
    return gauss_bumps(x, centers, coef, kBumpSigma);
  };
  s.regime = RegimeTag::kInRkhs;
  s.kernel = KernelSpec::gaussian(kBumpSigma);
  s.norm_m = bump_norm(centers, coef, s.kernel);
  return s;
}

std::vector<ShiftScenario> build_scenarios() {
  std::vector<ShiftScenario> out;

  ShiftScenario s0 = make_s1_like("S0", {0.45, 0.2}, {0.45, 0.2});
  s0.description =
      "no shift: train = test = N(0.45, 0.2) on [0,1]; m in the RKHS of the "
      "Gaussian kernel (sigma 0.5); Bernoulli labels";
  finalize(s0);
  out.push_back(std::move(s0));

  ShiftScenario s1 = make_s1_like("S1", {0.3, 0.15}, {0.6, 0.15});
  s1.description =
      "1-d shift N(0.3, 0.15) -> N(0.6, 0.15) on [0,1]; m = 1.5 k(.,0.2) - "
      "2.0 k(.,0.5) + 1.6 k(.,0.8) in the RKHS of the Gaussian kernel "
      "(sigma 0.5); Bernoulli labels";
  finalize(s1);
  out.push_back(std::move(s1));

  ShiftScenario s2;
  s2.id = "S2";
  s2.description =
      "same marginals as S1; m = E[clip(N(0.1 + 1.6 tri(x), 0.05), 0, 1)] "
      "with the Lipschitz triangle tri(x) = min(x, 1 - x): not smooth, so "
      "only a logarithmic approximation rate holds for the Gaussian kernel";
  s2.train.components = {{1.0, {{0.3, 0.15}}}};
  s2.test.components = {{1.0, {{0.6, 0.15}}}};
  s2.noise = {LabelNoise::Kind::kClippedGaussian, 0.05};
  s2.center = [](std::span<const double> x) {
    return 0.1 + 1.6 * std::min(x[0], 1.0 - x[0]);
  };
  s2.regime = RegimeTag::kRough;
  s2.kernel = KernelSpec::gaussian(kBumpSigma);
  finalize(s2, {0.5});
  out.push_back(std::move(s2));

  static const std::vector<std::vector<double>> centers3 = {{0.3, 0.3},
                                                            {0.7, 0.6}};
  static const std::vector<double> coef3 = {0.45, 0.45};
  ShiftScenario s3;
  s3.id = "S3";
  s3.description =
      "2-d mixture shift: train N(0.5, 0.2)^2, test an even mixture of "
      "N((0.35, 0.4), 0.2) and N((0.65, 0.6), 0.2) on [0,1]^2; m is a sum "
      "of two Gaussian bumps in the RKHS (sigma 0.5); Bernoulli labels";
  s3.train.components = {{1.0, {{0.5, 0.2}, {0.5, 0.2}}}};
  s3.test.components = {{0.5, {{0.35, 0.2}, {0.4, 0.2}}},
                        {0.5, {{0.65, 0.2}, {0.6, 0.2}}}};
  s3.noise = {LabelNoise::Kind::kBernoulli, 0.0};
  s3.center = [](std::span<const double> x) {
    return gauss_bumps(x, centers3, coef3, kBumpSigma);
  };
  s3.regime = RegimeTag::kInRkhs;
  s3.kernel = KernelSpec::gaussian(kBumpSigma);
  s3.norm_m = bump_norm(centers3, coef3, s3.kernel);
  finalize(s3);
  out.push_back(std::move(s3));

  return out;
}

std::vector<Eigen::Index> checked_grid(const std::vector<Eigen::Index>& grid) {
  if (grid.empty()) throw InputError("n grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw InputError("n grid entries must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw InputError("n grid must be strictly ascending");
    }
  }
  return grid;
}

// Runs reps trials per grid point; records are grid-major.
std::vector<TrialRecord> run_grid(const ShiftScenario& scenario,
                                  const EstimatorConfig& config,
                                  const std::vector<Eigen::Index>& n_grid,
                                  std::size_t reps, Eigen::Index n_te,
                                  std::uint64_t seed, unsigned threads) {
  std::vector<TrialRecord> records(n_grid.size() * reps);
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const std::size_t g = i / reps;
    records[i] = run_trial(scenario, config, n_grid[g], n_te,
                           derive_seed(seed, i));
  });
  return records;
}

std::vector<double> grid_medians(const std::vector<TrialRecord>& records,
                                 std::size_t grid_size, std::size_t reps) {
  std::vector<double> medians;
  for (std::size_t g = 0; g < grid_size; ++g) {
    std::vector<double> errors;
    for (std::size_t r = 0; r < reps; ++r) {
      const TrialRecord& rec = records[g * reps + r];
      if (!rec.failed) errors.push_back(rec.abs_error);
    }
    medians.push_back(errors.empty() ? std::nan("") : median(errors));
  }
  return medians;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

double TruncatedNormal::mass() const {
  return std_normal_cdf((1.0 - mean) / sd) - std_normal_cdf((0.0 - mean) / sd);
}

double TruncatedNormal::pdf(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  return std_normal_pdf((x - mean) / sd) / (sd * mass());
}

double TruncatedNormal::sample(Rng& rng) const {
  std::normal_distribution<double> normal(mean, sd);
  while (true) {
    const double x = normal(rng);
    if (x >= 0.0 && x <= 1.0) return x;
  }
}

Eigen::Index BoxMixture::dim() const {
  return components.empty()
             ? 0
             : static_cast<Eigen::Index>(components.front().coords.size());
}

double BoxMixture::pdf(std::span<const double> x) const {
  double total = 0.0;
  for (const Component& c : components) {
    double p = c.weight;
    for (std::size_t k = 0; k < c.coords.size(); ++k) p *= c.coords[k].pdf(x[k]);
    total += p;
  }
  return total;
}

FeatureMatrix BoxMixture::sample(Rng& rng, Eigen::Index n) const {
  FeatureMatrix X(n, dim());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t pick = 0;
    if (components.size() > 1) {
      double u = unif(rng);
      while (pick + 1 < components.size() && u >= components[pick].weight) {
        u -= components[pick].weight;
        ++pick;
      }
    }
    const Component& c = components[pick];
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
      X(i, k) = c.coords[static_cast<std::size_t>(k)].sample(rng);
    }
  }
  return X;
}

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::kInRkhs:
      return "in_rkhs";
    case RegimeTag::kPoly:
      return "poly";
    case RegimeTag::kRough:
      return "rough";
  }
  return "unknown";
}

double ShiftScenario::beta(std::span<const double> x) const {
  return test.pdf(x) / train.pdf(x);
}

double ShiftScenario::regression(std::span<const double> x) const {
  const double c = center(x);
  if (noise.kind == LabelNoise::Kind::kBernoulli) return c;
  return clipped_gaussian_mean(c, noise.sigma);
}

double ShiftScenario::sample_label(std::span<const double> x, Rng& rng) const {
  const double c = center(x);
  if (noise.kind == LabelNoise::Kind::kBernoulli) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return unif(rng) < c ? 1.0 : 0.0;
  }
  std::normal_distribution<double> normal(c, noise.sigma);
  return std::clamp(normal(rng), 0.0, 1.0);
}

const std::vector<ShiftScenario>& builtin_scenarios() {
  static const std::vector<ShiftScenario> scenarios = build_scenarios();
  return scenarios;
}

const ShiftScenario& find_scenario(const std::string& id) {
  for (const ShiftScenario& s : builtin_scenarios()) {
    if (s.id == id) return s;
  }
  std::ostringstream os;
  os << "unknown scenario '" << id << "'; available:";
  for (const ShiftScenario& s : builtin_scenarios()) os << " " << s.id;
  throw InputError(os.str());
}

double clipped_gaussian_mean(double center, double sigma) {
  if (!(sigma > 0.0)) return std::clamp(center, 0.0, 1.0);
  const double a = (0.0 - center) / sigma;
  const double b = (1.0 - center) / sigma;
  return center * (std_normal_cdf(b) - std_normal_cdf(a)) +
         sigma * (std_normal_pdf(a) - std_normal_pdf(b)) +
         (1.0 - std_normal_cdf(b));
}

double integrate_box(const std::function<double(std::span<const double>)>& f,
                     Eigen::Index dim, std::vector<double> breakpoints) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> knots = {0.0};
  for (double b : breakpoints) {
    if (b > 0.0 && b < 1.0) knots.push_back(b);
  }
  knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());

  auto integrate_1d = [&](auto&& g) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      total += gauss_kronrod<double, 61>::integrate(g, knots[i], knots[i + 1],
                                                    15, 1e-13);
    }
    return total;
  };
  if (dim == 1) {
    return integrate_1d([&](double x) {
      const double pt[1] = {x};
      return f(pt);
    });
  }
  if (dim == 2) {
    return integrate_1d([&](double x0) {
      return integrate_1d([&](double x1) {
        const double pt[2] = {x0, x1};
        return f(pt);
      });
    });
  }
  throw InputError("quadrature is implemented for dimensions 1 and 2");
}

double maximize_box(const std::function<double(std::span<const double>)>& f,
                    Eigen::Index dim) {
  if (dim != 1 && dim != 2) {
    throw InputError("box maximization is implemented for dimensions 1 and 2");
  }
  const int steps = dim == 1 ? 10000 : 400;
  std::vector<double> best(static_cast<std::size_t>(dim), 0.0);
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> pt(static_cast<std::size_t>(dim));
  const int outer = dim == 1 ? 0 : steps;
  for (int a = 0; a <= outer; ++a) {
    for (int b = 0; b <= steps; ++b) {
      pt[0] = static_cast<double>(b) / steps;
      if (dim == 2) pt[1] = static_cast<double>(a) / steps;
      const double v = f(pt);
      if (v > best_value) {
        best_value = v;
        best = pt;
      }
    }
  }
  // Compass search from the best grid point.
  double h = 1.0 / steps;
  while (h > 1e-12) {
    bool moved = false;
    for (std::size_t k = 0; k < best.size(); ++k) {
      for (double dir : {-1.0, 1.0}) {
        pt = best;
        pt[k] = std::clamp(best[k] + dir * h, 0.0, 1.0);
        const double v = f(pt);
        if (v > best_value) {
          best_value = v;
          best = pt;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return best_value;
}

ScenarioSample draw_sample(const ShiftScenario& scenario, Eigen::Index n_tr,
                           Eigen::Index n_te, std::uint64_t seed) {
  if (n_tr < 1 || n_te < 1) throw InputError("sample sizes must be >= 1");
  Rng rng = make_rng(seed);
  FeatureMatrix X_tr = scenario.train.sample(rng, n_tr);
  Eigen::VectorXd y(n_tr), beta(n_tr), m(n_tr);
  for (Eigen::Index i = 0; i < n_tr; ++i) {
    const std::span<const double> x(X_tr.row(i).data(), X_tr.cols());
    y(i) = scenario.sample_label(x, rng);
    beta(i) = scenario.beta(x);
    m(i) = scenario.regression(x);
  }
  FeatureMatrix X_te = scenario.test.sample(rng, n_te);
  return {Dataset::labeled(std::move(X_tr), y), std::move(X_te),
          std::move(beta), std::move(m)};
}

SyntheticClassifiers synthetic_classifiers(const ShiftScenario& scenario,
                                           double gap) {
  SyntheticClassifiers out;
  auto first = [](std::span<const double> x) { return 0.1 + 0.8 * x[0]; };
  const double risk_first = integrate_box(
      [&](std::span<const double> x) {
        return first(x) * scenario.test.pdf(x);
      },
      scenario.dim());
  const double constant = risk_first - gap;
  if (constant < 0.0 || constant > 1.0) {
    throw InputError("risk gap is not attainable for this scenario");
  }
  out.loss_prob.push_back(first);
  out.loss_prob.push_back([constant](std::span<const double>) {
    return constant;
  });
  out.true_risk = {risk_first, constant};
  return out;
}

Eigen::MatrixXd sample_losses(const SyntheticClassifiers& classifiers,
                              const FeatureMatrix& X, Rng& rng) {
  // One uniform per row shared by all classifiers: they tend to err on the
  // same points, as real classifiers do.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd Z(X.rows(),
                    static_cast<Eigen::Index>(classifiers.loss_prob.size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const std::span<const double> x(X.row(i).data(), X.cols());
    const double u = unif(rng);
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      Z(i, j) =
          u < classifiers.loss_prob[static_cast<std::size_t>(j)](x) ? 1.0 : 0.0;
    }
  }
  return Z;
}

TrialRecord run_trial(const ShiftScenario& scenario,
                      const EstimatorConfig& config, Eigen::Index n_tr,
                      Eigen::Index n_te, std::uint64_t seed) {
  TrialRecord rec;
  rec.scenario = scenario.id;
  rec.estimator = to_string(config.kind);
  rec.n_tr = n_tr;
  rec.n_te = n_te;
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const ScenarioSample sample = draw_sample(scenario, n_tr, n_te, seed);
    const KernelSpec kernel = config.kernel.value_or(scenario.kernel);
    const double B = config.B.value_or(scenario.B_true);
    EstimateReport report;
    switch (config.kind) {
      case EstimatorKind::kKmm: {
        const KmmFit fit = fit_kmm(sample.train.features(), sample.X_te,
                                   kernel, B, config.kmm);
        report = kmm_report(sample.train, fit.weights);
        if (config.diagnostics) {
          rec.diagnostics = error_decomposition(
              fit.weights.beta, sample.true_beta, sample.regression,
              sample.train.labels(), scenario.ey_te);
          rec.diagnostics["lhat_kmm"] = fit.weights.objective_value;
          rec.diagnostics["lhat_true_beta"] =
              objective_norm(fit.problem, sample.true_beta);
        }
        break;
      }
      case EstimatorKind::kPlugin:
        report = plugin_estimate(
            sample.train, sample.X_te, kernel,
            config.lambda.value_or(default_plugin_lambda(n_tr)),
            PluginOptions{config.kmm.backend, config.kmm.factor});
        break;
      case EstimatorKind::kKdeRatio:
        report = kde_ratio_estimate(
            sample.train, sample.X_te,
            config.bandwidth_tr.value_or(
                silverman_bandwidth(sample.train.features())),
            config.bandwidth_te.value_or(silverman_bandwidth(sample.X_te)), B);
        break;
      case EstimatorKind::kOracle:
        report = oracle_estimate(sample.train, sample.true_beta);
        break;
    }
    rec.point = report.point_unit_scale;
    rec.abs_error = std::abs(report.point_unit_scale - scenario.ey_te);
    if (report.weights) {
      rec.lhat = report.weights->lhat;
      rec.converged = report.weights->converged;
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.abs_error = std::nan("");
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return rec;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

RateFit fit_rate(const std::vector<double>& n_grid,
                 const std::vector<double>& values) {
  if (n_grid.size() != values.size() || n_grid.size() < 2) {
    throw InputError("rate fit needs at least two (n, value) pairs");
  }
  const std::size_t k = n_grid.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(n_grid[i] > 0.0) || !(values[i] > 0.0)) {
      throw InputError("rate fit needs positive n and values");
    }
    lx[i] = std::log(n_grid[i]);
    ly[i] = std::log(values[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InputError("rate fit needs distinct n values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.n_grid = n_grid;
  fit.medians = values;
  return fit;
}

SweepResult sweep_rates(const ShiftScenario& scenario,
                        const EstimatorConfig& config,
                        const std::vector<Eigen::Index>& n_grid,
                        std::size_t reps, const RunOptions& options) {
  const std::vector<Eigen::Index> grid = checked_grid(n_grid);
  if (reps < 30) throw InputError("rate sweeps need reps >= 30");
  const Eigen::Index n_te =
      options.n_te > 0 ? options.n_te : 10 * grid.back();
  SweepResult result;
  result.records = run_grid(scenario, config, grid, reps, n_te, options.seed,
                            options.threads);
  std::vector<double> ns(grid.begin(), grid.end());
  result.fit =
      fit_rate(ns, grid_medians(result.records, grid.size(), reps));
  return result;
}

std::pair<double, double> wilson_interval(std::size_t successes,
                                          std::size_t trials, double z) {
  if (trials == 0) throw InputError("Wilson interval needs trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

CoverageResult measure_coverage(const ShiftScenario& scenario,
                                const Regime& regime,
                                const CoverageOptions& options) {
  if (!std::holds_alternative<InRkhs>(regime)) {
    throw UsageError(
        "coverage is only verifiable for the in-RKHS bound; the constants of "
        "the other regimes are not available for synthetic scenarios");
  }
  if (scenario.regime != RegimeTag::kInRkhs || !scenario.norm_m) {
    throw UsageError("scenario " + scenario.id + " is tagged " +
                     to_string(scenario.regime) +
                     "; the in-RKHS bound needs an exact |m|_H");
  }
  if (options.reps == 0) throw InputError("coverage needs reps >= 1");

  const double B = options.B_override.value_or(scenario.B_true);
  BoundInputs inputs;
  inputs.B = B;
  inputs.C = sup_bound(scenario.kernel);
  inputs.delta = options.delta;
  inputs.n_tr = static_cast<std::uint64_t>(options.n_tr);
  inputs.n_te = static_cast<std::uint64_t>(options.n_te);
  inputs.regime = InRkhs{*scenario.norm_m};

  CoverageResult result;
  result.bound = bound_thm1(inputs);
  result.reps = options.reps;

  EstimatorConfig config;
  config.kind = EstimatorKind::kKmm;
  config.B = B;
  config.kmm = options.kmm;
  result.records.resize(options.reps);
  parallel_for(options.reps, options.threads, [&](std::size_t i) {
    result.records[i] = run_trial(scenario, config, options.n_tr, options.n_te,
                                  derive_seed(options.seed, i));
  });
  for (const TrialRecord& rec : result.records) {
    if (!rec.failed && rec.abs_error <= result.bound.total) ++result.covered;
  }
  result.fraction =
      static_cast<double>(result.covered) / static_cast<double>(options.reps);
  std::tie(result.wilson_low, result.wilson_high) =
      wilson_interval(result.covered, options.reps);
  return result;
}

Comparison compare_estimators(const ShiftScenario& scenario,
                              const std::vector<EstimatorConfig>& configs,
                              const std::vector<Eigen::Index>& n_grid,
                              std::size_t reps, const RunOptions& options) {
  const std::vector<Eigen::Index> grid = checked_grid(n_grid);
  if (reps == 0) throw InputError("comparison needs reps >= 1");
  const Eigen::Index n_te =
      options.n_te > 0 ? options.n_te : 10 * grid.back();
  Comparison out;
  for (const EstimatorConfig& config : configs) {
    std::vector<TrialRecord> records = run_grid(
        scenario, config, grid, reps, n_te, options.seed, options.threads);
    const std::vector<double> medians =
        grid_medians(records, grid.size(), reps);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      ComparisonRow row;
      row.estimator = to_string(config.kind);
      row.n_tr = grid[g];
      row.median_abs_error = medians[g];
      double sum = 0.0;
      std::size_t ok = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const TrialRecord& rec = records[g * reps + r];
        if (rec.failed) {
          ++row.failures;
        } else {
          sum += rec.abs_error;
          ++ok;
        }
      }
      row.mean_abs_error = ok > 0 ? sum / static_cast<double>(ok) : std::nan("");
      out.rows.push_back(row);
    }
    out.records.insert(out.records.end(),
                       std::make_move_iterator(records.begin()),
                       std::make_move_iterator(records.end()));
  }
  return out;
}

double population_consistency_check(const ShiftScenario& scenario,
                                    Eigen::Index n, std::uint64_t seed,
                                    const KmmOptions& options) {
  if (!std::holds_alternative<Gaussian>(scenario.kernel.family())) {
    throw UsageError(
        "population consistency needs a characteristic (Gaussian) kernel");
  }
  const ScenarioSample sample = draw_sample(scenario, n, n, seed);
  const KmmFit fit = fit_kmm(sample.train.features(), sample.X_te,
                             scenario.kernel, scenario.B_true, options);
  return (fit.weights.beta - sample.true_beta).squaredNorm() /
         static_cast<double>(n);
}

}  // namespace shiftweigh
