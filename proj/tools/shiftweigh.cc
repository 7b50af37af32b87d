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

// shiftweigh command-line tool.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "shiftweigh/bounds.h"
#include "shiftweigh/errors.h"
#include "shiftweigh/estimators.h"
#include "shiftweigh/io.h"
#include "shiftweigh/kmm.h"
#include "shiftweigh/scenarios.h"

namespace sw = shiftweigh;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

void setup_logging() {
  auto logger = spdlog::stderr_color_st("shiftweigh");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SHIFTWEIGH_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown SHIFTWEIGH_LOG level '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

int report_error(const char* kind, const std::string& message, int code) {
  sw::Json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  return code;
}

void emit_json(const sw::Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    sw::write_json_file(out, j);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sw::InputError("cannot write '" + path + "'");
  return out;
}

struct SolverFlags {
  double tol = 1e-8;
  std::size_t max_iter = 0;
  std::string backend = "auto";

  void add(CLI::App* app) {
    app->add_option("--tol", tol, "Solver residual tolerance")
        ->capture_default_str();
    app->add_option("--max-iter", max_iter,
                    "Solver iteration cap (0: 50 n + 10000)");
    app->add_option("--backend", backend, "Gram backend")
        ->check(CLI::IsMember({"auto", "dense", "factored"}))
        ->capture_default_str();
  }

  sw::KmmOptions options() const {
    sw::KmmOptions o;
    o.solver.tol = tol;
    o.solver.max_iter = max_iter;
    o.backend = backend == "dense"      ? sw::GramBackend::kDense
                : backend == "factored" ? sw::GramBackend::kFactored
                                        : sw::GramBackend::kAuto;
    return o;
  }
};

std::optional<sw::LabelRange> label_range(const std::optional<double>& lo,
                                          const std::optional<double>& hi,
                                          const char* what) {
  if (!lo && !hi) return std::nullopt;
  if (!lo || !hi) {
    throw sw::InputError(std::string(what) +
                         " range needs both the min and the max flag");
  }
  return sw::LabelRange{*lo, *hi};
}

void check_feature_match(const sw::CsvColumns& a, const std::string& a_name,
                         const sw::CsvColumns& b, const std::string& b_name) {
  if (a.feature_names != b.feature_names) {
    std::ostringstream os;
    os << "feature columns differ between " << a_name << " and " << b_name
       << ":";
    for (const auto& n : a.feature_names) os << " " << n;
    os << " vs";
    for (const auto& n : b.feature_names) os << " " << n;
    throw sw::InputError(os.str());
  }
}

std::vector<Eigen::Index> parse_grid(const std::string& text) {
  std::vector<Eigen::Index> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 1) {
      throw sw::InputError("--n-grid: '" + item + "' is not a positive integer");
    }
    grid.push_back(static_cast<Eigen::Index>(v));
  }
  return grid;
}

// ---------------------------------------------------------------- weights

struct WeightsCmd {
  std::string train, test, kernel, out, summary;
  double B = 1.0;
  SolverFlags solver;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("weights", "Solve the KMM program for weights");
    cmd->add_option("--train", train, "Training CSV")->required();
    cmd->add_option("--test", test, "Test CSV")->required();
    cmd->add_option("--kernel", kernel, "Kernel JSON text or file")->required();
    cmd->add_option("--B", B, "Upper box bound on the weights")->required();
    cmd->add_option("--out", out, "Weights CSV output")->required();
    cmd->add_option("--summary", summary, "Summary JSON output (default stdout)");
    solver.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    const sw::KernelSpec spec = sw::parse_kernel_argument(kernel);
    const sw::CsvColumns tr = sw::split_columns(sw::read_csv_file(train), train);
    const sw::CsvColumns te = sw::split_columns(sw::read_csv_file(test), test);
    check_feature_match(tr, train, te, test);
    const sw::KmmFit fit =
        sw::fit_kmm(tr.features, te.features, spec, B, solver.options());
    spdlog::info("weights: {} iterations, residual {}, converged {}",
                 fit.weights.iterations, fit.weights.residual,
                 fit.weights.converged);
    {
      std::ofstream csv = open_output(out);
      std::vector<std::string> head = {"row", "beta_hat"};
      if (tr.beta_true) head.push_back("beta_true");
      sw::write_csv_row(csv, head);
      for (Eigen::Index i = 0; i < fit.weights.beta.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i + 1),
                                        sw::format_double(fit.weights.beta(i))};
        if (tr.beta_true) row.push_back(sw::format_double((*tr.beta_true)(i)));
        sw::write_csv_row(csv, row);
      }
    }
    sw::Json j;
    j["n_tr"] = fit.weights.beta.size();
    j["n_te"] = te.features.rows();
    j["kernel"] = sw::kernel_to_json(spec);
    j["B"] = B;
    j["lhat"] = fit.weights.objective_value;
    j["iterations"] = fit.weights.iterations;
    j["converged"] = fit.weights.converged;
    j["residual"] = fit.weights.residual;
    j["summary"] = sw::to_json(sw::summarize(fit.weights.beta));
    emit_json(j, summary);
  }
};

// --------------------------------------------------------------- estimate

struct EstimateCmd {
  std::string train, test, kernel, estimator = "kmm", out;
  std::optional<double> B, lambda, bandwidth_tr, bandwidth_te, label_min,
      label_max;
  SolverFlags solver;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("estimate", "Estimate the test-set label mean");
    cmd->add_option("--train", train, "Training CSV with a y column")->required();
    cmd->add_option("--test", test, "Test CSV")->required();
    cmd->add_option("--estimator", estimator, "Estimator")
        ->check(CLI::IsMember({"kmm", "plugin", "kde", "oracle"}))
        ->capture_default_str();
    cmd->add_option("--kernel", kernel, "Kernel JSON text or file (kmm, plugin)");
    cmd->add_option("--B", B, "Upper box bound (kmm, kde)");
    cmd->add_option("--lambda", lambda, "Ridge parameter (plugin; default n^-2/3)");
    cmd->add_option("--bandwidth-tr", bandwidth_tr, "KDE bandwidth, train");
    cmd->add_option("--bandwidth-te", bandwidth_te, "KDE bandwidth, test");
    cmd->add_option("--label-min", label_min, "Declared label range minimum");
    cmd->add_option("--label-max", label_max, "Declared label range maximum");
    cmd->add_option("--out", out, "Report JSON output (default stdout)");
    solver.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    const sw::EstimatorKind kind = sw::parse_estimator_kind(estimator);
    const bool needs_kernel =
        kind == sw::EstimatorKind::kKmm || kind == sw::EstimatorKind::kPlugin;
    const bool needs_B =
        kind == sw::EstimatorKind::kKmm || kind == sw::EstimatorKind::kKdeRatio;
    if (needs_kernel && kernel.empty()) {
      throw sw::UsageError("--kernel is required for --estimator " + estimator);
    }
    if (needs_B && !B) {
      throw sw::UsageError("--B is required for --estimator " + estimator);
    }
    const auto range = label_range(label_min, label_max, "label");
    const sw::CsvColumns tr = sw::split_columns(sw::read_csv_file(train), train);
    const sw::CsvColumns te = sw::split_columns(sw::read_csv_file(test), test);
    check_feature_match(tr, train, te, test);
    if (!tr.y) throw sw::InputError(train + ": missing label column 'y'");
    const sw::Dataset data = sw::Dataset::labeled(tr.features, *tr.y, range);
    sw::EstimateReport report;
    switch (kind) {
      case sw::EstimatorKind::kKmm:
        report = sw::kmm_estimate(data, te.features,
                                  sw::parse_kernel_argument(kernel), *B,
                                  solver.options());
        break;
      case sw::EstimatorKind::kPlugin: {
        const sw::KmmOptions o = solver.options();
        report = sw::plugin_estimate(
            data, te.features, sw::parse_kernel_argument(kernel),
            lambda.value_or(sw::default_plugin_lambda(data.size())),
            sw::PluginOptions{o.backend, o.factor});
        break;
      }
      case sw::EstimatorKind::kKdeRatio:
        report = sw::kde_ratio_estimate(
            data, te.features,
            bandwidth_tr.value_or(sw::silverman_bandwidth(tr.features)),
            bandwidth_te.value_or(sw::silverman_bandwidth(te.features)), *B);
        break;
      case sw::EstimatorKind::kOracle:
        if (!tr.beta_true) {
          throw sw::InputError(train +
                               ": oracle estimator needs a beta_true column");
        }
        report = sw::oracle_estimate(data, *tr.beta_true, B);
        break;
    }
    emit_json(sw::to_json(report), out);
  }
};

// ------------------------------------------------------------------ bound

struct BoundCmd {
  std::string inputs, regime, out;
  std::optional<double> B, C, delta, norm_m, C2, theta, Cinf, s, C1;
  std::optional<std::uint64_t> n_tr, n_te;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("bound", "Evaluate a confidence bound");
    auto* in = cmd->add_option("--inputs", inputs, "Bound inputs as JSON text or file");
    auto* rg = cmd->add_option("--regime", regime, "thm1, thm2, thm3 or thm4")
                   ->check(CLI::IsMember({"thm1", "thm2", "thm3", "thm4"}));
    in->excludes(rg);
    cmd->add_option("--B", B, "Sup of the density ratio");
    cmd->add_option("--C", C, "Kernel sup constant");
    cmd->add_option("--delta", delta, "Failure probability");
    cmd->add_option("--n-tr", n_tr, "Training sample size");
    cmd->add_option("--n-te", n_te, "Test sample size");
    cmd->add_option("--norm-m", norm_m, "RKHS norm of m (thm1)");
    cmd->add_option("--C2", C2, "Approximation constant (thm2)");
    cmd->add_option("--theta", theta, "Smoothness exponent (thm2, thm4)");
    cmd->add_option("--Cinf", Cinf, "Approximation constant (thm3)");
    cmd->add_option("--s", s, "Logarithmic exponent (thm3)");
    cmd->add_option("--C1", C1, "Approximation constant (thm4)");
    cmd->add_option("--out", out, "Bound JSON output (default stdout)");
    cmd->callback([this] { run(); });
  }

  static double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw sw::UsageError(std::string("missing ") + flag);
    return *v;
  }

  sw::BoundInputs from_flags() const {
    if (regime.empty()) throw sw::UsageError("give --inputs or --regime");
    if (!n_tr || !n_te) throw sw::UsageError("missing --n-tr or --n-te");
    sw::BoundInputs in;
    in.B = need(B, "--B");
    in.C = need(C, "--C");
    in.delta = need(delta, "--delta");
    in.n_tr = *n_tr;
    in.n_te = *n_te;
    if (regime == "thm1") {
      in.regime = sw::InRkhs{need(norm_m, "--norm-m")};
    } else if (regime == "thm2") {
      in.regime = sw::PolyApprox{need(C2, "--C2"), need(theta, "--theta")};
    } else if (regime == "thm3") {
      in.regime = sw::LogApprox{need(Cinf, "--Cinf"), need(s, "--s")};
    } else {
      in.regime = sw::PluginPoly{need(C1, "--C1"), need(theta, "--theta")};
    }
    return in;
  }

  void run() const {
    sw::BoundInputs in;
    if (!inputs.empty()) {
      std::string text = inputs;
      if (text.find('{') == std::string::npos) {
        std::ifstream f(inputs);
        if (!f) throw sw::InputError("cannot open '" + inputs + "'");
        text.assign(std::istreambuf_iterator<char>(f), {});
      }
      const sw::Json j = sw::Json::parse(text, nullptr, false);
      if (j.is_discarded()) throw sw::InputError("bound inputs: invalid JSON");
      in = sw::bound_inputs_from_json(j);
    } else {
      in = from_flags();
    }
    sw::Json j;
    j["inputs"] = sw::bound_inputs_to_json(in);
    j["bound"] = sw::to_json(sw::bound_for(in));
    emit_json(j, out);
  }
};

// ------------------------------------------------------------- experiment

struct ExperimentCmd {
  std::string scenario, n_grid = "250,500,1000,2000,4000", out, timing = "on";
  std::vector<std::string> estimators;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Eigen::Index n_te = 0;
  bool coverage = false;
  Eigen::Index coverage_n = 1000;
  std::size_t coverage_reps = 200;
  double delta = 0.05;
  std::optional<double> B, lambda;
  SolverFlags solver;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "experiment", "Run a Monte-Carlo sweep on a synthetic scenario");
    cmd->add_option("--scenario", scenario, "Scenario id")->required();
    cmd->add_option("--estimator", estimators,
                    "Estimators, repeatable or comma separated (default kmm)")
        ->delimiter(',')
        ->check(CLI::IsMember({"kmm", "plugin", "kde", "oracle"}));
    cmd->add_option("--n-grid", n_grid, "Comma-separated training sizes")
        ->capture_default_str();
    cmd->add_option("--reps", reps, "Trials per grid point")->capture_default_str();
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads (0: all cores)")
        ->capture_default_str();
    cmd->add_option("--n-te", n_te, "Test size (default 10 max(n-grid))");
    cmd->add_option("--B", B, "Box bound (default: the scenario's true B)");
    cmd->add_option("--lambda", lambda, "Plug-in ridge (default n^-2/3)");
    cmd->add_flag("--coverage", coverage, "Also measure in-RKHS bound coverage");
    cmd->add_option("--coverage-n", coverage_n, "n_tr = n_te for coverage")
        ->capture_default_str();
    cmd->add_option("--coverage-reps", coverage_reps, "Coverage trials")
        ->capture_default_str();
    cmd->add_option("--delta", delta, "Coverage failure probability")
        ->capture_default_str();
    cmd->add_option("--timing", timing, "Record runtime_ms (off: write 0)")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "Output directory")->required();
    solver.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    const sw::ShiftScenario& sc = sw::find_scenario(scenario);
    if (reps < 1) throw sw::InputError("--reps must be >= 1");
    const std::vector<Eigen::Index> grid = parse_grid(n_grid);
    std::vector<std::string> kinds = estimators;
    if (kinds.empty()) kinds.push_back("kmm");

    std::vector<sw::EstimatorConfig> configs;
    for (const std::string& k : kinds) {
      sw::EstimatorConfig c;
      c.kind = sw::parse_estimator_kind(k);
      c.B = B;
      c.lambda = lambda;
      c.kmm = solver.options();
      configs.push_back(c);
    }
    sw::RunOptions run_opts;
    run_opts.n_te = n_te;
    run_opts.seed = seed;
    run_opts.threads = threads;

    std::filesystem::create_directories(out);
    spdlog::info("experiment {}: {} estimators, {} grid points, {} reps",
                 sc.id, configs.size(), grid.size(), reps);
    const sw::Comparison cmp =
        sw::compare_estimators(sc, configs, grid, reps, run_opts);
    {
      std::ofstream f = open_output(out + "/trials.csv");
      sw::write_trials_csv(f, cmp.records, timing == "on");
    }
    {
      std::ofstream f = open_output(out + "/medians.csv");
      sw::write_csv_row(f, {"scenario", "estimator", "n_tr", "median_abs_error",
                            "mean_abs_error", "failures"});
      for (const sw::ComparisonRow& r : cmp.rows) {
        sw::write_csv_row(f, {sc.id, r.estimator, std::to_string(r.n_tr),
                              sw::format_double(r.median_abs_error),
                              sw::format_double(r.mean_abs_error),
                              std::to_string(r.failures)});
      }
    }
    sw::Json rates;
    rates["scenario"] = sc.id;
    rates["reps"] = reps;
    rates["seed"] = seed;
    rates["n_te"] = n_te > 0 ? n_te : 10 * grid.back();
    rates["fits"] = sw::Json::object();
    for (std::size_t e = 0; e < configs.size(); ++e) {
      std::vector<double> ns, med;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const sw::ComparisonRow& r = cmp.rows[e * grid.size() + g];
        ns.push_back(static_cast<double>(r.n_tr));
        med.push_back(r.median_abs_error);
      }
      const std::string name = sw::to_string(configs[e].kind);
      if (grid.size() >= 2) {
        rates["fits"][name] = sw::to_json(sw::fit_rate(ns, med));
      } else {
        rates["fits"][name] = nullptr;
      }
    }
    sw::write_json_file(out + "/rates.json", rates);

    if (coverage) {
      sw::CoverageOptions co;
      co.n_tr = coverage_n;
      co.n_te = coverage_n;
      co.delta = delta;
      co.reps = coverage_reps;
      co.seed = seed;
      co.threads = threads;
      co.B_override = B;
      co.kmm = solver.options();
      const sw::CoverageResult res = sw::measure_coverage(
          sc, sw::InRkhs{sc.norm_m.value_or(0.0)}, co);
      sw::Json j = sw::to_json(res);
      j["scenario"] = sc.id;
      sw::write_json_file(out + "/coverage.json", j);
    }
  }
};

// ------------------------------------------------------------------- rank

struct RankCmd {
  std::string train, losses, test, kernel, out;
  double B = 1.0;
  std::optional<double> loss_min, loss_max;
  SolverFlags solver;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("rank", "Rank classifiers by estimated test risk");
    cmd->add_option("--train", train, "Training features CSV")->required();
    cmd->add_option("--losses", losses,
                    "Per-row losses CSV, one column per classifier")
        ->required();
    cmd->add_option("--test", test, "Test features CSV")->required();
    cmd->add_option("--kernel", kernel, "Kernel JSON text or file")->required();
    cmd->add_option("--B", B, "Upper box bound on the weights")->required();
    cmd->add_option("--loss-min", loss_min, "Declared loss range minimum");
    cmd->add_option("--loss-max", loss_max, "Declared loss range maximum");
    cmd->add_option("--out", out, "Ranking JSON output (default stdout)");
    solver.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    const sw::KernelSpec spec = sw::parse_kernel_argument(kernel);
    const auto range = label_range(loss_min, loss_max, "loss");
    const sw::CsvColumns tr = sw::split_columns(sw::read_csv_file(train), train);
    const sw::CsvColumns te = sw::split_columns(sw::read_csv_file(test), test);
    check_feature_match(tr, train, te, test);
    const sw::CsvTable loss_table = sw::read_csv_file(losses);
    const Eigen::MatrixXd Z = sw::table_matrix(loss_table);
    if (Z.rows() != tr.features.rows()) {
      throw sw::InputError(losses + " has " + std::to_string(Z.rows()) +
                           " rows but " + train + " has " +
                           std::to_string(tr.features.rows()));
    }
    const sw::ClassifierRanking ranking = sw::rank_classifiers(
        tr.features, Z, te.features, spec, B, solver.options(), range);
    sw::Json j = sw::to_json(ranking);
    for (auto& item : j["ranking"]) {
      item["name"] =
          loss_table.header[static_cast<std::size_t>(item["index"].get<long>())];
    }
    emit_json(j, out);
  }
};

// ----------------------------------------------------------------- export

struct ExportCmd {
  std::string scenario, out;
  Eigen::Index n_tr = 1000, n_te = 1000;
  std::uint64_t seed = 0;
  double gap = 0.2;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "export", "Write a seeded scenario sample as CSV files");
    cmd->add_option("--scenario", scenario, "Scenario id")->required();
    cmd->add_option("--n-tr", n_tr, "Training size")->capture_default_str();
    cmd->add_option("--n-te", n_te, "Test size")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed")->capture_default_str();
    cmd->add_option("--risk-gap", gap, "True risk gap of the two classifiers")
        ->capture_default_str();
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const sw::ShiftScenario& sc = sw::find_scenario(scenario);
    const sw::ScenarioSample sample = sw::draw_sample(sc, n_tr, n_te, seed);
    const sw::SyntheticClassifiers cls = sw::synthetic_classifiers(sc, gap);
    sw::Rng rng = sw::make_rng(sw::derive_seed(seed, 0x6c6f73736573ULL));
    const Eigen::MatrixXd Z =
        sw::sample_losses(cls, sample.train.features(), rng);

    std::filesystem::create_directories(out);
    std::vector<std::string> feat;
    for (Eigen::Index k = 0; k < sc.dim(); ++k) {
      feat.push_back("x" + std::to_string(k));
    }
    {
      std::ofstream f = open_output(out + "/train.csv");
      std::vector<std::string> head = feat;
      head.push_back("y");
      head.push_back("beta_true");
      sw::write_csv_row(f, head);
      const sw::FeatureMatrix& X = sample.train.features();
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index k = 0; k < X.cols(); ++k) {
          row.push_back(sw::format_double(X(i, k)));
        }
        row.push_back(sw::format_double(sample.train.labels()(i)));
        row.push_back(sw::format_double(sample.true_beta(i)));
        sw::write_csv_row(f, row);
      }
    }
    {
      std::ofstream f = open_output(out + "/test.csv");
      sw::write_csv_row(f, feat);
      for (Eigen::Index i = 0; i < sample.X_te.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index k = 0; k < sample.X_te.cols(); ++k) {
          row.push_back(sw::format_double(sample.X_te(i, k)));
        }
        sw::write_csv_row(f, row);
      }
    }
    {
      std::ofstream f = open_output(out + "/losses.csv");
      sw::write_csv_row(f, {"loss_a", "loss_b"});
      for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        sw::write_csv_row(f, {sw::format_double(Z(i, 0)),
                              sw::format_double(Z(i, 1))});
      }
    }
    sw::Json truth;
    truth["scenario"] = sc.id;
    truth["description"] = sc.description;
    truth["seed"] = seed;
    truth["n_tr"] = n_tr;
    truth["n_te"] = n_te;
    truth["kernel"] = sw::kernel_to_json(sc.kernel);
    truth["B_true"] = sc.B_true;
    truth["ey_te"] = sc.ey_te;
    truth["norm_m"] = sc.norm_m ? sw::Json(*sc.norm_m) : sw::Json(nullptr);
    truth["regime"] = sw::to_string(sc.regime);
    truth["true_risks"] = {{"loss_a", cls.true_risk[0]},
                           {"loss_b", cls.true_risk[1]}};
    sw::write_json_file(out + "/truth.json", truth);
  }
};

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Bias-corrected mean estimation under covariate shift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "shiftweigh 0.1.0");

  WeightsCmd weights;
  EstimateCmd estimate;
  BoundCmd bound;
  ExperimentCmd experiment;
  RankCmd rank;
  ExportCmd export_cmd;
  weights.add(app);
  estimate.add(app);
  bound.add(app);
  experiment.add(app);
  rank.add(app);
  export_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitInput);
  } catch (const sw::InputError& e) {
    return report_error("input", e.what(), kExitInput);
  } catch (const sw::DomainError& e) {
    return report_error("domain", e.what(), kExitInput);
  } catch (const sw::UsageError& e) {
    return report_error("usage", e.what(), kExitInput);
  } catch (const sw::NumericalError& e) {
    return report_error("numerical", e.what(), kExitInternal);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kExitInternal);
  }
  return 0;
}
