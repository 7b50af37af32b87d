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

#include "shiftweigh/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shiftweigh/errors.h"

namespace shiftweigh {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double json_number(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) {
    throw InputError(std::string(where) + ": missing field '" + key + "'");
  }
  const Json& v = j.at(key);
  if (!v.is_number()) {
    throw InputError(std::string(where) + ": field '" + key +
                     "' must be a number");
  }
  return v.get<double>();
}

std::optional<double> json_optional(const Json& j, const char* key,
                                    const char* where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return json_number(j, key, where);
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) {
      throw InputError(std::string(where) + ": unknown field '" + item.key() +
                       "'");
    }
  }
}

std::uint64_t json_count(const Json& j, const char* key, const char* where) {
  const double v = json_number(j, key, where);
  if (!(v >= 1.0) || v != std::floor(v) || v > 9.007199254740992e15) {
    throw InputError(std::string(where) + ": '" + key +
                     "' must be a positive integer");
  }
  return static_cast<std::uint64_t>(v);
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Json kernel_to_json(const KernelSpec& spec) {
  Json j;
  j["family"] = spec.family_name();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          j["sigma"] = f.sigma;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          j["degree"] = f.degree;
          j["offset"] = f.offset;
        } else if constexpr (std::is_same_v<T, InverseMultiquadric>) {
          j["c"] = f.c;
          j["alpha"] = f.alpha;
        }
      },
      spec.family());
  if (spec.domain_radius()) j["domain_radius"] = *spec.domain_radius();
  return j;
}

KernelSpec kernel_from_json(const Json& j) {
  constexpr const char* where = "kernel";
  if (!j.is_object()) throw InputError("kernel: expected a JSON object");
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw InputError("kernel: missing string field 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  const std::optional<double> radius = json_optional(j, "domain_radius", where);
  KernelSpec spec = KernelSpec::linear();
  if (family == "gaussian") {
    reject_unknown(j, {"family", "sigma", "domain_radius"}, where);
    spec = KernelSpec::gaussian(json_number(j, "sigma", where));
  } else if (family == "linear") {
    reject_unknown(j, {"family", "domain_radius"}, where);
    spec = KernelSpec::linear();
  } else if (family == "polynomial") {
    reject_unknown(j, {"family", "degree", "offset", "domain_radius"}, where);
    const double degree = json_number(j, "degree", where);
    if (degree != std::floor(degree) || degree < 1 || degree > 64) {
      throw InputError("kernel: 'degree' must be an integer in [1, 64]");
    }
    spec = KernelSpec::polynomial(static_cast<int>(degree),
                                  json_optional(j, "offset", where).value_or(1.0));
  } else if (family == "inverse_multiquadric") {
    reject_unknown(j, {"family", "c", "alpha", "domain_radius"}, where);
    spec = KernelSpec::inverse_multiquadric(json_number(j, "c", where),
                                            json_number(j, "alpha", where));
  } else {
    throw InputError("kernel: unknown family '" + family +
                     "' (expected gaussian, linear, polynomial or "
                     "inverse_multiquadric)");
  }
  return radius ? spec.with_domain_radius(*radius) : spec;
}

KernelSpec parse_kernel_argument(const std::string& text_or_path) {
  const std::string text = trim(text_or_path);
  Json j;
  if (!text.empty() && text.front() == '{') {
    j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("kernel: invalid JSON text");
  } else {
    std::ifstream in(text);
    if (!in) throw InputError("kernel: cannot open '" + text + "'");
    j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InputError("kernel: invalid JSON in '" + text + "'");
  }
  return kernel_from_json(j);
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw InputError(source + ": header column " + std::to_string(c + 1) +
                           " is empty");
        }
        for (std::size_t p = 0; p < c; ++p) {
          if (cells[p] == cells[c]) {
            throw InputError(source + ": duplicate header column '" +
                             cells[c] + "'");
          }
        }
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    ++data_row;
    if (cells.size() != table.header.size()) {
      throw InputError(source + ": row " + std::to_string(data_row) + " (line " +
                       std::to_string(line_no) + ") has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (begin != end && *begin == '+') ++begin;
      const auto res = std::from_chars(begin, end, row[c]);
      if (cell.empty() || res.ec != std::errc() || res.ptr != end ||
          !std::isfinite(row[c])) {
        throw InputError(source + ": row " + std::to_string(data_row) +
                         " (line " + std::to_string(line_no) + "), column '" +
                         table.header[c] + "': '" + cell +
                         "' is not a finite number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError(source + ": empty file, header row required");
  if (table.rows.empty()) throw InputError(source + ": no data rows");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, path);
}

CsvColumns split_columns(const CsvTable& table, const std::string& source) {
  CsvColumns out;
  std::vector<std::size_t> feature_idx, loss_idx;
  std::optional<std::size_t> y_idx, beta_idx;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name == "y") {
      y_idx = c;
    } else if (name == "beta_true") {
      beta_idx = c;
    } else if (name.rfind("loss_", 0) == 0) {
      loss_idx.push_back(c);
      out.loss_names.push_back(name);
    } else {
      feature_idx.push_back(c);
      out.feature_names.push_back(name);
    }
  }
  if (feature_idx.empty()) throw InputError(source + ": no feature columns");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  out.features.resize(n, static_cast<Eigen::Index>(feature_idx.size()));
  out.losses.resize(n, static_cast<Eigen::Index>(loss_idx.size()));
  if (y_idx) out.y = Eigen::VectorXd(n);
  if (beta_idx) out.beta_true = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      out.features(i, static_cast<Eigen::Index>(k)) = row[feature_idx[k]];
    }
    for (std::size_t k = 0; k < loss_idx.size(); ++k) {
      out.losses(i, static_cast<Eigen::Index>(k)) = row[loss_idx[k]];
    }
    if (y_idx) (*out.y)(i) = row[*y_idx];
    if (beta_idx) (*out.beta_true)(i) = row[*beta_idx];
  }
  return out;
}

Eigen::MatrixXd table_matrix(const CsvTable& table) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      M(i, c) = table.rows[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(c)];
    }
  }
  return M;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c > 0) out << ',';
    out << cells[c];
  }
  out << '\n';
}

Json to_json(const WeightsSummary& s) {
  Json j;
  j["min"] = s.min;
  j["max"] = s.max;
  j["mean"] = s.mean;
  j["normalization_gap"] = s.normalization_gap;
  j["lhat"] = optional_number(s.lhat);
  j["iterations"] = s.iterations ? Json(*s.iterations) : Json(nullptr);
  j["converged"] = s.converged ? Json(*s.converged) : Json(nullptr);
  return j;
}

Json to_json(const EstimateReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["point"] = r.point;
  j["point_unit_scale"] = r.point_unit_scale;
  j["weights"] = r.weights ? to_json(*r.weights) : Json(nullptr);
  if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
  return j;
}

Json to_json(const BoundValue& b) {
  Json j;
  j["name"] = b.name;
  j["total"] = b.total;
  j["terms"] = Json::object();
  for (const auto& [k, v] : b.terms) j["terms"][k] = v;
  j["constants"] = Json::object();
  for (const auto& [k, v] : b.constants) j["constants"][k] = v;
  j["rate_exponent_tr"] = b.rate_exponent_tr;
  j["rate_exponent_te"] = b.rate_exponent_te;
  j["rate_label"] = b.rate_label;
  return j;
}

Json to_json(const RateFit& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  j["n_grid"] = f.n_grid;
  j["medians"] = f.medians;
  return j;
}

Json to_json(const CoverageResult& c) {
  Json j;
  j["covered"] = c.covered;
  j["reps"] = c.reps;
  j["fraction"] = c.fraction;
  j["wilson_low"] = c.wilson_low;
  j["wilson_high"] = c.wilson_high;
  j["bound"] = to_json(c.bound);
  return j;
}

Json to_json(const ClassifierRanking& r) {
  Json j;
  Json list = Json::array();
  for (std::size_t pos = 0; pos < r.entries.size(); ++pos) {
    const RankedClassifier& e = r.entries[pos];
    Json item;
    item["rank"] = pos + 1;
    item["index"] = e.index;
    item["estimate"] = e.estimate;
    item["estimate_unit_scale"] = e.estimate_unit;
    item["weights_shared"] = true;
    list.push_back(std::move(item));
  }
  j["ranking"] = std::move(list);
  j["weights"] = to_json(r.weights);
  return j;
}

std::string regime_name(const Regime& regime) {
  switch (regime.index()) {
    case 0:
      return "thm1";
    case 1:
      return "thm2";
    case 2:
      return "thm3";
    default:
      return "thm4";
  }
}

Json bound_inputs_to_json(const BoundInputs& in) {
  Json j;
  j["regime"] = regime_name(in.regime);
  j["B"] = in.B;
  j["C"] = in.C;
  j["delta"] = in.delta;
  j["n_tr"] = in.n_tr;
  j["n_te"] = in.n_te;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, InRkhs>) {
          j["norm_m"] = r.norm_m;
        } else if constexpr (std::is_same_v<T, PolyApprox>) {
          j["C2"] = r.C2;
          j["theta"] = r.theta;
        } else if constexpr (std::is_same_v<T, LogApprox>) {
          j["Cinf"] = r.Cinf;
          j["s"] = r.s;
        } else {
          j["C1"] = r.C1;
          j["theta"] = r.theta;
        }
      },
      in.regime);
  return j;
}

BoundInputs bound_inputs_from_json(const Json& j) {
  constexpr const char* where = "bound inputs";
  if (!j.is_object()) throw InputError("bound inputs: expected a JSON object");
  if (!j.contains("regime") || !j.at("regime").is_string()) {
    throw InputError("bound inputs: missing string field 'regime'");
  }
  const std::string regime = j.at("regime").get<std::string>();
  BoundInputs in;
  in.B = json_number(j, "B", where);
  in.C = json_number(j, "C", where);
  in.delta = json_number(j, "delta", where);
  in.n_tr = json_count(j, "n_tr", where);
  in.n_te = json_count(j, "n_te", where);
  if (regime == "thm1" || regime == "in_rkhs") {
    reject_unknown(j, {"regime", "B", "C", "delta", "n_tr", "n_te", "norm_m"},
                   where);
    in.regime = InRkhs{json_number(j, "norm_m", where)};
  } else if (regime == "thm2" || regime == "poly") {
    reject_unknown(j, {"regime", "B", "C", "delta", "n_tr", "n_te", "C2", "theta"},
                   where);
    in.regime = PolyApprox{json_number(j, "C2", where),
                           json_number(j, "theta", where)};
  } else if (regime == "thm3" || regime == "log") {
    reject_unknown(j, {"regime", "B", "C", "delta", "n_tr", "n_te", "Cinf", "s"},
                   where);
    in.regime = LogApprox{json_number(j, "Cinf", where),
                          json_number(j, "s", where)};
  } else if (regime == "thm4" || regime == "plugin") {
    reject_unknown(j, {"regime", "B", "C", "delta", "n_tr", "n_te", "C1", "theta"},
                   where);
    in.regime = PluginPoly{json_number(j, "C1", where),
                           json_number(j, "theta", where)};
  } else {
    throw InputError("bound inputs: unknown regime '" + regime +
                     "' (expected thm1, thm2, thm3 or thm4)");
  }
  return in;
}

void write_trials_csv(std::ostream& out,
                      const std::vector<TrialRecord>& records,
                      bool include_runtime) {
  write_csv_row(out, {"scenario", "estimator", "n_tr", "n_te", "seed",
                      "abs_error", "lhat", "runtime_ms"});
  for (const TrialRecord& r : records) {
    write_csv_row(out, {r.scenario, r.estimator, std::to_string(r.n_tr),
                        std::to_string(r.n_te), std::to_string(r.seed),
                        r.failed ? "" : format_double(r.abs_error),
                        r.lhat ? format_double(*r.lhat) : "",
                        format_double(include_runtime ? r.runtime_ms : 0.0)});
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace shiftweigh
