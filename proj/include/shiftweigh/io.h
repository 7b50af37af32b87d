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

#ifndef SHIFTWEIGH_IO_H_
#define SHIFTWEIGH_IO_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "shiftweigh/bounds.h"
#include "shiftweigh/estimators.h"
#include "shiftweigh/kernels.h"
#include "shiftweigh/scenarios.h"

namespace shiftweigh {

using Json = nlohmann::ordered_json;

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

Json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const Json& j);
// Accepts inline JSON text or a path to a JSON file.
KernelSpec parse_kernel_argument(const std::string& text_or_path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Header row required; every cell must parse as a finite number. Errors name
// the file, the 1-based data row and the column.
CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

// Columns of a table split by reserved names: y, beta_true and loss_*.
struct CsvColumns {
  std::vector<std::string> feature_names;
  FeatureMatrix features;
  std::optional<Eigen::VectorXd> y;
  std::optional<Eigen::VectorXd> beta_true;
  std::vector<std::string> loss_names;
  Eigen::MatrixXd losses;
};

CsvColumns split_columns(const CsvTable& table, const std::string& source);

// Every column of the table, in order.
Eigen::MatrixXd table_matrix(const CsvTable& table);

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

Json to_json(const WeightsSummary& summary);
Json to_json(const EstimateReport& report);
Json to_json(const BoundValue& bound);
Json to_json(const RateFit& fit);
Json to_json(const CoverageResult& coverage);
Json to_json(const ClassifierRanking& ranking);

Json bound_inputs_to_json(const BoundInputs& inputs);
BoundInputs bound_inputs_from_json(const Json& j);
// "thm1".."thm4"; also accepts in_rkhs, poly, log, plugin.
std::string regime_name(const Regime& regime);

void write_trials_csv(std::ostream& out,
                      const std::vector<TrialRecord>& records,
                      bool include_runtime = true);

void write_json_file(const std::string& path, const Json& j);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_IO_H_
