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

#ifndef SHIFTWEIGH_DATASET_H_
#define SHIFTWEIGH_DATASET_H_

#include <optional>

#include <Eigen/Core>

#include "shiftweigh/kernels.h"

namespace shiftweigh {

// Declared range of raw labels; mapped affinely onto [0, 1].
struct LabelRange {
  double min = 0.0;
  double max = 1.0;
};

// original = unit * scale + offset.
struct LabelAffine {
  double scale = 1.0;
  double offset = 0.0;

  double to_original(double unit) const { return unit * scale + offset; }
  double to_unit(double original) const { return (original - offset) / scale; }
};

// A sample of covariates with optional labels. Labels are stored in [0, 1];
// raw labels outside [0, 1] need an explicit LabelRange, never an empirical
// one, because every bound assumes the labels live in [0, 1].
class Dataset {
 public:
  static Dataset unlabeled(FeatureMatrix X);
  static Dataset labeled(FeatureMatrix X, const Eigen::VectorXd& raw_labels,
                         std::optional<LabelRange> range = std::nullopt);

  const FeatureMatrix& features() const { return X_; }
  bool has_labels() const { return labels_.has_value(); }
  // Labels on the unit scale. Throws InputError for an unlabeled dataset.
  const Eigen::VectorXd& labels() const;
  const LabelAffine& label_affine() const { return affine_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }

 private:
  Dataset(FeatureMatrix X, std::optional<Eigen::VectorXd> labels,
          LabelAffine affine)
      : X_(std::move(X)), labels_(std::move(labels)), affine_(affine) {}

  FeatureMatrix X_;
  std::optional<Eigen::VectorXd> labels_;
  LabelAffine affine_;
};

// Maps raw values onto [0, 1] through `range` (identity when absent) and
// checks every mapped value lies in [0, 1]. Returns the affine map used.
LabelAffine to_unit_interval(Eigen::Ref<Eigen::VectorXd> values,
                             std::optional<LabelRange> range,
                             const char* what);

}  // namespace shiftweigh

#endif  // SHIFTWEIGH_DATASET_H_
