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

#include "shiftweigh/dataset.h"

#include <cmath>
#include <sstream>

#include "shiftweigh/errors.h"

namespace shiftweigh {

LabelAffine to_unit_interval(Eigen::Ref<Eigen::VectorXd> values,
                             std::optional<LabelRange> range,
                             const char* what) {
  LabelAffine affine;
  if (range) {
    if (!std::isfinite(range->min) || !std::isfinite(range->max) ||
        !(range->max > range->min)) {
      throw InputError(std::string("declared ") + what +
                       " range must satisfy min < max");
    }
    affine.scale = range->max - range->min;
    affine.offset = range->min;
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double raw = values(i);
    if (!std::isfinite(raw)) {
      std::ostringstream os;
      os << what << " " << i << " is not finite";
      throw InputError(os.str());
    }
    if (range && (raw < range->min || raw > range->max)) {
      std::ostringstream os;
      os << what << " " << i << " = " << raw << " lies outside the declared "
         << "range [" << range->min << ", " << range->max << "]";
      throw InputError(os.str());
    }
    const double unit = range ? affine.to_unit(raw) : raw;
    if (unit < 0.0 || unit > 1.0) {
      std::ostringstream os;
      os << what << " " << i << " = " << raw << " is outside [0, 1]; declare "
         << "its range explicitly";
      throw InputError(os.str());
    }
    values(i) = unit;
  }
  return affine;
}

Dataset Dataset::unlabeled(FeatureMatrix X) {
  if (!X.allFinite()) throw InputError("features contain non-finite entries");
  return Dataset(std::move(X), std::nullopt, LabelAffine{});
}

Dataset Dataset::labeled(FeatureMatrix X, const Eigen::VectorXd& raw_labels,
                         std::optional<LabelRange> range) {
  if (!X.allFinite()) throw InputError("features contain non-finite entries");
  if (raw_labels.size() != X.rows()) {
    std::ostringstream os;
    os << "got " << raw_labels.size() << " labels for " << X.rows()
       << " feature rows";
    throw InputError(os.str());
  }
  Eigen::VectorXd unit = raw_labels;
  const LabelAffine affine = to_unit_interval(unit, range, "label");
  return Dataset(std::move(X), std::move(unit), affine);
}

const Eigen::VectorXd& Dataset::labels() const {
  if (!labels_) throw InputError("dataset has no labels");
  return *labels_;
}

}  // namespace shiftweigh
