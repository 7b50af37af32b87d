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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "shiftweigh/bounds.h"
#include "shiftweigh/errors.h"
#include "shiftweigh/estimators.h"
#include "shiftweigh/io.h"
#include "shiftweigh/kernels.h"
#include "shiftweigh/kmm.h"
#include "shiftweigh/scenarios.h"

namespace py = pybind11;
namespace sw = shiftweigh;

namespace {

py::object to_python(const sw::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

sw::Json from_python(const py::object& o) {
  return sw::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

sw::KernelSpec kernel_arg(const py::dict& d) { return sw::kernel_from_json(from_python(d)); }

std::optional<sw::LabelRange> range_arg(const std::optional<std::pair<double, double>>& r) {
  if (!r) return std::nullopt;
  return sw::LabelRange{r->first, r->second};
}

sw::KmmOptions kmm_options(double tol, std::size_t max_iter, const std::string& backend) {
  sw::KmmOptions o;
  o.solver.tol = tol;
  o.solver.max_iter = max_iter;
  if (backend == "dense") {
    o.backend = sw::GramBackend::kDense;
  } else if (backend == "factored") {
    o.backend = sw::GramBackend::kFactored;
  } else if (backend != "auto") {
    throw sw::UsageError("backend must be auto, dense or factored");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Covariate-shift reweighting by kernel mean matching";

  py::register_exception<sw::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<sw::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<sw::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<sw::NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def(
      "gram",
      [](const py::dict& kernel, const sw::FeatureMatrix& X,
         const std::optional<sw::FeatureMatrix>& Y) -> Eigen::MatrixXd {
        const sw::KernelSpec spec = kernel_arg(kernel);
        return Y ? sw::gram(spec, X, *Y) : sw::gram(spec, X);
      },
      py::arg("kernel"), py::arg("X"), py::arg("Y") = py::none());

  m.def(
      "kernel_sup_bound",
      [](const py::dict& kernel) { return sw::sup_bound(kernel_arg(kernel)); },
      py::arg("kernel"));

  m.def(
      "kmm_weights",
      [](const sw::FeatureMatrix& X_tr, const sw::FeatureMatrix& X_te,
         const py::dict& kernel, double B, double tol, std::size_t max_iter,
         const std::string& backend) {
        const sw::KernelSpec spec = kernel_arg(kernel);
        const sw::KmmOptions options = kmm_options(tol, max_iter, backend);
        sw::KmmFit fit = [&] {
          py::gil_scoped_release release;
          return sw::fit_kmm(X_tr, X_te, spec, B, options);
        }();
        py::dict out;
        out["beta"] = fit.weights.beta;
        out["lhat"] = fit.weights.objective_value;
        out["iterations"] = fit.weights.iterations;
        out["converged"] = fit.weights.converged;
        out["residual"] = fit.weights.residual;
        out["summary"] = to_python(sw::to_json(sw::summarize(fit.weights.beta)));
        return out;
      },
      py::arg("X_tr"), py::arg("X_te"), py::arg("kernel"), py::arg("B"),
      py::arg("tol") = 1e-8, py::arg("max_iter") = 0, py::arg("backend") = "auto");

  m.def(
      "estimate",
      [](const sw::FeatureMatrix& X_tr, const Eigen::VectorXd& y,
         const sw::FeatureMatrix& X_te, const std::string& estimator,
         const std::optional<py::dict>& kernel, std::optional<double> B,
         std::optional<double> lambda, std::optional<double> bandwidth_tr,
         std::optional<double> bandwidth_te,
         const std::optional<Eigen::VectorXd>& beta_true,
         const std::optional<std::pair<double, double>>& label_range) {
        const sw::EstimatorKind kind = sw::parse_estimator_kind(estimator);
        const sw::Dataset train = sw::Dataset::labeled(X_tr, y, range_arg(label_range));
        auto need_kernel = [&] {
          if (!kernel) throw sw::UsageError("kernel is required for " + estimator);
          return kernel_arg(*kernel);
        };
        auto need_B = [&] {
          if (!B) throw sw::UsageError("B is required for " + estimator);
          return *B;
        };
        sw::EstimateReport r;
        switch (kind) {
          case sw::EstimatorKind::kKmm:
            r = sw::kmm_estimate(train, X_te, need_kernel(), need_B());
            break;
          case sw::EstimatorKind::kPlugin:
            r = sw::plugin_estimate(
                train, X_te, need_kernel(),
                lambda.value_or(sw::default_plugin_lambda(train.size())));
            break;
          case sw::EstimatorKind::kKdeRatio:
            r = sw::kde_ratio_estimate(
                train, X_te, bandwidth_tr.value_or(sw::silverman_bandwidth(X_tr)),
                bandwidth_te.value_or(sw::silverman_bandwidth(X_te)), need_B());
            break;
          case sw::EstimatorKind::kOracle:
            if (!beta_true) throw sw::UsageError("oracle needs beta_true");
            r = sw::oracle_estimate(train, *beta_true, B);
            break;
        }
        return to_python(sw::to_json(r));
      },
      py::arg("X_tr"), py::arg("y"), py::arg("X_te"), py::arg("estimator") = "kmm",
      py::arg("kernel") = py::none(), py::arg("B") = py::none(),
      py::arg("lam") = py::none(), py::arg("bandwidth_tr") = py::none(),
      py::arg("bandwidth_te") = py::none(), py::arg("beta_true") = py::none(),
      py::arg("label_range") = py::none());

  m.def(
      "rank_classifiers",
      [](const sw::FeatureMatrix& X_tr, const Eigen::MatrixXd& losses,
         const sw::FeatureMatrix& X_te, const py::dict& kernel, double B,
         const std::optional<std::pair<double, double>>& loss_range) {
        return to_python(sw::to_json(sw::rank_classifiers(
            X_tr, losses, X_te, kernel_arg(kernel), B, {}, range_arg(loss_range))));
      },
      py::arg("X_tr"), py::arg("losses"), py::arg("X_te"), py::arg("kernel"),
      py::arg("B"), py::arg("loss_range") = py::none());

  m.def(
      "bound",
      [](const py::dict& inputs) {
        return to_python(sw::to_json(sw::bound_for(sw::bound_inputs_from_json(from_python(inputs)))));
      },
      py::arg("inputs"));

  m.def("rate_exponent_kmm", &sw::rate_exponent_kmm, py::arg("theta"));
  m.def("rate_exponent_plugin", &sw::rate_exponent_plugin, py::arg("theta"));

  m.def("scenario_ids", [] {
    std::vector<std::string> ids;
    for (const auto& s : sw::builtin_scenarios()) ids.push_back(s.id);
    return ids;
  });

  m.def(
      "scenario_info",
      [](const std::string& id) {
        const sw::ShiftScenario& s = sw::find_scenario(id);
        py::dict d;
        d["id"] = s.id;
        d["description"] = s.description;
        d["dim"] = s.dim();
        d["B_true"] = s.B_true;
        d["ey_te"] = s.ey_te;
        d["norm_m"] = s.norm_m ? py::cast(*s.norm_m) : py::none();
        d["regime"] = sw::to_string(s.regime);
        d["kernel"] = to_python(sw::kernel_to_json(s.kernel));
        return d;
      },
      py::arg("id"));

  m.def(
      "draw_sample",
      [](const std::string& id, Eigen::Index n_tr, Eigen::Index n_te, std::uint64_t seed) {
        const sw::ScenarioSample s = sw::draw_sample(sw::find_scenario(id), n_tr, n_te, seed);
        const sw::LabelAffine& a = s.train.label_affine();
        py::dict d;
        d["X_tr"] = s.train.features();
        d["y"] = Eigen::VectorXd(s.train.labels().unaryExpr(
            [&](double u) { return a.to_original(u); }));
        d["X_te"] = s.X_te;
        d["beta_true"] = s.true_beta;
        d["regression"] = s.regression;
        return d;
      },
      py::arg("scenario"), py::arg("n_tr"), py::arg("n_te"), py::arg("seed"));

  m.def("wilson_interval", &sw::wilson_interval, py::arg("successes"),
        py::arg("trials"), py::arg("z") = 1.959963984540054);
}
