# Copyright 2026 The shiftweigh Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Covariate-shift reweighting by kernel mean matching."""

from ._core import (
    DomainError,
    InputError,
    NumericalError,
    UsageError,
    bound,
    draw_sample,
    estimate,
    gram,
    kernel_sup_bound,
    kmm_weights,
    rank_classifiers,
    rate_exponent_kmm,
    rate_exponent_plugin,
    scenario_ids,
    scenario_info,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InputError",
    "NumericalError",
    "UsageError",
    "bound",
    "draw_sample",
    "estimate",
    "gram",
    "kernel_sup_bound",
    "kmm_weights",
    "rank_classifiers",
    "rate_exponent_kmm",
    "rate_exponent_plugin",
    "scenario_ids",
    "scenario_info",
    "wilson_interval",
]
