# Copyright 2026 The Chaoscycle Authors
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
"""Automated chaos engineering cycles for Kubernetes manifests."""

import json as _json

from . import _core
from ._core import Error, format_usd, ledger_cost

__version__ = _core.__version__

__all__ = [
    "Error",
    "compile_plan",
    "format_usd",
    "ledger_cost",
    "load_project",
    "run_cycle",
    "simulate",
    "structural_diff",
    "validate_fault",
]


def _dump(value):
    if value is None:
        return ""
    return value if isinstance(value, str) else _json.dumps(value)


def load_project(path):
    return _json.loads(_core.load_project(str(path)))


def validate_fault(kind, params):
    """Returns the list of violations; empty when the parameters are valid."""
    return _core.validate_fault(kind, _dump(params))


def compile_plan(plan, hypothesis=None, name="chaos-experiment", namespace=""):
    return _core.compile_plan(_dump(plan), _dump(hypothesis), name, namespace)


def structural_diff(expected, actual):
    return _core.structural_diff(expected, actual)


def simulate(manifest, project, hypothesis=None, seed=0):
    return _json.loads(_core.simulate(manifest, str(project), _dump(hypothesis), seed))


def run_cycle(project, out_dir=".", planner="stub", backend="simulator", max_steady_states=2,
              max_retries=3, seed=0, temperature=0.0, instructions="", stamp=""):
    return _json.loads(_core.run_cycle(str(project), str(out_dir), planner, backend, max_steady_states,
                                       max_retries, seed, temperature, instructions, stamp))
