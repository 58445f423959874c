// Copyright 2026 The Chaoscycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "chaoscycle/agent_gateway.h"
#include "chaoscycle/cycle_orchestrator.h"
#include "chaoscycle/error.h"
#include "chaoscycle/experiment_compiler.h"
#include "chaoscycle/fault_catalog.h"
#include "chaoscycle/manifest_io.h"
#include "chaoscycle/workflow_simulator.h"

namespace py = pybind11;
namespace cc = chaoscycle;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
std::string SnapshotJson(const cc::SystemSnapshot& s) {
  cc::Json docs = cc::Json::array();
  for (const auto& d : s.manifests) {
    docs.push_back({{"path", d.path}, {"kind", d.kind}, {"name", d.name}, {"namespace", d.ns}, {"labels", d.labels}});
  }
  return cc::Json{{"project_name", s.project_name},
                  {"version", s.version},
                  {"manifest_paths", s.manifest_paths},
                  {"files", s.files},
                  {"manifests", docs},
                  {"warnings", s.warnings}}
      .dump();
}

std::string LoadProject(const std::string& path) { return SnapshotJson(cc::LoadProject(path)); }

std::vector<std::string> ValidateFault(const std::string& kind, const std::string& params) {
  auto k = cc::ParseFaultKind(kind);
  if (!k) throw cc::ValidationError({"unknown fault kind '" + kind + "'"});
  return cc::ValidateFault(cc::Fault{*k, 0, cc::Json::parse(params)}).violations;
}

std::string CompilePlan(const std::string& plan_json, const std::string& hypothesis_json, const std::string& name,
                        const std::string& ns) {
  const cc::ExperimentPlan plan = cc::Json::parse(plan_json).get<cc::ExperimentPlan>();
  std::optional<cc::Hypothesis> hyp;
  if (!hypothesis_json.empty()) hyp = cc::Json::parse(hypothesis_json).get<cc::Hypothesis>();
  return cc::EmitWorkflow(cc::CompilePlan(plan, hyp ? &*hyp : nullptr), cc::WorkflowMeta{name, ns});
}

std::vector<std::string> StructuralDiff(const std::string& expected, const std::string& actual) {
  return cc::StructuralDiff(cc::NormalizeManifest(expected), cc::NormalizeManifest(actual));
}

std::string Simulate(const std::string& manifest, const std::string& project, const std::string& hypothesis_json,
                     std::uint64_t seed) {
  std::optional<cc::Hypothesis> hyp;
  if (!hypothesis_json.empty()) hyp = cc::Json::parse(hypothesis_json).get<cc::Hypothesis>();
  const cc::ParsedWorkflow parsed = cc::ParseWorkflow(manifest, hyp ? &*hyp : nullptr);
  cc::SimulationOptions options;
  options.seed = seed;
  const cc::SimulationResult r =
      cc::Simulate(parsed.tree, cc::BuildCluster(cc::LoadProject(project)), options);
  return cc::Json{{"result", r.result()}, {"timeline", r.timeline.ToJson()}, {"warnings", r.warnings}}.dump();
}

std::string RunCycle(const std::string& project, const std::string& out_dir, const std::string& planner,
                     const std::string& backend, int max_steady_states, int max_retries, std::uint64_t seed,
                     double temperature, const std::string& instructions, const std::string& stamp) {
  cc::CycleConfig config;
  config.out_dir = out_dir;
  config.backend = backend;
  config.max_steady_states = max_steady_states;
  config.max_retries = max_retries;
  config.seed = seed;
  config.temperature = temperature;
  config.instructions = instructions;
  config.stamp = stamp;
  cc::CycleOutput out;
  {
    py::gil_scoped_release release;
    out = cc::RunCycle(std::filesystem::path(project), config, planner);
  }
  cc::Json results = cc::Json::array();
  for (const auto& r : out.results) results.push_back(r);
  return cc::Json{{"status", cc::CycleStatusName(out.status)},
                  {"summary", out.summary},
                  {"diagnostics", out.diagnostics},
                  {"experiments_run", out.history.experiments_run},
                  {"improvements", out.history.improvement_history.size()},
                  {"final_version", out.final_snapshot.version},
                  {"final_files", out.final_snapshot.files},
                  {"results", results},
                  {"hypothesis", out.hypothesis ? cc::Json(*out.hypothesis) : cc::Json()},
                  {"ledger", out.ledger.ToJson()},
                  {"workspace", out.workspace.string()}}
      .dump();
}

std::string LedgerCost(std::int64_t input_tokens, std::int64_t output_tokens) {
  cc::CostLedger ledger;
  ledger.Record("all", input_tokens, output_tokens);
  return cc::FormatUsd(ledger.TotalCost());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the chaoscycle package";

  py::register_exception<cc::Error>(m, "Error", PyExc_RuntimeError);

  m.def("load_project", &LoadProject, py::arg("path"));
  m.def("validate_fault", &ValidateFault, py::arg("kind"), py::arg("params_json"));
  m.def("compile_plan", &CompilePlan, py::arg("plan_json"), py::arg("hypothesis_json") = "",
        py::arg("name") = "chaos-experiment", py::arg("namespace") = "");
  m.def("structural_diff", &StructuralDiff, py::arg("expected"), py::arg("actual"));
  m.def("simulate", &Simulate, py::arg("manifest"), py::arg("project"), py::arg("hypothesis_json") = "",
        py::arg("seed") = 0);
  m.def("run_cycle", &RunCycle, py::arg("project"), py::arg("out_dir") = ".", py::arg("planner") = "stub",
        py::arg("backend") = "simulator", py::arg("max_steady_states") = cc::kDefaultMaxSteadyStates,
        py::arg("max_retries") = cc::kDefaultMaxRetries, py::arg("seed") = 0, py::arg("temperature") = 0.0,
        py::arg("instructions") = "", py::arg("stamp") = "");
  m.def("ledger_cost", &LedgerCost, py::arg("input_tokens"), py::arg("output_tokens"));
  m.def("format_usd", &cc::FormatUsd, py::arg("picodollars"));
  m.attr("__version__") = "0.1.0";
}
