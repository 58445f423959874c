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

#include "chaoscycle/experiment_compiler.h"

#include <algorithm>
#include <functional>
#include <regex>
#include <set>

#include "chaoscycle/error.h"
#include "chaoscycle/fault_catalog.h"
#include "chaoscycle/yaml_json.h"

namespace chaoscycle {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Lowercase, runs of non-alphanumerics collapse to one hyphen.
std::string Sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "item" : out;
}

WorkflowNode Leaf(std::string name, NodeType type) {
  WorkflowNode n;
  n.name = std::move(name);
  n.type = type;
  return n;
}

WorkflowNode Group(std::string name, NodeType type, std::vector<WorkflowNode> children) {
  WorkflowNode n;
  n.name = std::move(name);
  n.type = type;
  n.children = std::move(children);
  return n;
}

class NameAllocator {
 public:
  std::string Take(const std::string& base) {
    std::string name = base;
    for (int k = 2; used_.count(name); ++k) name = base + "-" + std::to_string(k);
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

const SteadyState* ResolveState(const Hypothesis* h, std::string_view name) {
  return h ? h->Find(name) : nullptr;
}

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kPreValidation:
      return "pre-validation";
    case Stage::kFaultInjection:
      return "fault-injection";
    case Stage::kPostValidation:
      return "post-validation";
  }
  return "";
}

Stage ParseStage(std::string_view name) {
  for (Stage s : kStages) {
    if (StageName(s) == name) return s;
  }
  throw ParseError("unknown stage '" + std::string(name) + "'");
}

std::string_view StageLeafPrefix(Stage stage) {
  switch (stage) {
    case Stage::kPreValidation:
      return "pre";
    case Stage::kFaultInjection:
      return "fault";
    case Stage::kPostValidation:
      return "post";
  }
  return "";
}

std::string_view NodeTypeName(NodeType type) {
  switch (type) {
    case NodeType::kTask:
      return "Task";
    case NodeType::kFailure:
      return "Failure";
    case NodeType::kSuspend:
      return "Suspend";
    case NodeType::kSerial:
      return "Serial";
    case NodeType::kParallel:
      return "Parallel";
  }
  return "";
}

ScheduleItem ScheduleItem::Test(std::string name, Duration grace, Duration duration, VaCSpec vac) {
  ScheduleItem it;
  it.name = std::move(name);
  it.is_fault = false;
  it.grace_period = grace;
  it.duration = duration;
  it.payload = std::move(vac);
  return it;
}

ScheduleItem ScheduleItem::Inject(Duration grace, Duration duration, Fault fault) {
  ScheduleItem it;
  it.name = std::string(FaultKindName(fault.kind));
  it.is_fault = true;
  it.grace_period = grace;
  it.duration = duration;
  it.payload = std::move(fault);
  return it;
}

Duration ExperimentPlan::stage_time(Stage stage) const {
  switch (stage) {
    case Stage::kPreValidation:
      return pre_time;
    case Stage::kFaultInjection:
      return fault_time;
    case Stage::kPostValidation:
      return post_time;
  }
  return {};
}

Duration ExperimentPlan::stage_offset(Stage stage) const {
  Duration off;
  for (Stage s : kStages) {
    if (s == stage) break;
    off += stage_time(s);
  }
  return off;
}

std::vector<std::string> ValidatePlan(const ExperimentPlan& plan, const Hypothesis* hypothesis) {
  std::vector<std::string> out;
  const Duration sum = plan.pre_time + plan.fault_time + plan.post_time;
  if (sum != plan.total_time) {
    out.push_back("total_time " + FormatDuration(plan.total_time) + " != pre_time + fault_time + post_time (" +
                  FormatDuration(sum) + ")");
  }
  std::set<std::pair<FaultKind, int>> seen_faults;
  for (Stage stage : kStages) {
    const std::string sname(StageName(stage));
    const auto& items = plan.items(stage);
    const Duration limit = plan.stage_time(stage);
    if (limit.is_zero()) out.push_back(sname + ": stage time must be positive");
    if (items.empty()) out.push_back(sname + ": stage has no items");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      const std::string where = sname + "[" + std::to_string(i) + "] '" + it.name + "'";
      if (it.is_fault != (it.fault() != nullptr)) {
        out.push_back(where + ": is_fault does not match the payload");
        continue;
      }
      if (it.is_fault && stage != Stage::kFaultInjection) {
        out.push_back(where + ": faults are only allowed in fault-injection");
      }
      if (it.duration.is_zero()) out.push_back(where + ": duration must be positive");
      const Duration end = it.grace_period + it.duration;
      if (end > limit) {
        out.push_back(where + ": grace_period + duration = " + FormatDuration(end) + " exceeds the stage time " +
                      FormatDuration(limit));
      }
      if (const auto* vac = it.vac()) {
        for (const auto& v : vac->Validate()) out.push_back(where + ": " + v);
        if (vac->script_path.empty()) out.push_back(where + ": missing script path");
        if (hypothesis) {
          const auto* ss = hypothesis->Find(it.name);
          if (!ss) {
            out.push_back(where + ": no steady state named '" + it.name + "'");
          } else if (ss->vac.tool != vac->tool) {
            out.push_back(where + ": probe tool differs from steady state '" + it.name + "'");
          }
        }
      } else if (const auto* f = it.fault()) {
        if (it.name != FaultKindName(f->kind)) {
          out.push_back(where + ": name must be the fault kind " + std::string(FaultKindName(f->kind)));
        }
        for (const auto& v : ValidateFault(*f).violations) out.push_back(where + ": " + v);
        if (!seen_faults.insert({f->kind, f->name_id}).second) {
          out.push_back(where + ": fault scheduled twice");
        }
        if (hypothesis) {
          bool found = false;
          for (const auto& g : hypothesis->scenario.AllFaults()) {
            found = found || (g.kind == f->kind && g.name_id == f->name_id);
          }
          if (!found) {
            out.push_back(where + ": not part of the failure scenario (name_id " + std::to_string(f->name_id) + ")");
          }
        }
      }
    }
  }
  return out;
}

const WorkflowNode* WorkflowNode::Find(std::string_view node_name) const {
  if (name == node_name) return this;
  for (const auto& c : children) {
    if (const auto* hit = c.Find(node_name)) return hit;
  }
  return nullptr;
}

WorkflowNode GroupNodes(const ExperimentPlan& plan, const Hypothesis* hypothesis) {
  if (auto v = ValidatePlan(plan, hypothesis); !v.empty()) throw ValidationError(std::move(v));

  // Fault kinds that occur more than once get a numeric suffix.
  std::map<FaultKind, int> kind_count;
  for (const auto& it : plan.items(Stage::kFaultInjection)) {
    if (const auto* f = it.fault()) ++kind_count[f->kind];
  }

  NameAllocator names;
  names.Take(std::string(kEntryName));
  WorkflowNode entry = Group(std::string(kEntryName), NodeType::kSerial, {});

  for (Stage stage : kStages) {
    const std::string sname(StageName(stage));
    const std::string prefix(StageLeafPrefix(stage));

    std::vector<Duration> graces;
    std::map<Duration, std::vector<WorkflowNode>> groups;
    const auto& items = plan.items(stage);
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
      const auto& it = items[idx];
      WorkflowNode leaf;
      if (const auto* vac = it.vac()) {
        leaf = Leaf(names.Take(prefix + "-unittest-" + Sanitize(it.name)), NodeType::kTask);
        leaf.vac = *vac;
        if (const auto* ss = ResolveState(hypothesis, it.name)) leaf.threshold = ss->threshold;
      } else {
        const auto* f = it.fault();
        std::string base = prefix + "-" + Lower(FaultKindName(f->kind));
        if (kind_count[f->kind] > 1) base += "-" + std::to_string(f->name_id + 1);
        leaf = Leaf(names.Take(base), NodeType::kFailure);
        leaf.fault = *f;
      }
      leaf.item = it.name;
      leaf.item_index = static_cast<int>(idx);
      leaf.duration = it.duration;
      if (!groups.count(it.grace_period)) graces.push_back(it.grace_period);
      groups[it.grace_period].push_back(std::move(leaf));
    }
    // Tasks before failures inside a group, original order otherwise.
    for (auto& [g, leaves] : groups) {
      std::stable_partition(leaves.begin(), leaves.end(),
                            [](const WorkflowNode& n) { return n.type == NodeType::kTask; });
    }

    WorkflowNode stage_node = Group(names.Take(sname + "-phase"), NodeType::kSerial, {});
    stage_node.stage = stage;
    stage_node.stage_length = plan.stage_time(stage);

    if (graces.size() == 1 && graces[0].is_zero()) {
      stage_node.children.push_back(
          Group(names.Take(sname + "-parallel-workflows"), NodeType::kParallel, std::move(groups[graces[0]])));
    } else {
      WorkflowNode overlapped = Group(names.Take(sname + "-overlapped-workflows"), NodeType::kParallel, {});
      int j = 0;
      for (const auto& g : graces) {
        auto& leaves = groups[g];
        if (g.is_zero()) {
          if (leaves.size() == 1) {
            overlapped.children.push_back(std::move(leaves[0]));
          } else {
            overlapped.children.push_back(
                Group(names.Take(sname + "-parallel-workflow"), NodeType::kParallel, std::move(leaves)));
          }
          continue;
        }
        ++j;
        const std::string sfx = j == 1 ? "" : std::to_string(j);
        WorkflowNode wrapper = Group(names.Take(sname + "-suspend-workflow" + sfx), NodeType::kSerial, {});
        WorkflowNode suspend = Leaf(names.Take(sname + "-suspend" + sfx), NodeType::kSuspend);
        suspend.deadline = g;
        suspend.duration = g;
        wrapper.children.push_back(std::move(suspend));
        if (leaves.size() == 1) {
          wrapper.children.push_back(std::move(leaves[0]));
        } else {
          wrapper.children.push_back(
              Group(names.Take(sname + "-parallel-workflows" + sfx), NodeType::kParallel, std::move(leaves)));
        }
        overlapped.children.push_back(std::move(wrapper));
      }
      stage_node.children.push_back(std::move(overlapped));
    }
    entry.children.push_back(std::move(stage_node));
  }
  return entry;
}

void ComputeDeadlines(WorkflowNode& node, const CompileOptions& options) {
  switch (node.type) {
    case NodeType::kTask:
      node.deadline = options.pad + node.duration;
      return;
    case NodeType::kFailure:
      node.deadline = node.duration;
      return;
    case NodeType::kSuspend:
      if (node.deadline.is_zero()) node.deadline = node.duration;
      return;
    case NodeType::kSerial: {
      Duration sum;
      for (auto& c : node.children) {
        ComputeDeadlines(c, options);
        sum += c.deadline;
      }
      node.deadline = node.stage ? sum + options.pad : sum;
      return;
    }
    case NodeType::kParallel: {
      Duration mx;
      for (auto& c : node.children) {
        ComputeDeadlines(c, options);
        mx = Max(mx, c.deadline);
      }
      node.deadline = mx;
      return;
    }
  }
}

WorkflowNode CompilePlan(const ExperimentPlan& plan, const Hypothesis* hypothesis, const CompileOptions& options) {
  WorkflowNode tree = GroupNodes(plan, hypothesis);
  ComputeDeadlines(tree, options);
  return tree;
}

namespace {

Json TemplateFor(const WorkflowNode& n, const CompileOptions& options) {
  Json t = Json::object();
  t["name"] = n.name;
  switch (n.type) {
    case NodeType::kSerial:
    case NodeType::kParallel: {
      if (n.children.empty()) throw ContractViolation("group node '" + n.name + "' has no children");
      t["templateType"] = std::string(NodeTypeName(n.type));
      t["deadline"] = FormatDuration(n.deadline);
      Json kids = Json::array();
      for (const auto& c : n.children) kids.push_back(c.name);
      t["children"] = kids;
      break;
    }
    case NodeType::kSuspend:
      t["templateType"] = "Suspend";
      t["deadline"] = FormatDuration(n.deadline);
      break;
    case NodeType::kTask: {
      if (!n.vac) throw ContractViolation("task node '" + n.name + "' has no probe");
      const RunnerSpec r = RunnerCommand(*n.vac, n.duration, options.mount);
      t["templateType"] = "Task";
      t["deadline"] = FormatDuration(n.deadline);
      Json c = Json::object();
      c["name"] = n.name + "-container";
      c["image"] = r.image;
      if (r.image_pull_policy) c["imagePullPolicy"] = *r.image_pull_policy;
      c["command"] = r.command;
      if (!r.args.empty()) c["args"] = r.args;
      c["volumeMounts"] = Json::array({Json{{"name", options.volume_name}, {"mountPath", options.mount}}});
      t["task"] = Json{{"container", c},
                       {"volumes", Json::array({Json{{"name", options.volume_name},
                                                     {"persistentVolumeClaim",
                                                      Json{{"claimName", options.claim_name}}}}})}};
      break;
    }
    case NodeType::kFailure: {
      if (!n.fault) throw ContractViolation("failure node '" + n.name + "' has no fault");
      const auto check = ValidateFault(*n.fault);
      if (!check.ok()) throw ContractViolation("failure node '" + n.name + "': " + check.violations.front());
      t["templateType"] = std::string(FaultKindName(n.fault->kind));
      t["deadline"] = FormatDuration(n.deadline);
      const Json body = RenderFaultBody(*n.fault);
      for (const auto& [k, v] : body.items()) t[k] = v;
      break;
    }
  }
  return t;
}

// Groups and suspends in pre-order, then tasks, then failures.
void EmitBlock(const WorkflowNode& root, std::vector<const WorkflowNode*>& out) {
  std::vector<const WorkflowNode*> tasks, failures;
  root.Visit([&](const WorkflowNode& n) {
    if (n.type == NodeType::kTask) {
      tasks.push_back(&n);
    } else if (n.type == NodeType::kFailure) {
      failures.push_back(&n);
    } else {
      out.push_back(&n);
    }
  });
  out.insert(out.end(), tasks.begin(), tasks.end());
  out.insert(out.end(), failures.begin(), failures.end());
}

}  // namespace

Json WorkflowToJson(const WorkflowNode& tree, const WorkflowMeta& meta, const CompileOptions& options) {
  std::vector<const WorkflowNode*> order{&tree};
  if (tree.is_leaf()) {
    order.clear();
    EmitBlock(tree, order);
  }
  for (const auto& c : tree.children) EmitBlock(c, order);

  std::set<std::string> seen;
  Json templates = Json::array();
  for (const auto* n : order) {
    if (!seen.insert(n->name).second) throw ContractViolation("duplicate node name '" + n->name + "'");
    templates.push_back(TemplateFor(*n, options));
  }
  Json md = Json::object();
  md["name"] = meta.name;
  if (!meta.ns.empty()) md["namespace"] = meta.ns;
  Json j = Json::object();
  j["apiVersion"] = "chaos-mesh.org/v1alpha1";
  j["kind"] = "Workflow";
  j["metadata"] = md;
  j["spec"] = Json{{"entry", tree.name}, {"templates", templates}};
  return j;
}

std::string EmitWorkflow(const WorkflowNode& tree, const WorkflowMeta& meta, const CompileOptions& options) {
  return DumpYaml(WorkflowToJson(tree, meta, options));
}

namespace {

struct ScriptRef {
  std::string state;
  int version = 0;
};

std::optional<ScriptRef> ScriptStateName(std::string_view path) {
  static const std::regex kName(R"(unittest_(.+)_mod([0-9]+)\.(py|js)$)");
  std::string p(path);
  std::smatch m;
  if (!std::regex_search(p, m, kName)) return std::nullopt;
  return ScriptRef{m[1], std::stoi(m[2])};
}

}  // namespace

ParsedWorkflow ParseWorkflowJson(const Json& j, const Hypothesis* hypothesis,
                                 std::optional<std::array<Duration, 3>> stage_lengths,
                                 const CompileOptions& options) {
  if (!j.is_object() || j.value("kind", "") != "Workflow") throw ParseError("workflow: kind must be Workflow");
  if (!j.contains("spec") || !j["spec"].is_object()) throw ParseError("workflow: missing spec");
  const Json& spec = j["spec"];
  if (!spec.contains("templates") || !spec["templates"].is_array()) throw ParseError("workflow: missing templates");

  ParsedWorkflow out;
  if (j.contains("metadata") && j["metadata"].is_object()) {
    out.meta.name = j["metadata"].value("name", "");
    out.meta.ns = j["metadata"].value("namespace", "");
  }

  std::map<std::string, const Json*> by_name;
  for (const auto& t : spec["templates"]) {
    if (!t.is_object() || !t.contains("name") || !t["name"].is_string()) {
      throw ParseError("workflow: template without a name");
    }
    if (!by_name.emplace(t["name"].get<std::string>(), &t).second) {
      throw ParseError("workflow: duplicate template '" + t["name"].get<std::string>() + "'");
    }
  }

  std::set<std::string> active;
  std::function<WorkflowNode(const std::string&)> build = [&](const std::string& name) -> WorkflowNode {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ParseError("workflow: unknown template '" + name + "'");
    if (!active.insert(name).second) throw ParseError("workflow: template cycle at '" + name + "'");
    const Json& t = *it->second;
    const std::string type = t.value("templateType", "");
    WorkflowNode n;
    n.name = name;
    try {
      n.deadline = ParseDuration(t.value("deadline", "0s"));
    } catch (const ParseError& e) {
      throw ParseError("workflow: template '" + name + "': " + e.what());
    }
    if (type == "Serial" || type == "Parallel") {
      n.type = type == "Serial" ? NodeType::kSerial : NodeType::kParallel;
      if (!t.contains("children") || !t["children"].is_array() || t["children"].empty()) {
        throw ParseError("workflow: group '" + name + "' has no children");
      }
      for (const auto& c : t["children"]) n.children.push_back(build(c.get<std::string>()));
    } else if (type == "Suspend") {
      n.type = NodeType::kSuspend;
      n.duration = n.deadline;
    } else if (type == "Task") {
      n.type = NodeType::kTask;
      const Json* container = t.contains("task") && t["task"].contains("container") ? &t["task"]["container"] : nullptr;
      auto runner = container ? ParseRunner(*container, options.mount) : std::nullopt;
      if (!runner) throw ParseError("workflow: task '" + name + "' has no recognizable runner");
      n.duration = runner->duration;
      VaCSpec vac;
      vac.tool = runner->tool;
      auto ref = ScriptStateName(runner->script_path);
      n.item = ref ? ref->state : name;
      if (const auto* ss = ref ? ResolveState(hypothesis, ref->state) : nullptr) {
        vac = ss->vac;
        n.threshold = ss->threshold;
      }
      vac.script_path = runner->script_path;
      if (ref) vac.version = ref->version;
      n.vac = vac;
    } else if (auto kind = ParseFaultKind(type)) {
      n.type = NodeType::kFailure;
      const std::string key = TemplateKey(*kind);
      if (!t.contains(key)) throw ParseError("workflow: failure '" + name + "' lacks '" + key + "'");
      int name_id = 0;
      static const std::regex kSuffix(R"(-([0-9]+)$)");
      std::smatch m;
      const std::string lower = Lower(type);
      if (name.find(lower + "-") != std::string::npos && std::regex_search(name, m, kSuffix)) {
        name_id = std::max(0, std::stoi(m[1]) - 1);
      }
      n.fault = ParseFaultBody(*kind, t[key], name_id);
      n.item = std::string(FaultKindName(*kind));
      n.duration = n.deadline;
    } else {
      throw ParseError("workflow: template '" + name + "' has unknown type '" + type + "'");
    }
    active.erase(name);
    return n;
  };

  const std::string entry = spec.value("entry", "");
  if (entry.empty()) throw ParseError("workflow: missing spec.entry");
  out.tree = build(entry);
  for (auto& c : out.tree.children) {
    for (Stage s : kStages) {
      if (c.name == std::string(StageName(s)) + "-phase") {
        c.stage = s;
        if (stage_lengths) c.stage_length = (*stage_lengths)[static_cast<int>(s)];
      }
    }
  }
  return out;
}

ParsedWorkflow ParseWorkflow(std::string_view manifest, const Hypothesis* hypothesis,
                             std::optional<std::array<Duration, 3>> stage_lengths, const CompileOptions& options) {
  return ParseWorkflowJson(ParseYaml(manifest), hypothesis, stage_lengths, options);
}

std::string PatchWorkflow(std::string_view manifest, const std::map<std::string, SelectorSpec>& selector_updates,
                          const std::map<std::string, std::string>& script_updates, const CompileOptions& options) {
  Json j = ParseYaml(manifest);
  if (!j.contains("spec") || !j["spec"].contains("templates")) throw ParseError("workflow: missing templates");
  std::map<std::string, Json*> by_name;
  for (auto& t : j["spec"]["templates"]) by_name[t.value("name", "")] = &t;

  bool changed = false;
  for (const auto& [node, selector] : selector_updates) {
    auto it = by_name.find(node);
    if (it == by_name.end()) throw ContractViolation("patch: unknown node '" + node + "'");
    Json& t = *it->second;
    auto kind = ParseFaultKind(t.value("templateType", ""));
    if (!kind) throw ContractViolation("patch: node '" + node + "' is not a failure node");
    Json& body = t[TemplateKey(*kind)];
    const SelectorSpec current = body.contains("selector") ? SelectorSpec::FromJson(body["selector"]) : SelectorSpec{};
    if (current == selector) continue;
    body["selector"] = selector.ToJson();
    changed = true;
  }
  for (const auto& [node, path] : script_updates) {
    auto it = by_name.find(node);
    if (it == by_name.end()) throw ContractViolation("patch: unknown node '" + node + "'");
    Json& t = *it->second;
    if (t.value("templateType", "") != "Task") throw ContractViolation("patch: node '" + node + "' is not a task");
    Json& container = t["task"]["container"];
    auto runner = ParseRunner(container, options.mount);
    if (!runner) throw ContractViolation("patch: task '" + node + "' has no recognizable runner");
    if (runner->script_path == path) continue;
    VaCSpec vac;
    vac.tool = runner->tool;
    vac.script_path = path;
    const RunnerSpec r = RunnerCommand(vac, runner->duration, options.mount);
    container["command"] = r.command;
    if (r.args.empty()) {
      container.erase("args");
    } else {
      container["args"] = r.args;
    }
    changed = true;
  }
  return changed ? DumpYaml(j) : std::string(manifest);
}

Json NormalizeManifest(const Json& manifest) {
  Json j = SortKeys(manifest);
  if (j.contains("spec") && j["spec"].contains("templates") && j["spec"]["templates"].is_array()) {
    auto& ts = j["spec"]["templates"];
    for (auto& t : ts) {
      if (t.contains("deadline") && t["deadline"].is_string()) {
        try {
          t["deadline"] = FormatDuration(ParseDuration(t["deadline"].get<std::string>()));
        } catch (const ParseError&) {
        }
      }
    }
    std::vector<Json> v(ts.begin(), ts.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const Json& a, const Json& b) { return a.value("name", "") < b.value("name", ""); });
    ts = Json(v);
  }
  return j;
}

Json NormalizeManifest(std::string_view manifest) { return NormalizeManifest(ParseYaml(manifest)); }

namespace {

bool NamedArray(const Json& a) {
  if (!a.is_array() || a.empty()) return false;
  return std::all_of(a.begin(), a.end(),
                     [](const Json& e) { return e.is_object() && e.contains("name") && e["name"].is_string(); });
}

void Diff(const Json& e, const Json& a, const std::string& path, std::vector<std::string>& out) {
  if (e.is_object() && a.is_object()) {
    for (const auto& [k, v] : e.items()) {
      if (!a.contains(k)) {
        out.push_back(path + "." + k + ": missing");
      } else {
        Diff(v, a[k], path + "." + k, out);
      }
    }
    for (const auto& [k, v] : a.items()) {
      if (!e.contains(k)) out.push_back(path + "." + k + ": unexpected");
    }
    return;
  }
  if (NamedArray(e) && NamedArray(a)) {
    std::map<std::string, const Json*> em, am;
    for (const auto& x : e) em[x["name"].get<std::string>()] = &x;
    for (const auto& x : a) am[x["name"].get<std::string>()] = &x;
    for (const auto& [n, x] : em) {
      auto it = am.find(n);
      if (it == am.end()) {
        out.push_back(path + "[" + n + "]: missing");
      } else {
        Diff(*x, *it->second, path + "[" + n + "]", out);
      }
    }
    for (const auto& [n, x] : am) {
      if (!em.count(n)) out.push_back(path + "[" + n + "]: unexpected");
    }
    return;
  }
  if (e.is_array() && a.is_array() && e.size() == a.size()) {
    for (std::size_t i = 0; i < e.size(); ++i) Diff(e[i], a[i], path + "[" + std::to_string(i) + "]", out);
    return;
  }
  if (e != a) out.push_back(path + ": expected " + e.dump() + ", found " + a.dump());
}

}  // namespace

std::vector<std::string> StructuralDiff(const Json& expected, const Json& actual) {
  std::vector<std::string> out;
  Diff(NormalizeManifest(expected), NormalizeManifest(actual), "", out);
  return out;
}

void to_json(Json& j, const ScheduleItem& v) {
  j = Json::object();
  j["name"] = v.name;
  j["is_fault"] = v.is_fault;
  j["grace_period"] = FormatDuration(v.grace_period);
  j["duration"] = FormatDuration(v.duration);
  if (const auto* vac = v.vac()) j["vac"] = *vac;
  if (const auto* f = v.fault()) j["fault"] = *f;
}

void from_json(const Json& j, ScheduleItem& v) {
  v.name = j.at("name").get<std::string>();
  v.is_fault = j.value("is_fault", false);
  v.grace_period = ParseDuration(j.value("grace_period", "0s"));
  v.duration = ParseDuration(j.at("duration").get<std::string>());
  if (j.contains("fault")) {
    v.payload = j["fault"].get<Fault>();
  } else if (j.contains("vac")) {
    v.payload = j["vac"].get<VaCSpec>();
  } else {
    throw ParseError("schedule item '" + v.name + "' has neither vac nor fault");
  }
}

void to_json(Json& j, const ExperimentPlan& v) {
  j = Json::object();
  j["total_time"] = FormatDuration(v.total_time);
  j["pre_time"] = FormatDuration(v.pre_time);
  j["fault_time"] = FormatDuration(v.fault_time);
  j["post_time"] = FormatDuration(v.post_time);
  Json stages = Json::object();
  for (Stage s : kStages) stages[std::string(StageName(s))] = v.items(s);
  j["stages"] = stages;
  j["summary"] = v.summary;
}

void from_json(const Json& j, ExperimentPlan& v) {
  v.total_time = ParseDuration(j.at("total_time").get<std::string>());
  v.pre_time = ParseDuration(j.at("pre_time").get<std::string>());
  v.fault_time = ParseDuration(j.at("fault_time").get<std::string>());
  v.post_time = ParseDuration(j.at("post_time").get<std::string>());
  const Json& stages = j.at("stages");
  for (Stage s : kStages) {
    const std::string key(StageName(s));
    v.items(s) = stages.contains(key) ? stages[key].get<std::vector<ScheduleItem>>() : std::vector<ScheduleItem>{};
  }
  v.summary = j.value("summary", "");
}

}  // namespace chaoscycle
