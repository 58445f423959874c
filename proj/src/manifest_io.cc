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

#include "chaoscycle/manifest_io.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "chaoscycle/error.h"
#include "chaoscycle/yaml_json.h"
#include "chaoscycle/zip_reader.h"

namespace chaoscycle {

namespace fs = std::filesystem;

namespace {

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ProjectError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LabelMap ToLabels(const Json& j) {
  LabelMap out;
  if (!j.is_object()) return out;
  for (const auto& [k, v] : j.items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

std::vector<ManifestDoc> ParseManifestFile(const std::string& path, const std::string& text) {
  std::vector<Json> docs;
  try {
    docs = ParseYamlAll(text);
  } catch (const ParseError& e) {
    throw ProjectError("unparseable manifest " + path + ": " + e.what());
  }
  if (docs.empty()) throw ProjectError("manifest " + path + " contains no documents");
  std::vector<ManifestDoc> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Json& d = docs[i];
    const std::string where = docs.size() > 1 ? path + "#" + std::to_string(i) : path;
    if (!d.is_object()) throw ProjectError("manifest " + where + " is not a mapping");
    auto str = [&](const Json& j) -> std::string { return j.is_string() ? j.get<std::string>() : ""; };
    ManifestDoc m;
    m.path = path;
    m.index = static_cast<int>(i);
    m.multi_doc = docs.size() > 1;
    m.api_version = str(d.value("apiVersion", Json()));
    m.kind = str(d.value("kind", Json()));
    const Json meta = d.value("metadata", Json::object());
    m.name = meta.is_object() ? str(meta.value("name", Json())) : "";
    if (m.api_version.empty() || m.kind.empty() || m.name.empty()) {
      throw ProjectError("manifest " + where + " lacks apiVersion, kind or metadata.name");
    }
    m.ns = meta.contains("namespace") ? str(meta["namespace"]) : "";
    if (m.ns.empty()) m.ns = "default";
    m.labels = ToLabels(meta.value("labels", Json::object()));
    m.body = d;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> SkaffoldManifests(const Json& cfg, std::vector<std::string>& warnings) {
  if (!cfg.is_object()) throw ProjectError("skaffold.yaml is not a mapping");
  for (const auto& [k, v] : cfg.items()) {
    if (k != "apiVersion" && k != "kind" && k != "metadata" && k != "manifests") {
      warnings.push_back("skaffold.yaml: ignoring unsupported section '" + k + "'");
    }
  }
  const Json manifests = cfg.value("manifests", Json::object());
  if (!manifests.is_object() || !manifests.contains("rawYaml") || !manifests["rawYaml"].is_array()) {
    throw ProjectError("skaffold.yaml has no manifests.rawYaml list");
  }
  for (const auto& [k, v] : manifests.items()) {
    if (k != "rawYaml") warnings.push_back("skaffold.yaml: ignoring manifests." + k);
  }
  std::vector<std::string> out;
  for (const auto& p : manifests["rawYaml"]) {
    if (!p.is_string()) throw ProjectError("skaffold.yaml: non-string manifest entry");
    out.push_back(p.get<std::string>());
  }
  return out;
}

void Reindex(SystemSnapshot& s) {
  s.manifests.clear();
  std::set<std::string> seen;
  for (const auto& p : s.manifest_paths) {
    if (!seen.insert(p).second) {
      s.warnings.push_back("skaffold.yaml lists " + p + " twice; indexed once");
      continue;
    }
    auto it = s.files.find(p);
    if (it == s.files.end()) throw ProjectError("manifest listed in skaffold.yaml not found: " + p);
    for (auto& m : ParseManifestFile(p, it->second)) s.manifests.push_back(std::move(m));
  }
}

std::string RewriteSkaffold(const std::string& text, const std::vector<std::string>& paths) {
  Json cfg = ParseYaml(text);
  Json list = Json::array();
  for (const auto& p : paths) list.push_back(p);
  cfg["manifests"]["rawYaml"] = list;
  return DumpYaml(cfg);
}

}  // namespace

std::string ManifestDoc::key() const {
  return multi_doc ? path + "#" + std::to_string(index) : path;
}

std::optional<int> ManifestDoc::replicas() const {
  if (kind != "Deployment" && kind != "StatefulSet" && kind != "ReplicaSet") return std::nullopt;
  const Json spec = body.value("spec", Json::object());
  if (spec.is_object() && spec.contains("replicas") && spec["replicas"].is_number_integer()) {
    return spec["replicas"].get<int>();
  }
  return 1;
}

LabelMap ManifestDoc::pod_labels() const {
  if (kind == "Pod") return labels;
  const Json& spec = body.value("spec", Json::object());
  if (!spec.is_object() || !spec.contains("template")) return {};
  const Json& tmpl = spec["template"];
  if (!tmpl.is_object() || !tmpl.contains("metadata")) return {};
  return ToLabels(tmpl["metadata"].value("labels", Json::object()));
}

const ManifestDoc* SystemSnapshot::Find(std::string_view kind, std::string_view name) const {
  for (const auto& m : manifests) {
    if (m.kind == kind && m.name == name) return &m;
  }
  return nullptr;
}

std::vector<const ManifestDoc*> SystemSnapshot::InFile(std::string_view path) const {
  std::vector<const ManifestDoc*> out;
  for (const auto& m : manifests) {
    if (m.path == path) out.push_back(&m);
  }
  return out;
}

std::string SystemSnapshot::Normalize(std::string_view fname) const {
  std::string p(fname);
  while (p.rfind("./", 0) == 0) p = p.substr(2);
  const std::string prefix = project_name + "/";
  if (!project_name.empty() && p.rfind(prefix, 0) == 0 && !files.count(p)) p = p.substr(prefix.size());
  return p;
}

std::string SystemSnapshot::Display(std::string_view path) const {
  return project_name.empty() ? std::string(path) : project_name + "/" + std::string(path);
}

SystemSnapshot LoadProjectFiles(std::string project_name, std::map<std::string, std::string> files) {
  SystemSnapshot s;
  s.project_name = std::move(project_name);
  s.files = std::move(files);
  auto cfg_it = s.files.find(s.skaffold_path);
  if (cfg_it == s.files.end()) {
    throw ProjectError("skaffold config not found (expected skaffold.yaml at the project root)");
  }
  Json cfg;
  try {
    cfg = ParseYaml(cfg_it->second);
  } catch (const ParseError& e) {
    throw ProjectError("unparseable skaffold.yaml: " + std::string(e.what()));
  }
  s.manifest_paths = SkaffoldManifests(cfg, s.warnings);
  Reindex(s);
  return s;
}

SystemSnapshot LoadProject(const fs::path& path) {
  std::map<std::string, std::string> files;
  std::string name;
  if (fs::is_directory(path)) {
    name = fs::absolute(path).lexically_normal().filename().string();
    if (name.empty()) name = fs::absolute(path).lexically_normal().parent_path().filename().string();
    if (!fs::exists(path / "skaffold.yaml")) {
      throw ProjectError("skaffold config not found in " + path.string());
    }
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (ext != ".yaml" && ext != ".yml") continue;
      files[fs::relative(e.path(), path).generic_string()] = ReadFile(e.path());
    }
  } else if (fs::is_regular_file(path) && path.extension() == ".zip") {
    auto entries = ReadZipArchive(path);
    name = path.stem().string();
    if (!entries.count("skaffold.yaml")) {
      std::set<std::string> tops;
      for (const auto& [k, v] : entries) tops.insert(k.substr(0, k.find('/')));
      if (tops.size() == 1 && entries.count(*tops.begin() + "/skaffold.yaml")) {
        name = *tops.begin();
        const std::string prefix = name + "/";
        std::map<std::string, std::string> stripped;
        for (auto& [k, v] : entries) stripped[k.substr(prefix.size())] = std::move(v);
        entries = std::move(stripped);
      }
    }
    if (!entries.count("skaffold.yaml")) throw ProjectError("skaffold config not found in " + path.string());
    files = std::move(entries);
  } else {
    throw ProjectError("project path is neither a directory nor a .zip archive: " + path.string());
  }
  return LoadProjectFiles(std::move(name), std::move(files));
}

void WriteSnapshot(const SystemSnapshot& snapshot, const fs::path& dir) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    throw ProjectError("refusing to overwrite existing directory " + dir.string());
  }
  for (const auto& [rel, text] : snapshot.files) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ProjectError("cannot write " + p.string());
    out << text;
  }
}

// ---------------------------------------------------------------------------

std::string_view ReconfigModeName(ReconfigMode mode) {
  switch (mode) {
    case ReconfigMode::kCreate: return "create";
    case ReconfigMode::kDelete: return "delete";
    case ReconfigMode::kReplace: return "replace";
  }
  return "?";
}

ReconfigMode ParseReconfigMode(std::string_view name) {
  if (name == "create") return ReconfigMode::kCreate;
  if (name == "delete") return ReconfigMode::kDelete;
  if (name == "replace") return ReconfigMode::kReplace;
  throw ParseError("unknown reconfiguration mode '" + std::string(name) + "'");
}

void to_json(Json& j, const ReconfigAction& v) {
  j = Json{{"mode", ReconfigModeName(v.mode)}, {"fname", v.fname}, {"explanation", v.explanation}};
  if (v.mode != ReconfigMode::kDelete) j["code"] = v.code;
}

void from_json(const Json& j, ReconfigAction& v) {
  v.mode = ParseReconfigMode(j.at("mode").get<std::string>());
  v.fname = j.at("fname").get<std::string>();
  v.explanation = j.value("explanation", "");
  v.code = j.value("code", "");
}

SystemSnapshot ApplyReconfig(const SystemSnapshot& snapshot, const std::vector<ReconfigAction>& actions) {
  SystemSnapshot next = snapshot;
  next.version = snapshot.version + 1;
  next.warnings.clear();
  std::set<std::string> touched;
  bool listing_changed = false;
  std::vector<std::string> violations;
  for (const auto& a : actions) {
    const std::string p = snapshot.Normalize(a.fname);
    if (p.empty() || p.find("..") != std::string::npos || p.front() == '/') {
      violations.push_back("invalid file name '" + a.fname + "'");
      continue;
    }
    if (!touched.insert(p).second) {
      violations.push_back("more than one action targets " + snapshot.Display(p));
      continue;
    }
    if (p == snapshot.skaffold_path) {
      violations.push_back("the skaffold config cannot be reconfigured directly");
      continue;
    }
    const bool exists = snapshot.files.count(p) > 0;
    switch (a.mode) {
      case ReconfigMode::kCreate:
        if (exists) {
          violations.push_back("create: " + snapshot.Display(p) + " already exists");
          break;
        }
        if (a.code.empty()) violations.push_back("create: " + snapshot.Display(p) + " has no code");
        next.files[p] = a.code;
        next.manifest_paths.push_back(p);
        listing_changed = true;
        break;
      case ReconfigMode::kReplace:
        if (!exists) {
          violations.push_back("replace: " + snapshot.Display(p) + " does not exist");
          break;
        }
        if (a.code.empty()) violations.push_back("replace: " + snapshot.Display(p) + " has no code");
        next.files[p] = a.code;
        break;
      case ReconfigMode::kDelete:
        if (!exists) {
          violations.push_back("delete: " + snapshot.Display(p) + " does not exist");
          break;
        }
        next.files.erase(p);
        next.manifest_paths.erase(
            std::remove(next.manifest_paths.begin(), next.manifest_paths.end(), p),
            next.manifest_paths.end());
        listing_changed = true;
        break;
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  if (listing_changed) {
    next.files[next.skaffold_path] =
        RewriteSkaffold(snapshot.files.at(snapshot.skaffold_path), next.manifest_paths);
  }
  Reindex(next);
  return next;
}

// ---------------------------------------------------------------------------

std::string_view FileChangeTypeName(FileChangeType type) {
  switch (type) {
    case FileChangeType::kCreated: return "created";
    case FileChangeType::kDeleted: return "deleted";
    case FileChangeType::kReplaced: return "replaced";
  }
  return "?";
}

const FileChange* ChangeSummary::Find(std::string_view path) const {
  for (const auto& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

namespace {

std::string LabelsText(const LabelMap& labels) {
  std::string s = "{";
  for (const auto& [k, v] : labels) {
    if (s.size() > 1) s += ", ";
    s += k + ": " + v;
  }
  return s + "}";
}

}  // namespace

std::string ChangeSummary::Describe() const {
  if (files.empty()) return "No manifest changes.\n";
  std::string out;
  for (const auto& f : files) {
    out += "- " + f.path + ": " + std::string(FileChangeTypeName(f.type)) + "\n";
    for (const auto& d : f.deltas) {
      if (d.old_kind != d.new_kind) out += "  kind " + d.old_kind + " -> " + d.new_kind + "\n";
      if (d.old_name != d.new_name) out += "  name " + d.old_name + " -> " + d.new_name + "\n";
      if (d.old_labels != d.new_labels) {
        out += "  labels " + LabelsText(d.old_labels) + " -> " + LabelsText(d.new_labels) + "\n";
      }
      if (d.old_replicas != d.new_replicas) {
        auto r = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };
        out += "  replicas " + r(d.old_replicas) + " -> " + r(d.new_replicas) + "\n";
      }
    }
  }
  return out;
}

ChangeSummary DiffSnapshots(const SystemSnapshot& old_snapshot, const SystemSnapshot& new_snapshot) {
  ChangeSummary summary;
  std::set<std::string> paths;
  for (const auto& p : old_snapshot.manifest_paths) paths.insert(p);
  for (const auto& p : new_snapshot.manifest_paths) paths.insert(p);
  for (const auto& p : paths) {
    const auto o = old_snapshot.files.find(p);
    const auto n = new_snapshot.files.find(p);
    const bool had = o != old_snapshot.files.end();
    const bool has = n != new_snapshot.files.end();
    if (had && has && o->second == n->second) continue;
    FileChange change;
    change.path = p;
    change.type = !had ? FileChangeType::kCreated : !has ? FileChangeType::kDeleted : FileChangeType::kReplaced;
    const auto olds = old_snapshot.InFile(p);
    const auto news = new_snapshot.InFile(p);
    for (std::size_t i = 0; i < std::max(olds.size(), news.size()); ++i) {
      ManifestDelta d;
      const ManifestDoc* a = i < olds.size() ? olds[i] : nullptr;
      const ManifestDoc* b = i < news.size() ? news[i] : nullptr;
      d.key = b ? b->key() : a->key();
      if (a) {
        d.old_kind = a->kind;
        d.old_name = a->name;
        d.old_labels = a->labels;
        d.old_replicas = a->replicas();
      }
      if (b) {
        d.new_kind = b->kind;
        d.new_name = b->name;
        d.new_labels = b->labels;
        d.new_replicas = b->replicas();
      }
      change.deltas.push_back(std::move(d));
    }
    summary.files.push_back(std::move(change));
  }
  return summary;
}

Json ToJson(const ChangeSummary& summary) {
  Json arr = Json::array();
  for (const auto& f : summary.files) {
    Json deltas = Json::array();
    for (const auto& d : f.deltas) {
      Json j{{"key", d.key},
             {"kind", {d.old_kind, d.new_kind}},
             {"name", {d.old_name, d.new_name}},
             {"labels", {d.old_labels, d.new_labels}}};
      j["replicas"] = {d.old_replicas ? Json(*d.old_replicas) : Json(),
                       d.new_replicas ? Json(*d.new_replicas) : Json()};
      deltas.push_back(std::move(j));
    }
    arr.push_back({{"path", f.path}, {"change", FileChangeTypeName(f.type)}, {"manifests", deltas}});
  }
  return arr;
}

// ---------------------------------------------------------------------------

Workspace::Workspace(fs::path out_root, std::string stamp)
    : root_(std::move(out_root) / "sandbox" / ("cycle_" + stamp)), stamp_(std::move(stamp)) {
  fs::create_directories(root_);
}

fs::path Workspace::InputsDir(int version) const {
  return root_ / ("inputs_v" + std::to_string(version));
}

void Workspace::Commit(const SystemSnapshot& snapshot) {
  WriteSnapshot(snapshot, InputsDir(snapshot.version));
}

void Workspace::WriteText(const fs::path& rel, std::string_view text) const {
  const fs::path p = root_ / rel;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ProjectError("cannot write " + p.string());
  out << text;
}

}  // namespace chaoscycle
