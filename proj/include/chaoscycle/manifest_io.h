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

// Project loading, reconfiguration and versioned workspaces.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoscycle/domain.h"

namespace chaoscycle {

struct ManifestDoc {
  std::string path;  // project-relative file
  int index = 0;     // position inside a multi-document file
  bool multi_doc = false;
  std::string api_version;
  std::string kind;
  std::string name;
  std::string ns;  // "default" when metadata.namespace is absent
  LabelMap labels;
  Json body;

  // "path" for single-document files, "path#index" otherwise.
  std::string key() const;
  // Deployment/StatefulSet spec.replicas (1 when omitted).
  std::optional<int> replicas() const;
  // spec.template.metadata.labels for workload kinds.
  LabelMap pod_labels() const;
};

struct SystemSnapshot {
  std::string project_name;
  std::string skaffold_path = "skaffold.yaml";
  std::vector<std::string> manifest_paths;   // manifests.rawYaml order
  std::map<std::string, std::string> files;  // path -> text, skaffold included
  std::vector<ManifestDoc> manifests;        // indexed in listing order
  int version = 0;
  std::vector<std::string> warnings;

  const ManifestDoc* Find(std::string_view kind, std::string_view name) const;
  std::vector<const ManifestDoc*> InFile(std::string_view path) const;
  // Strips "<project_name>/" so planner paths like "nginx/pod.yaml" resolve.
  std::string Normalize(std::string_view fname) const;
  // "<project>/<path>" as shown to planners and in summaries.
  std::string Display(std::string_view path) const;
};

// Directory or .zip archive with skaffold.yaml at its root (a single
// wrapping folder inside an archive is tolerated).
SystemSnapshot LoadProject(const std::filesystem::path& path);
SystemSnapshot LoadProjectFiles(std::string project_name,
                                std::map<std::string, std::string> files);

// Writes every file of the snapshot under dir. Throws ProjectError if dir
// already holds files.
void WriteSnapshot(const SystemSnapshot& snapshot, const std::filesystem::path& dir);

enum class ReconfigMode { kCreate, kDelete, kReplace };
std::string_view ReconfigModeName(ReconfigMode mode);
ReconfigMode ParseReconfigMode(std::string_view name);

struct ReconfigAction {
  ReconfigMode mode = ReconfigMode::kReplace;
  std::string fname;
  std::string explanation;
  std::string code;

  friend bool operator==(const ReconfigAction&, const ReconfigAction&) = default;
};

void to_json(Json& j, const ReconfigAction& v);
void from_json(const Json& j, ReconfigAction& v);

// Returns snapshot version+1. Created files are appended to the skaffold
// listing and deleted ones removed (the skaffold file is rewritten only then).
SystemSnapshot ApplyReconfig(const SystemSnapshot& snapshot,
                             const std::vector<ReconfigAction>& actions);

enum class FileChangeType { kCreated, kDeleted, kReplaced };
std::string_view FileChangeTypeName(FileChangeType type);

struct ManifestDelta {
  std::string key;
  std::string old_kind, new_kind;
  std::string old_name, new_name;
  LabelMap old_labels, new_labels;
  std::optional<int> old_replicas, new_replicas;
};

struct FileChange {
  std::string path;
  FileChangeType type = FileChangeType::kReplaced;
  std::vector<ManifestDelta> deltas;
};

struct ChangeSummary {
  std::vector<FileChange> files;

  bool empty() const { return files.empty(); }
  const FileChange* Find(std::string_view path) const;
  std::string Describe() const;
};

ChangeSummary DiffSnapshots(const SystemSnapshot& old_snapshot,
                            const SystemSnapshot& new_snapshot);
Json ToJson(const ChangeSummary& summary);

// sandbox/cycle_<stamp>/ under an output root. Versions are write-once.
class Workspace {
 public:
  Workspace(std::filesystem::path out_root, std::string stamp);

  const std::filesystem::path& root() const { return root_; }
  const std::string& stamp() const { return stamp_; }
  // Path as seen from the shared volume, e.g. sandbox/cycle_20241124_132128.
  std::string volume_prefix() const { return "sandbox/cycle_" + stamp_; }
  std::filesystem::path InputsDir(int version) const;

  void Commit(const SystemSnapshot& snapshot);
  void WriteText(const std::filesystem::path& rel, std::string_view text) const;

 private:
  std::filesystem::path root_;
  std::string stamp_;
};

}  // namespace chaoscycle
