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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chaoscycle/error.h"
#include "chaoscycle/manifest_io.h"
#include "chaoscycle/yaml_json.h"

namespace chaoscycle {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = CHAOSCYCLE_FIXTURES;

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chaoscycle_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kNginxDeployment = R"(apiVersion: apps/v1
kind: Deployment
metadata:
  name: example-deployment
  labels:
    app: example
spec:
  replicas: 3
  selector:
    matchLabels:
      app: example
  template:
    metadata:
      labels:
        app: example
    spec:
      containers:
      - name: example-container
        image: nginx:1.17.1
)";

TEST(YamlTest, ScalarTyping) {
  const Json j = ParseYaml("a: '50'\nb: 50\nc: true\nd: 'true'\ne: ~\nf: 1.5\ng: 100ms\nh: |\n  12\n");
  EXPECT_TRUE(j["a"].is_string());
  EXPECT_TRUE(j["b"].is_number_integer());
  EXPECT_TRUE(j["c"].is_boolean());
  EXPECT_TRUE(j["d"].is_string());
  EXPECT_TRUE(j["e"].is_null());
  EXPECT_TRUE(j["f"].is_number_float());
  EXPECT_EQ(j["g"], "100ms");
  EXPECT_EQ(j["h"], "12\n");
}

TEST(YamlTest, DumpQuotesNumericLookingStrings) {
  const Json j = Json{{"correlation", "50"}, {"load", 80}, {"flag", "true"}, {"empty", ""}, {"f", 2.0}};
  const std::string text = DumpYaml(j);
  EXPECT_NE(text.find("correlation: '50'"), std::string::npos) << text;
  EXPECT_NE(text.find("load: 80"), std::string::npos);
  EXPECT_EQ(ParseYaml(text), j);
}

TEST(YamlTest, ParseErrorsAreTyped) {
  EXPECT_THROW(ParseYaml("a: [1, 2"), ParseError);
}

TEST(LoadProjectTest, Nginx) {
  const SystemSnapshot s = LoadProject(kFixtures / "nginx");
  EXPECT_EQ(s.project_name, "nginx");
  EXPECT_EQ(s.version, 0);
  ASSERT_EQ(s.manifests.size(), 2u);
  EXPECT_EQ(s.manifests[0].kind, "Pod");
  EXPECT_EQ(s.manifests[1].kind, "Service");
  EXPECT_EQ(s.manifests[0].ns, "default");
  EXPECT_EQ(s.manifests[0].labels.at("app"), "example");
  EXPECT_EQ(s.manifests[0].key(), "pod.yaml");
}

TEST(LoadProjectTest, SockShopHas29Manifests) {
  const SystemSnapshot s = LoadProject(kFixtures / "sock-shop-2");
  ASSERT_EQ(s.manifests.size(), 29u);
  EXPECT_EQ(s.manifests.front().kind, "Namespace");
  const ManifestDoc* fe = s.Find("Deployment", "front-end");
  ASSERT_NE(fe, nullptr);
  EXPECT_EQ(fe->ns, "sock-shop");
  EXPECT_EQ(fe->replicas(), 1);
  EXPECT_EQ(fe->pod_labels().at("name"), "front-end");
}

TEST(LoadProjectTest, ZipArchive) {
  const SystemSnapshot z = LoadProject(kFixtures / "nginx.zip");
  const SystemSnapshot d = LoadProject(kFixtures / "nginx");
  EXPECT_EQ(z.project_name, "nginx");
  EXPECT_EQ(z.files, d.files);
}

TEST(LoadProjectTest, ErrorsNameTheFile) {
  const fs::path empty = TempDir("empty");
  try {
    LoadProject(empty);
    FAIL();
  } catch (const ProjectError& e) {
    EXPECT_NE(std::string(e.what()).find("skaffold config not found"), std::string::npos);
  }
  std::map<std::string, std::string> files{
      {"skaffold.yaml", "manifests:\n  rawYaml:\n    - missing.yaml\n"}};
  try {
    LoadProjectFiles("p", files);
    FAIL();
  } catch (const ProjectError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.yaml"), std::string::npos);
  }
  files["missing.yaml"] = "kind: Pod\nmetadata: {}\n";
  try {
    LoadProjectFiles("p", files);
    FAIL();
  } catch (const ProjectError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.yaml"), std::string::npos);
  }
  files["missing.yaml"] = "a: [";
  EXPECT_THROW(LoadProjectFiles("p", files), ProjectError);
  fs::remove_all(empty);
}

TEST(LoadProjectTest, MultiDocumentFilesAreKeyedByIndex) {
  std::map<std::string, std::string> files{
      {"skaffold.yaml", "manifests:\n  rawYaml:\n    - all.yaml\n"},
      {"all.yaml", "apiVersion: v1\nkind: Pod\nmetadata:\n  name: a\n---\n"
                   "apiVersion: v1\nkind: Service\nmetadata:\n  name: b\n  namespace: x\n"}};
  const SystemSnapshot s = LoadProjectFiles("p", files);
  ASSERT_EQ(s.manifests.size(), 2u);
  EXPECT_EQ(s.manifests[0].key(), "all.yaml#0");
  EXPECT_EQ(s.manifests[1].key(), "all.yaml#1");
  EXPECT_EQ(s.manifests[1].ns, "x");
}

TEST(ApplyReconfigTest, ReplacePodWithDeployment) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  const SystemSnapshot v1 =
      ApplyReconfig(v0, {{ReconfigMode::kReplace, "nginx/pod.yaml", "use a deployment", kNginxDeployment}});
  EXPECT_EQ(v1.version, 1);
  const auto docs = v1.InFile("pod.yaml");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0]->kind, "Deployment");
  EXPECT_EQ(docs[0]->replicas(), 3);
  EXPECT_EQ(v1.files.at("skaffold.yaml"), v0.files.at("skaffold.yaml"));
  EXPECT_EQ(v0.InFile("pod.yaml")[0]->kind, "Pod");
}

TEST(ApplyReconfigTest, PreconditionViolations) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  EXPECT_THROW(ApplyReconfig(v0, {{ReconfigMode::kDelete, "missing.yaml", "", ""}}), ValidationError);
  EXPECT_THROW(ApplyReconfig(v0, {{ReconfigMode::kCreate, "pod.yaml", "", kNginxDeployment}}), ValidationError);
  EXPECT_THROW(ApplyReconfig(v0, {{ReconfigMode::kReplace, "pod.yaml", "", kNginxDeployment},
                                  {ReconfigMode::kDelete, "pod.yaml", "", ""}}),
               ValidationError);
  EXPECT_THROW(ApplyReconfig(v0, {{ReconfigMode::kReplace, "pod.yaml", "", "kind: Pod\n"}}), ProjectError);
}

TEST(ApplyReconfigTest, CreateAndDeleteRewriteSkaffoldListing) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  const SystemSnapshot v1 = ApplyReconfig(v0, {{ReconfigMode::kCreate, "deployment.yaml", "", kNginxDeployment},
                                               {ReconfigMode::kDelete, "pod.yaml", "", ""}});
  EXPECT_EQ(v1.manifest_paths, (std::vector<std::string>{"service.yaml", "deployment.yaml"}));
  const SystemSnapshot reloaded = LoadProjectFiles("nginx", v1.files);
  EXPECT_EQ(reloaded.manifest_paths, v1.manifest_paths);
  ASSERT_EQ(reloaded.manifests.size(), 2u);
  EXPECT_EQ(reloaded.manifests[1].kind, "Deployment");
}

TEST(ApplyReconfigTest, EmptyBatchIsIdentityUpToVersion) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  const SystemSnapshot v1 = ApplyReconfig(v0, {});
  EXPECT_EQ(v1.version, 1);
  EXPECT_EQ(v1.files, v0.files);
  EXPECT_TRUE(DiffSnapshots(v0, v1).empty());
}

TEST(DiffSnapshotsTest, NginxPodToDeployment) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  const SystemSnapshot v1 = ApplyReconfig(v0, {{ReconfigMode::kReplace, "pod.yaml", "", kNginxDeployment}});
  const ChangeSummary diff = DiffSnapshots(v0, v1);
  ASSERT_EQ(diff.files.size(), 1u);
  const FileChange& c = diff.files[0];
  EXPECT_EQ(c.path, "pod.yaml");
  EXPECT_EQ(c.type, FileChangeType::kReplaced);
  ASSERT_EQ(c.deltas.size(), 1u);
  EXPECT_EQ(c.deltas[0].old_kind, "Pod");
  EXPECT_EQ(c.deltas[0].new_kind, "Deployment");
  EXPECT_EQ(c.deltas[0].old_name, "example-pod");
  EXPECT_EQ(c.deltas[0].new_name, "example-deployment");
  EXPECT_EQ(c.deltas[0].old_labels, c.deltas[0].new_labels);
}

TEST(DiffSnapshotsTest, SockShopReplicaBump) {
  const SystemSnapshot v0 = LoadProject(kFixtures / "sock-shop-2");
  std::string text = v0.files.at("manifests/09-front-end-dep.yaml");
  text.replace(text.find("replicas: 1"), 11, "replicas: 2");
  const SystemSnapshot v1 = ApplyReconfig(v0, {{ReconfigMode::kReplace, "manifests/09-front-end-dep.yaml", "", text}});
  const ChangeSummary diff = DiffSnapshots(v0, v1);
  ASSERT_EQ(diff.files.size(), 1u);
  EXPECT_EQ(diff.files[0].deltas[0].old_replicas, 1);
  EXPECT_EQ(diff.files[0].deltas[0].new_replicas, 2);
  EXPECT_TRUE(DiffSnapshots(v0, v0).empty());
}

TEST(WorkspaceTest, VersionsAreWriteOnce) {
  const fs::path out = TempDir("ws");
  Workspace ws(out, "20241124_132128");
  EXPECT_EQ(ws.volume_prefix(), "sandbox/cycle_20241124_132128");
  const SystemSnapshot v0 = LoadProject(kFixtures / "nginx");
  ws.Commit(v0);
  const fs::path pod = ws.InputsDir(0) / "pod.yaml";
  std::ifstream before_in(pod);
  std::stringstream before;
  before << before_in.rdbuf();

  const SystemSnapshot v1 = ApplyReconfig(v0, {{ReconfigMode::kReplace, "pod.yaml", "", kNginxDeployment}});
  ws.Commit(v1);
  EXPECT_THROW(ws.Commit(v1), ProjectError);

  std::ifstream after_in(pod);
  std::stringstream after;
  after << after_in.rdbuf();
  EXPECT_EQ(before.str(), after.str());
  EXPECT_EQ(LoadProject(ws.InputsDir(1)).files, v1.files);
  fs::remove_all(out);
}

}  // namespace
}  // namespace chaoscycle
