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

#include "chaoscycle/vac_harness.h"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <sstream>

#include "chaoscycle/error.h"

namespace chaoscycle {

namespace {

std::string Num(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string MountedPath(std::string_view mount, std::string_view script) {
  std::string m(mount);
  while (!m.empty() && m.back() == '/') m.pop_back();
  std::string s(script);
  while (!s.empty() && s.front() == '/') s.erase(s.begin());
  return m + "/" + s;
}

bool MetricMatchesTool(ThresholdMetric metric, ProbeTool tool) {
  return (metric == ThresholdMetric::kRequestFailureRate) == (tool == ProbeTool::kLoadTest);
}

std::string PyDict(const LabelMap& m) {
  std::string s = "{";
  for (const auto& [k, v] : m) {
    if (s.size() > 1) s += ", ";
    s += "\"" + k + "\": \"" + v + "\"";
  }
  return s + "}";
}

std::string ClusterApiScript(const VaCSpec& vac, const ThresholdSpec& th) {
  const auto& t = vac.target;
  const std::string cmp(ComparatorSymbol(th.comparator));
  std::string sample_fn;
  std::string verdict;
  const bool by_name = !t.name.empty();

  switch (th.metric) {
    case ThresholdMetric::kRunningRatio:
      sample_fn =
          "    def sample(self):\n"
          "        pods = self.target_pods()\n"
          "        return sum(1 for p in pods if p.status.phase == \"Running\")\n";
      verdict =
          "    ok = sum(1 for s in samples if s >= 1)\n"
          "    running_percentage = ok / total * 100\n"
          "    print(f\"{TARGET} was running {ok} out of {total} seconds, which is {running_percentage:.2f}%\")\n"
          "    assert running_percentage " + cmp + " " + Num(th.value * 100) +
          ", f\"running percentage {running_percentage:.2f}% violates " + cmp + " " + Num(th.value * 100) + "%\"\n";
      break;
    case ThresholdMetric::kReadyRatio:
      sample_fn =
          "    def sample(self):\n"
          "        desired, ready = self.replica_counts()\n"
          "        return ready / desired if desired else 0.0\n";
      verdict =
          "    ok = sum(1 for s in samples if s >= 1.0)\n"
          "    ready_percentage = ok / total * 100\n"
          "    print(f\"{TARGET} was fully ready {ok} out of {total} seconds, which is {ready_percentage:.2f}%\")\n"
          "    assert ready_percentage " + cmp + " " + Num(th.value * 100) +
          ", f\"ready percentage {ready_percentage:.2f}% violates " + cmp + " " + Num(th.value * 100) + "%\"\n";
      break;
    case ThresholdMetric::kReadyReplicasMin:
      sample_fn =
          "    def sample(self):\n"
          "        return self.replica_counts()[1]\n";
      if (th.comparator == Comparator::kAtLeast) {
        verdict =
            "    ok = sum(1 for s in samples if s >= " + Num(th.value) + ")\n"
            "    readiness_percentage = ok / total * 100\n"
            "    print(f\"{TARGET} had >= " + Num(th.value) +
            " ready replicas {ok} out of {total} seconds, which is {readiness_percentage:.2f}%\")\n"
            "    assert readiness_percentage == 100, f\"ready replicas dropped below " + Num(th.value) +
            " (min {min(samples)})\"\n";
      } else {
        verdict =
            "    min_ready = min(samples)\n"
            "    print(f\"{TARGET} minimum ready replicas over {total} seconds: {min_ready}\")\n"
            "    assert min_ready " + cmp + " " + Num(th.value) + ", f\"minimum ready replicas {min_ready} violates " +
            cmp + " " + Num(th.value) + "\"\n";
      }
      break;
    case ThresholdMetric::kRequestFailureRate:
      break;
  }

  const std::string target_desc = t.kind + " " + (by_name ? "'" + t.name + "'" : PyDict(t.label_selector));
  std::string s;
  s += "# Steady state probe: " + std::string(MetricName(th.metric)) + " " + cmp + " " + Num(th.value) + "\n";
  s += "# Target: " + target_desc + " in namespace " + t.ns + "\n";
  s +=
      "import argparse\n"
      "import time\n"
      "\n"
      "from kubernetes import client, config\n"
      "\n"
      "NAMESPACE = \"" + t.ns + "\"\n"
      "KIND = \"" + t.kind + "\"\n"
      "NAME = " + (by_name ? "\"" + t.name + "\"" : std::string("None")) + "\n"
      "LABELS = " + PyDict(t.label_selector) + "\n"
      "TARGET = \"" + t.kind + " " + (by_name ? t.name : std::string("selector")) + "\"\n"
      "\n"
      "\n"
      "class K8sAPIBase:\n"
      "    def __init__(self):\n"
      "        try:\n"
      "            config.load_incluster_config()\n"
      "        except config.ConfigException:\n"
      "            config.load_kube_config()\n"
      "        self.core = client.CoreV1Api()\n"
      "        self.apps = client.AppsV1Api()\n"
      "\n"
      "\n"
      "class Probe(K8sAPIBase):\n"
      "    def target_pods(self):\n"
      "        if KIND == \"Pod\" and NAME:\n"
      "            try:\n"
      "                return [self.core.read_namespaced_pod(NAME, NAMESPACE)]\n"
      "            except client.exceptions.ApiException:\n"
      "                return []\n"
      "        selector = \",\".join(f\"{k}={v}\" for k, v in LABELS.items())\n"
      "        if KIND != \"Pod\" and NAME:\n"
      "            dep = self.apps.read_namespaced_deployment(NAME, NAMESPACE)\n"
      "            selector = \",\".join(f\"{k}={v}\" for k, v in dep.spec.selector.match_labels.items())\n"
      "        return self.core.list_namespaced_pod(NAMESPACE, label_selector=selector).items\n"
      "\n"
      "    def replica_counts(self):\n"
      "        if KIND == \"Deployment\" and NAME:\n"
      "            try:\n"
      "                dep = self.apps.read_namespaced_deployment(NAME, NAMESPACE)\n"
      "            except client.exceptions.ApiException:\n"
      "                return 0, 0\n"
      "            return dep.spec.replicas or 0, dep.status.ready_replicas or 0\n"
      "        pods = self.target_pods()\n"
      "        ready = 0\n"
      "        for p in pods:\n"
      "            conds = p.status.conditions or []\n"
      "            if any(c.type == \"Ready\" and c.status == \"True\" for c in conds):\n"
      "                ready += 1\n"
      "        return len(pods), ready\n"
      "\n" +
      sample_fn +
      "\n"
      "    def run(self, duration):\n"
      "        samples = []\n"
      "        for _ in range(duration):\n"
      "            samples.append(self.sample())\n"
      "            time.sleep(1)\n"
      "        return samples\n"
      "\n"
      "\n"
      "def main():\n"
      "    parser = argparse.ArgumentParser()\n"
      "    parser.add_argument(\"--duration\", type=int, default=" + std::to_string(5) + ")\n"
      "    args = parser.parse_args()\n"
      "    samples = Probe().run(args.duration)\n"
      "    total = len(samples)\n" +
      verdict +
      "\n"
      "\n"
      "if __name__ == \"__main__\":\n"
      "    main()\n";
  return s;
}

std::string LoadTestScript(const VaCSpec& vac, const ThresholdSpec& th) {
  std::string url = vac.target.url;
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) url = "http://" + url;
  const std::string cmp(ComparatorSymbol(th.comparator));
  std::string s;
  s += "// Steady state probe: " + std::string(MetricName(th.metric)) + " " + cmp + " " + Num(th.value) + "\n";
  s +=
      "import http from 'k6/http';\n"
      "import { check } from 'k6';\n"
      "\n"
      "export const options = {\n"
      "  vus: " + std::to_string(vac.vus) + ",\n"
      "  thresholds: {\n"
      "    'http_req_failed': ['rate" + cmp + Num(th.value) + "'],\n"
      "  },\n"
      "};\n"
      "\n"
      "export default function () {\n"
      "  const res = http.get('" + url + "');\n"
      "  check(res, { 'status is 2xx': (r) => r.status >= 200 && r.status < 300 });\n"
      "}\n";
  return s;
}

}  // namespace

RunnerSpec RunnerCommand(const VaCSpec& vac, Duration duration, std::string_view mount) {
  if (duration.is_zero()) throw ContractViolation("runner duration must be at least 1s");
  if (vac.script_path.empty()) throw ContractViolation("runner needs a script path");
  const std::string path = MountedPath(mount, vac.script_path);
  RunnerSpec r;
  if (vac.tool == ProbeTool::kClusterApi) {
    r.image = std::string(kClusterApiImage);
    r.image_pull_policy = "IfNotPresent";
    r.command = {"/bin/bash", "-c"};
    r.args = {"python " + path + " --duration " + std::to_string(duration.seconds())};
    r.argv = {"python", path, "--duration", std::to_string(duration.seconds())};
  } else {
    r.image = std::string(kLoadTestImage);
    r.command = {"k6", "run", "--duration", std::to_string(duration.seconds()) + "s", "--quiet", path};
    r.argv = r.command;
  }
  return r;
}

std::optional<ParsedRunner> ParseRunner(const Json& container, std::string_view mount) {
  if (!container.is_object()) return std::nullopt;
  const std::string image = container.value("image", "");
  auto strings = [&](const char* key) {
    std::vector<std::string> out;
    if (container.contains(key) && container[key].is_array()) {
      for (const auto& v : container[key]) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    return out;
  };
  const auto command = strings("command");
  const auto args = strings("args");
  std::string prefix(mount);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  prefix += "/";
  auto strip = [&](const std::string& p) { return p.rfind(prefix, 0) == 0 ? p.substr(prefix.size()) : p; };

  if (image == kClusterApiImage || (!command.empty() && command.front() == "/bin/bash")) {
    std::string line;
    for (const auto& a : args) line += (line.empty() ? "" : " ") + a;
    static const std::regex kLine(R"(^\s*python3?\s+(\S+)\s+--duration\s+([0-9]+)\s*$)");
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) return std::nullopt;
    return ParsedRunner{ProbeTool::kClusterApi, strip(m[1]), Duration::Seconds(std::stoll(m[2]))};
  }
  if (image == kLoadTestImage || (!command.empty() && command.front() == "k6")) {
    std::vector<std::string> argv = command;
    argv.insert(argv.end(), args.begin(), args.end());
    std::optional<Duration> d;
    std::string script;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--duration" && i + 1 < argv.size()) {
        try {
          d = ParseDuration(argv[++i]);
        } catch (const ParseError&) {
          return std::nullopt;
        }
      } else if (argv[i] != "k6" && argv[i] != "run" && argv[i].rfind("--", 0) != 0) {
        script = argv[i];
      }
    }
    if (!d || script.empty()) return std::nullopt;
    return ParsedRunner{ProbeTool::kLoadTest, strip(script), *d};
  }
  return std::nullopt;
}

std::string RenderProbeScript(const VaCSpec& vac, const ThresholdSpec& threshold) {
  if (!MetricMatchesTool(threshold.metric, vac.tool)) {
    throw ContractViolation("metric " + std::string(MetricName(threshold.metric)) + " cannot be measured with " +
                            std::string(ProbeToolName(vac.tool)));
  }
  return vac.tool == ProbeTool::kClusterApi ? ClusterApiScript(vac, threshold) : LoadTestScript(vac, threshold);
}

std::string ProbeScriptPath(std::string_view dir, std::string_view steady_state, const VaCSpec& vac) {
  std::string d(dir);
  if (!d.empty() && d.back() != '/') d += '/';
  return d + "unittest_" + std::string(steady_state) + "_mod" + std::to_string(vac.version) +
         (vac.tool == ProbeTool::kClusterApi ? ".py" : ".js");
}

VaCOutcome EvaluateThreshold(const ThresholdSpec& threshold, const SampleTrace& trace, std::string run_name) {
  if (trace.samples.empty()) {
    throw ContractViolation("cannot evaluate an empty trace for '" + trace.steady_state_name + "'");
  }
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    if (trace.samples[i].t <= trace.samples[i - 1].t) {
      throw ContractViolation("trace timestamps must increase for '" + trace.steady_state_name + "'");
    }
  }
  VaCOutcome out;
  out.name = run_name.empty() ? trace.steady_state_name : std::move(run_name);
  out.measured = AggregateTrace(threshold.metric, trace);
  out.passed = threshold.Holds(out.measured);

  const auto total = trace.samples.size();
  std::size_t ok = 0;
  std::string log = out.name + ": " + std::string(MetricName(threshold.metric)) + " " +
                    std::string(ComparatorSymbol(threshold.comparator)) + " " + Num(threshold.value) + "\n";
  for (const auto& p : trace.samples) {
    const bool good = threshold.metric == ThresholdMetric::kReadyReplicasMin
                          ? threshold.Holds(p.value)
                          : SampleSatisfies(threshold.metric, p.value);
    ok += good ? 1 : 0;
    log += "  t=" + std::to_string(p.t) + "s value=" + Num(p.value) + (good ? "" : " !") + "\n";
  }
  const std::string counts = std::to_string(ok) + " out of " + std::to_string(total) + " seconds";
  switch (threshold.metric) {
    case ThresholdMetric::kRunningRatio:
      log += "Target was running " + counts + ", which is " + Fixed2(out.measured * 100) + "%\n";
      break;
    case ThresholdMetric::kReadyRatio:
      log += "Target was fully ready " + counts + ", which is " + Fixed2(out.measured * 100) + "%\n";
      break;
    case ThresholdMetric::kReadyReplicasMin:
      log += "Ready replicas met the threshold " + counts + "; minimum was " + Num(out.measured) + "\n";
      break;
    case ThresholdMetric::kRequestFailureRate:
      log += "Requests succeeded in " + counts + "; failure rate was " + Num(out.measured) + "\n";
      break;
  }
  log += out.passed ? "PASS\n" : "FAIL\n";
  out.log = std::move(log);
  return out;
}

}  // namespace chaoscycle
