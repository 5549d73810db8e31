//
// Copyright 2026 The WASP Synthesis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "wasp/run_config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "wasp/status_macros.h"
#include "wasp/weighting.h"
#include "yaml-cpp/yaml.h"

namespace wasp {
namespace {

namespace fs = std::filesystem;

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(base_dir) / path).lexically_normal().string();
}

absl::Status Missing(const std::string& key) {
  return absl::InvalidArgumentError(
      absl::StrCat("config is missing required key '", key, "'"));
}

template <typename T>
absl::Status Read(const YAML::Node& parent, const char* key,
                  const std::string& where, T& out, bool required) {
  const YAML::Node node = parent[key];
  if (!node) {
    return required ? Missing(absl::StrCat(where, key)) : absl::OkStatus();
  }
  try {
    out = node.as<T>();
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(
        "config key '", where, key, "' has the wrong type (line ",
        e.mark.line + 1, ")"));
  }
  return absl::OkStatus();
}

absl::Status ReadMeans(const YAML::Node& node, const std::string& where,
                       std::map<std::string, std::vector<double>>& out) {
  if (!node) return Missing(where);
  if (!node.IsMap()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", where, "' must map labels to vectors"));
  }
  try {
    for (const auto& kv : node) {
      out[kv.first.as<std::string>()] = kv.second.as<std::vector<double>>();
    }
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(
        "config key '", where, "' has a malformed vector (line ",
        e.mark.line + 1, ")"));
  }
  return absl::OkStatus();
}

absl::Status ReadHttpOptions(const YAML::Node& node, const std::string& where,
                             HttpOptions& out) {
  WASP_RETURN_IF_ERROR(
      Read(node, "timeout_seconds", where, out.timeout_seconds, false));
  WASP_RETURN_IF_ERROR(Read(node, "retries", where, out.retries, false));
  WASP_RETURN_IF_ERROR(
      Read(node, "backoff_seconds", where, out.backoff_seconds, false));
  return absl::OkStatus();
}

absl::StatusOr<GeneratorSpec> ReadGenerator(const YAML::Node& node,
                                            size_t index, int dimension) {
  const std::string where = absl::StrCat("generators[", index, "].");
  if (!node.IsMap()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config entry 'generators[", index, "]' must be a map"));
  }
  GeneratorSpec g;
  WASP_RETURN_IF_ERROR(Read(node, "kind", where, g.kind, true));
  if (g.kind == "mock") {
    MockGeneratorOptions& m = g.mock;
    m.dimension = dimension;
    WASP_RETURN_IF_ERROR(Read(node, "id", where, m.id, true));
    WASP_RETURN_IF_ERROR(ReadMeans(node["means"], where + "means", m.label_means));
    WASP_RETURN_IF_ERROR(Read(node, "offset", where, m.offset, false));
    WASP_RETURN_IF_ERROR(Read(node, "stddev", where, m.stddev, false));
    WASP_RETURN_IF_ERROR(
        Read(node, "responsiveness", where, m.responsiveness, false));
    WASP_RETURN_IF_ERROR(Read(node, "contrast", where, m.contrast, false));
  } else if (g.kind == "http") {
    HttpGeneratorOptions& h = g.http;
    WASP_RETURN_IF_ERROR(Read(node, "id", where, h.id, true));
    WASP_RETURN_IF_ERROR(Read(node, "endpoint", where, h.endpoint, true));
    WASP_RETURN_IF_ERROR(Read(node, "model", where, h.model, true));
    WASP_RETURN_IF_ERROR(Read(node, "api", where, h.api, false));
    WASP_RETURN_IF_ERROR(Read(node, "temperature", where, h.temperature, false));
    WASP_RETURN_IF_ERROR(Read(node, "max_tokens", where, h.max_tokens, false));
    WASP_RETURN_IF_ERROR(Read(node, "api_key_env", where, h.api_key_env, false));
    WASP_RETURN_IF_ERROR(
        Read(node, "item_retries", where, h.item_retries, false));
    WASP_RETURN_IF_ERROR(Read(node, "concurrency", where, h.concurrency, false));
    WASP_RETURN_IF_ERROR(ReadHttpOptions(node, where, h.http));
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "config key '", where, "kind' must be mock or http, got '", g.kind,
        "'"));
  }
  return g;
}

}  // namespace

double RunConfig::EffectiveWeightFloor() const {
  return weight_floor.value_or(
      DefaultWeightFloor(std::max(1, num_generators())));
}

std::vector<std::string> RunConfig::GeneratorIds() const {
  std::vector<std::string> ids;
  for (const auto& g : generators) ids.push_back(g.id());
  return ids;
}

absl::Status RunConfig::Validate() const {
  WASP_RETURN_IF_ERROR(task.Validate());
  WASP_RETURN_IF_ERROR(privacy.Validate());
  const int t = iterations();
  if (n < t) {
    return absl::InvalidArgumentError(
        absl::StrCat("N = ", n, " must be at least T = ", t));
  }
  if (q < 1) return absl::InvalidArgumentError("Q must be >= 1");
  if (s < 2) return absl::InvalidArgumentError("S must be >= 2");
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (!(dirichlet_alpha > 0) || !std::isfinite(dirichlet_alpha)) {
    return absl::InvalidArgumentError("Dirichlet alpha must be > 0");
  }
  if (generators.empty()) {
    return absl::InvalidArgumentError("at least one generator is required");
  }
  if (n < static_cast<int64_t>(num_generators()) * t) {
    return absl::InvalidArgumentError(absl::StrCat(
        "N/T = ", static_cast<double>(n) / t, " is below the generator count ",
        num_generators()));
  }
  const double floor = EffectiveWeightFloor();
  if (!(floor >= 0) || floor * num_generators() > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("weight floor ", floor, " is infeasible"));
  }
  if (private_data.empty() && !private_simulation.has_value()) {
    return absl::InvalidArgumentError(
        "config needs private_data or private_simulation");
  }
  if (embedder.kind != "simulation" && embedder.kind != "http") {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedder kind must be simulation or http, got '", embedder.kind, "'"));
  }
  if (embedder.dimension < 1) {
    return absl::InvalidArgumentError("embedder dimension must be >= 1");
  }
  if (embedder.kind == "http" &&
      (embedder.http.endpoint.empty() || embedder.http.model.empty())) {
    return absl::InvalidArgumentError(
        "http embedder needs an endpoint and model");
  }
  std::set<std::string> ids;
  for (const auto& g : generators) {
    if (!ids.insert(g.id()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate generator id '", g.id(), "'"));
    }
    if (g.kind == "mock") {
      WASP_RETURN_IF_ERROR(g.mock.Validate());
      if (embedder.kind != "simulation") {
        return absl::InvalidArgumentError(absl::StrCat(
            "mock generator '", g.id(), "' requires the simulation embedder"));
      }
      if (g.mock.dimension != embedder.dimension) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mock generator '", g.id(), "' has dimension ", g.mock.dimension,
            ", embedder ", embedder.dimension));
      }
      for (const auto& c : task.categories) {
        if (!g.mock.label_means.contains(c)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "mock generator '", g.id(), "' has no mean for category '", c,
              "'"));
        }
      }
    } else if (g.kind == "http") {
      if (g.http.endpoint.empty() || g.http.model.empty() || g.id().empty()) {
        return absl::InvalidArgumentError(
            "http generator needs id, endpoint and model");
      }
      if (g.http.http.timeout_seconds <= 0 || g.http.http.retries < 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "http generator '", g.id(), "' needs a finite timeout and retries"));
      }
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown generator kind '", g.kind, "'"));
    }
  }
  if (private_simulation.has_value()) {
    if (private_simulation->count < 1) {
      return absl::InvalidArgumentError("private_simulation.count must be >= 1");
    }
    for (const auto& c : task.categories) {
      const auto it = private_simulation->means.find(c);
      if (it == private_simulation->means.end()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "private_simulation has no mean for category '", c, "'"));
      }
      if (static_cast<int>(it->second.size()) != embedder.dimension) {
        return absl::InvalidArgumentError(absl::StrCat(
            "private_simulation mean for '", c, "' has wrong dimension"));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> ParseRunConfig(const std::string& yaml_text,
                                         const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config is not valid YAML: ", e.what()));
  }
  if (!root.IsMap()) {
    return absl::InvalidArgumentError("config must be a YAML mapping");
  }
  RunConfig c;

  const YAML::Node task = root["task"];
  if (!task || !task.IsMap()) return Missing("task");
  WASP_RETURN_IF_ERROR(Read(task, "name", "task.", c.task.name, true));
  if (absl::StatusOr<TaskDescriptor> builtin = BuiltinTask(c.task.name);
      builtin.ok()) {
    c.task = *builtin;
  }
  WASP_RETURN_IF_ERROR(
      Read(task, "categories", "task.", c.task.categories, false));
  WASP_RETURN_IF_ERROR(
      Read(task, "attributes", "task.", c.task.attributes, false));
  WASP_RETURN_IF_ERROR(Read(task, "template", "task.", c.template_path, false));
  c.template_path = Resolve(base_dir, c.template_path);

  WASP_RETURN_IF_ERROR(Read(root, "n", "", c.n, true));
  WASP_RETURN_IF_ERROR(Read(root, "iterations", "", c.privacy.iterations, true));
  WASP_RETURN_IF_ERROR(Read(root, "q", "", c.q, true));
  WASP_RETURN_IF_ERROR(Read(root, "s", "", c.s, true));
  WASP_RETURN_IF_ERROR(Read(root, "seed", "", c.seed, true));
  WASP_RETURN_IF_ERROR(Read(root, "output_dir", "", c.output_dir, false));
  c.output_dir = Resolve(base_dir, c.output_dir);
  WASP_RETURN_IF_ERROR(Read(root, "private_data", "", c.private_data, false));
  c.private_data = Resolve(base_dir, c.private_data);
  WASP_RETURN_IF_ERROR(Read(root, "threads", "", c.threads, false));
  if (root["weight_floor"]) {
    double floor = 0;
    WASP_RETURN_IF_ERROR(Read(root, "weight_floor", "", floor, true));
    c.weight_floor = floor;
  }

  if (const YAML::Node mode = root["mode"]) {
    WASP_RETURN_IF_ERROR(Read(mode, "contrastive", "mode.", c.contrastive, false));
    WASP_RETURN_IF_ERROR(Read(mode, "weighting", "mode.", c.weighting, false));
  }

  const YAML::Node privacy = root["privacy"];
  if (!privacy || !privacy.IsMap()) return Missing("privacy");
  WASP_RETURN_IF_ERROR(
      Read(privacy, "epsilon", "privacy.", c.privacy.epsilon, true));
  if (std::isinf(c.privacy.epsilon) && c.privacy.epsilon > 0) {
    c.privacy.infinite_epsilon = true;
  }
  WASP_RETURN_IF_ERROR(Read(privacy, "delta", "privacy.", c.privacy.delta, true));
  std::string level = "sample";
  WASP_RETURN_IF_ERROR(Read(privacy, "level", "privacy.", level, false));
  WASP_ASSIGN_OR_RETURN(c.privacy.level, ParsePrivacyLevel(level));
  if (privacy["max_party_size"]) {
    int m = 0;
    WASP_RETURN_IF_ERROR(Read(privacy, "max_party_size", "privacy.", m, true));
    c.privacy.max_party_size = m;
  }

  if (const YAML::Node fed = root["federation"]) {
    WASP_RETURN_IF_ERROR(
        Read(fed, "parties", "federation.", c.privacy.parties, false));
    WASP_RETURN_IF_ERROR(
        Read(fed, "alpha", "federation.", c.dirichlet_alpha, false));
  }

  const YAML::Node emb = root["embedder"];
  if (!emb || !emb.IsMap()) return Missing("embedder");
  WASP_RETURN_IF_ERROR(Read(emb, "kind", "embedder.", c.embedder.kind, true));
  WASP_RETURN_IF_ERROR(
      Read(emb, "dimension", "embedder.", c.embedder.dimension, true));
  WASP_RETURN_IF_ERROR(Read(emb, "seed", "embedder.", c.embedder.seed, false));
  if (c.embedder.kind == "http") {
    HttpEmbedderOptions& h = c.embedder.http;
    h.dimension = c.embedder.dimension;
    WASP_RETURN_IF_ERROR(Read(emb, "endpoint", "embedder.", h.endpoint, true));
    WASP_RETURN_IF_ERROR(Read(emb, "model", "embedder.", h.model, true));
    WASP_RETURN_IF_ERROR(Read(emb, "cache_dir", "embedder.", h.cache_dir, false));
    h.cache_dir = Resolve(base_dir, h.cache_dir);
    WASP_RETURN_IF_ERROR(
        Read(emb, "api_key_env", "embedder.", h.api_key_env, false));
    WASP_RETURN_IF_ERROR(Read(emb, "max_batch", "embedder.", h.max_batch, false));
    WASP_RETURN_IF_ERROR(ReadHttpOptions(emb, "embedder.", h.http));
  }

  const YAML::Node gens = root["generators"];
  if (!gens || !gens.IsSequence()) return Missing("generators");
  for (size_t i = 0; i < gens.size(); ++i) {
    WASP_ASSIGN_OR_RETURN(GeneratorSpec g,
                          ReadGenerator(gens[i], i, c.embedder.dimension));
    c.generators.push_back(std::move(g));
  }

  if (const YAML::Node sim = root["private_simulation"]) {
    PrivateSimulationSpec p;
    p.seed = c.seed;
    WASP_RETURN_IF_ERROR(
        Read(sim, "count", "private_simulation.", p.count, true));
    WASP_RETURN_IF_ERROR(
        Read(sim, "stddev", "private_simulation.", p.stddev, false));
    WASP_RETURN_IF_ERROR(Read(sim, "seed", "private_simulation.", p.seed, false));
    WASP_RETURN_IF_ERROR(
        ReadMeans(sim["means"], "private_simulation.means", p.means));
    c.private_simulation = std::move(p);
  }

  WASP_RETURN_IF_ERROR(c.Validate());
  return c;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  absl::StatusOr<RunConfig> c =
      ParseRunConfig(buf.str(), fs::path(path).parent_path().string());
  if (!c.ok()) {
    return absl::Status(c.status().code(),
                        absl::StrCat(path, ": ", c.status().message()));
  }
  return c;
}

absl::StatusOr<std::unique_ptr<Embedder>> MakeEmbedder(
    const EmbedderSpec& spec) {
  if (spec.kind == "simulation") {
    return std::unique_ptr<Embedder>(
        std::make_unique<SimulationEmbedder>(spec.dimension, spec.seed));
  }
  if (spec.kind == "http") {
    HttpEmbedderOptions options = spec.http;
    options.dimension = spec.dimension;
    return std::unique_ptr<Embedder>(
        std::make_unique<HttpEmbedder>(std::move(options)));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown embedder kind '", spec.kind, "'"));
}

absl::StatusOr<std::vector<std::unique_ptr<Generator>>> MakeGenerators(
    const RunConfig& config) {
  std::vector<std::unique_ptr<Generator>> out;
  for (const auto& g : config.generators) {
    if (g.kind == "mock") {
      out.push_back(std::make_unique<MockGenerator>(g.mock));
    } else if (g.kind == "http") {
      out.push_back(std::make_unique<HttpGenerator>(g.http));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown generator kind '", g.kind, "'"));
    }
  }
  return out;
}

absl::StatusOr<PromptTemplate> ResolveTemplate(const RunConfig& config) {
  if (!config.template_path.empty()) return LoadTemplate(config.template_path);
  absl::StatusOr<PromptTemplate> t = BuiltinTemplate(config.task.name);
  if (!t.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        t.status().message(), "; set task.template to a template file"));
  }
  return t;
}

absl::StatusOr<std::vector<LabeledSample>> SimulatePrivateData(
    const PrivateSimulationSpec& spec, const TaskDescriptor& task,
    int dimension) {
  SimulationEmbedder codec(dimension, 0);
  Rng rng(DeriveSeed(spec.seed, "private"));
  const int64_t c = static_cast<int64_t>(task.categories.size());
  std::vector<LabeledSample> out;
  out.reserve(spec.count);
  for (int64_t i = 0; i < spec.count; ++i) {
    const std::string& label = task.categories[i % c];
    const auto it = spec.means.find(label);
    if (it == spec.means.end() ||
        static_cast<int>(it->second.size()) != dimension) {
      return absl::InvalidArgumentError(
          absl::StrCat("no usable mean for category '", label, "'"));
    }
    Embedding v;
    for (double m : it->second) v.values.push_back(m + spec.stddev * rng.Normal());
    WASP_ASSIGN_OR_RETURN(std::string text, codec.Decode(v));
    LabeledSample s{std::move(text), label, std::nullopt};
    if (!task.attributes.empty()) {
      s.attribute = task.attributes[rng.Index(task.attributes.size())];
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wasp
