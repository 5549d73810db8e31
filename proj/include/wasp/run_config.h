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

#ifndef WASP_RUN_CONFIG_H_
#define WASP_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/embedding.h"
#include "wasp/generation.h"
#include "wasp/privacy.h"
#include "wasp/prompt.h"
#include "wasp/types.h"

namespace wasp {

struct EmbedderSpec {
  // "simulation" or "http".
  std::string kind = "simulation";
  int dimension = 0;
  uint64_t seed = 0;
  HttpEmbedderOptions http;
};

struct GeneratorSpec {
  // "mock" or "http".
  std::string kind = "mock";
  MockGeneratorOptions mock;
  HttpGeneratorOptions http;

  const std::string& id() const { return kind == "http" ? http.id : mock.id; }
};

// Gaussian private data for simulation runs: `count` samples split evenly
// over the categories, N(mean[label], stddev^2 I).
struct PrivateSimulationSpec {
  int64_t count = 0;
  double stddev = 1.0;
  std::map<std::string, std::vector<double>> means;
  uint64_t seed = 0;
};

struct RunConfig {
  TaskDescriptor task;
  // Empty: the built-in template for task.name.
  std::string template_path;
  // Target total synthetic count N.
  int64_t n = 0;
  int q = 1;
  int s = 2;
  uint64_t seed = 0;
  std::string output_dir;
  // Labeled private dataset file; may be empty when private_simulation is set.
  std::string private_data;
  std::optional<PrivateSimulationSpec> private_simulation;
  int threads = 1;
  // Unset: DefaultWeightFloor(K).
  std::optional<double> weight_floor;
  bool contrastive = true;
  bool weighting = true;
  // iterations (T) and parties (L) live here.
  PrivacyBudget privacy;
  double dirichlet_alpha = 1.0;
  EmbedderSpec embedder;
  std::vector<GeneratorSpec> generators;

  int iterations() const { return privacy.iterations; }
  int num_generators() const { return static_cast<int>(generators.size()); }
  double EffectiveWeightFloor() const;
  std::vector<std::string> GeneratorIds() const;

  absl::Status Validate() const;
};

// Parses a YAML run config. Relative paths inside it are resolved against
// `base_dir` (the directory holding the file for LoadRunConfig).
absl::StatusOr<RunConfig> ParseRunConfig(const std::string& yaml_text,
                                         const std::string& base_dir = "");
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

// Backend construction from a validated config.
absl::StatusOr<std::unique_ptr<Embedder>> MakeEmbedder(const EmbedderSpec& spec);
absl::StatusOr<std::vector<std::unique_ptr<Generator>>> MakeGenerators(
    const RunConfig& config);
absl::StatusOr<PromptTemplate> ResolveTemplate(const RunConfig& config);

// Draws private samples per PrivateSimulationSpec, encoded as simulation
// texts of the configured dimension.
absl::StatusOr<std::vector<LabeledSample>> SimulatePrivateData(
    const PrivateSimulationSpec& spec, const TaskDescriptor& task,
    int dimension);

}  // namespace wasp

#endif  // WASP_RUN_CONFIG_H_
