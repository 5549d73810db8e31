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

#ifndef WASP_ORCHESTRATOR_H_
#define WASP_ORCHESTRATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/embedding.h"
#include "wasp/federated.h"
#include "wasp/generation.h"
#include "wasp/privacy.h"
#include "wasp/prompt.h"
#include "wasp/run_config.h"
#include "wasp/types.h"

namespace wasp {

struct GeneratorRecord {
  std::string id;
  // Importance weight from the previous round's votes (1 at iteration 0 and on
  // fallback).
  double raw_weight = 1.0;
  // Normalized weight and allocation used in this iteration.
  double weight = 0;
  int64_t allocation = 0;
  // |D_k| after this iteration's samples were added.
  int64_t owned = 0;

  bool operator==(const GeneratorRecord&) const = default;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<GeneratorRecord> generators;
  // |D| after this iteration.
  int64_t dataset_size = 0;
  // Fréchet distance between D and the private set, in embedding space.
  double frechet = 0;
  // Whether histograms were released this iteration (all but the last).
  bool voted = false;
  // Per-party noise scale of the release; 0 when not voted.
  double sigma = 0;
  // Raw weights for the next iteration were undefined (zero vote mass) and
  // uniform weights were used instead.
  bool weight_fallback = false;
  // Global indices selected as good / bad in-context candidates, per category,
  // for use by the next iteration. Empty when not voted.
  std::vector<std::vector<int64_t>> near_ids;
  std::vector<std::vector<int64_t>> far_ids;
  // Seed every random stream of this iteration derives from.
  uint64_t rng_checkpoint = 0;
  PromptStyle prompt_style = PromptStyle::kZeroShot;
  uint64_t template_hash = 0;
  // Hash over all prompt digests of this iteration, in generator order.
  uint64_t prompt_digest = 0;
  // 1, or 2 when the iteration was retried.
  int attempts = 1;

  bool operator==(const IterationRecord&) const = default;
};

struct RunInputs {
  const std::vector<LabeledSample>* private_data = nullptr;
  Embedder* embedder = nullptr;
  // One per RunConfig generator entry, same order.
  std::vector<Generator*> generators;
  const PromptTemplate* tmpl = nullptr;
};

struct RunOptions {
  // Called after each completed iteration; lets callers flush the trace so a
  // failed run leaves its completed iterations behind.
  std::function<void(const IterationRecord&)> on_iteration;
  // Keep every released (noised, aggregated) histogram pair in the result.
  bool keep_histograms = false;
};

struct RunResult {
  std::vector<SyntheticSample> dataset;
  std::vector<IterationRecord> trace;
  // Released histograms per voted iteration when requested.
  std::vector<VoteHistograms> histograms;
  CompositionReport privacy;
  // Data parties when running federated (L > 1).
  std::vector<Party> parties;
};

// Runs the full loop. On error `result` holds everything completed so far.
absl::Status RunWasp(const RunConfig& config, const RunInputs& inputs,
                     const RunOptions& options, RunResult* result);

// Convenience wrapper that builds backends from the config and loads (or
// simulates) the private data.
absl::Status RunWaspFromConfig(const RunConfig& config,
                               const RunOptions& options, RunResult* result);

// Loads the private samples a config refers to.
absl::StatusOr<std::vector<LabeledSample>> LoadPrivateData(
    const RunConfig& config);

enum class AblationMode { kNoContrast, kNoWeighting, kQOverride, kEpsilonSweep };

absl::StatusOr<AblationMode> ParseAblationMode(std::string_view name);

struct AblationSpec {
  AblationMode mode = AblationMode::kNoContrast;
  // kQOverride.
  std::vector<int> q_values;
  // kEpsilonSweep; +infinity selects the noise-free mechanism.
  std::vector<double> epsilons;
};

struct AblationRun {
  std::string label;
  RunConfig config;
  RunResult result;
};

// Derives one config per variant from `config` (same seed) and runs each.
absl::StatusOr<std::vector<AblationRun>> RunAblation(
    const RunConfig& config, const RunInputs& inputs, const AblationSpec& spec);

}  // namespace wasp

#endif  // WASP_ORCHESTRATOR_H_
