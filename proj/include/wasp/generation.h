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

#ifndef WASP_GENERATION_H_
#define WASP_GENERATION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "wasp/embedding.h"
#include "wasp/http_client.h"
#include "wasp/prompt.h"
#include "wasp/random.h"
#include "wasp/types.h"
#include "wasp/voting.h"

namespace wasp {

// A black-box text generator P_k. Implementations must be usable from one
// thread at a time per instance; the orchestrator runs distinct generators
// concurrently.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual const std::string& id() const = 0;

  // One sample per prompt, labeled with the prompt's label and attribute.
  virtual absl::StatusOr<std::vector<LabeledSample>> GenerateBatch(
      std::span<const Prompt> prompts, Rng& rng) = 0;
};

struct MockGeneratorOptions {
  std::string id;
  int dimension = 0;
  // Base mean per label; every label the generator is asked for must exist.
  std::map<std::string, std::vector<double>> label_means;
  // Added to every label mean (a systematic quality offset). Empty = zero.
  std::vector<double> offset;
  // Isotropic standard deviation of outputs around the mean.
  double stddev = 1.0;
  // r: how far outputs move toward the good-example centroid.
  double responsiveness = 0.0;
  // beta: relative push away from the bad-example centroid.
  double contrast = 0.5;

  absl::Status Validate() const;
};

// Simulation generator. For a prompt with good examples g_1..g_a and bad
// examples b_1..b_c (decoded through the simulation embedder) it draws
//   x ~ N(mu + r (mean(g) - mu) - r beta (mean(b) - mu), stddev^2 I)
// where mu is the label mean plus offset; terms with no examples are dropped.
// The output text is the simulation encoding of x.
class MockGenerator : public Generator {
 public:
  explicit MockGenerator(MockGeneratorOptions options);

  const std::string& id() const override { return options_.id; }
  absl::StatusOr<std::vector<LabeledSample>> GenerateBatch(
      std::span<const Prompt> prompts, Rng& rng) override;

  // Mean the generator samples around for `prompt`.
  absl::StatusOr<std::vector<double>> ConditionalMean(
      const Prompt& prompt) const;

  const MockGeneratorOptions& options() const { return options_; }

 private:
  MockGeneratorOptions options_;
  SimulationEmbedder codec_;
};

struct HttpGeneratorOptions {
  std::string id;
  // OpenAI-compatible endpoint, either .../chat/completions or .../completions.
  std::string endpoint;
  std::string model;
  // "chat" sends messages, "completions" sends a bare prompt.
  std::string api = "chat";
  double temperature = 1.0;
  int max_tokens = 256;
  std::string api_key_env;
  // Attempts per item, counting transport failures and empty completions.
  int item_retries = 3;
  // Requests in flight per batch.
  int concurrency = 4;
  HttpOptions http;
};

class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(HttpGeneratorOptions options);

  const std::string& id() const override { return options_.id; }
  absl::StatusOr<std::vector<LabeledSample>> GenerateBatch(
      std::span<const Prompt> prompts, Rng& rng) override;

 private:
  absl::StatusOr<std::string> Complete(const std::string& prompt) const;

  HttpGeneratorOptions options_;
};

// Strips surrounding whitespace and one layer of matching quotes.
std::string CleanCompletion(std::string_view text);

struct GenerationRequest {
  const PromptTemplate* tmpl = nullptr;
  const TaskDescriptor* task = nullptr;
  // Null at iteration 0 (zero-shot prompts).
  const ContrastiveSelection* selection = nullptr;
  PromptStyle style = PromptStyle::kContrastive;
  int64_t n_hat = 0;
  int iteration = 0;
  // Global index of the first returned sample.
  int64_t first_index = 0;
};

struct GenerationOutput {
  std::vector<SyntheticSample> samples;
  // FNV-1a over all prompt texts in order; equal digests mean equal prompts.
  uint64_t prompt_digest = 0;
};

// Generates ceil(n_hat / C) samples per category, one prompt each with an
// attribute drawn uniformly from the task's attribute set, then removes the
// surplus one sample each from distinct randomly chosen categories so that
// exactly n_hat remain and category counts differ by at most one. Returned
// samples are in category order with consecutive global indices.
absl::StatusOr<GenerationOutput> WeightedSynDataGeneration(
    Generator& generator, const GenerationRequest& request, Rng& rng);

}  // namespace wasp

#endif  // WASP_GENERATION_H_
