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

#ifndef WASP_PROMPT_H_
#define WASP_PROMPT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/random.h"
#include "wasp/types.h"
#include "wasp/voting.h"

namespace wasp {

enum class PromptStyle { kZeroShot, kContrastive, kNonContrastive };

std::string_view PromptStyleName(PromptStyle style);

// Generation prompt text for one task. Slots are written {label},
// {attribute} and {sample}. A few-shot prompt is the concatenation of one
// example line per in-context sample followed by the instruction:
//   contrastive:     bad_example x floor(S/2), good_example x rest,
//                    contrastive_instruction
//   non-contrastive: plain_example x S, non_contrastive_instruction
struct PromptTemplate {
  std::string task;
  std::string zero_shot;
  std::string bad_example;
  std::string good_example;
  std::string plain_example;
  std::string contrastive_instruction;
  std::string non_contrastive_instruction;

  // Every example carries {sample}; every instruction and the zero-shot
  // prompt carry {label}; no unknown slots.
  absl::Status Validate() const;
  bool UsesAttribute() const;
};

// Templates and task descriptors for imdb, yelp_category, yelp_rating,
// openreview_category, openreview_rating and banking.
absl::StatusOr<PromptTemplate> BuiltinTemplate(std::string_view task);
absl::StatusOr<TaskDescriptor> BuiltinTask(std::string_view task);
std::vector<std::string> BuiltinTaskNames();

// Reads a YAML template file with the PromptTemplate field names as keys.
absl::StatusOr<PromptTemplate> LoadTemplate(const std::string& path);
absl::StatusOr<PromptTemplate> ParseTemplate(const std::string& yaml_text);

// Digest of the template text a style uses; equal digests mean the same
// template drove generation.
uint64_t TemplateHash(const PromptTemplate& tmpl, PromptStyle style);

struct Prompt {
  std::string text;
  std::string label;
  std::optional<std::string> attribute;
  PromptStyle style = PromptStyle::kZeroShot;
  // In-context texts as placed in the prompt. Simulation generators read
  // these directly instead of parsing `text`.
  std::vector<std::string> good;
  std::vector<std::string> bad;
};

struct PromptRequest {
  std::string label;
  int category = 0;
  std::optional<std::string> attribute;
};

// Zero-shot when `selection` is null. Contrastive prompts draw floor(S/2) bad
// samples from the far list and S - floor(S/2) good samples from the near list
// of the requested category, uniformly without replacement (a shorter list is
// used whole); bad examples come first. Non-contrastive prompts draw up to S
// samples from the near list only.
absl::StatusOr<Prompt> BuildPrompt(const PromptTemplate& tmpl, PromptStyle style,
                                   const PromptRequest& request,
                                   const ContrastiveSelection* selection,
                                   Rng& rng);

}  // namespace wasp

#endif  // WASP_PROMPT_H_
