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

#ifndef WASP_TYPES_H_
#define WASP_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace wasp {

// One text record: a private sample or the payload of a synthetic one.
struct LabeledSample {
  std::string text;
  // Canonical category string from the task descriptor.
  std::string label;
  // Task sub-field interpolated into prompts (star rating, research area).
  std::optional<std::string> attribute;

  bool operator==(const LabeledSample&) const = default;
};

struct SyntheticSample {
  LabeledSample sample;
  // Position in the accumulated dataset; contiguous from 0 within a run.
  int64_t global_index = 0;
  std::string source_generator;
  int born_iteration = 0;

  bool operator==(const SyntheticSample&) const = default;
};

// Output of the embedder. Components are finite.
struct Embedding {
  std::vector<double> values;

  size_t dimension() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// Embeddings paired with integer category ids; the form consumed by voting,
// federation and evaluation.
struct EmbeddedSet {
  std::vector<Embedding> vectors;
  std::vector<int> labels;

  size_t size() const { return vectors.size(); }
};

// Nearest / furthest vote tallies aligned 1:1 with the accumulated dataset.
struct VoteHistograms {
  std::vector<double> nearest;
  std::vector<double> furthest;
  bool noised = false;

  size_t size() const { return nearest.size(); }
};

struct TaskDescriptor {
  std::string name;
  std::vector<std::string> categories;
  std::vector<std::string> attributes;

  // Index of `label` in `categories`, or InvalidArgument.
  absl::StatusOr<int> CategoryId(std::string_view label) const;
  absl::Status Validate() const;
};

// Label non-empty in the category set and text non-blank.
absl::Status ValidateSample(const LabeledSample& sample,
                            const TaskDescriptor& task);

// Maps sample labels to category ids.
absl::StatusOr<std::vector<int>> LabelIds(std::span<const LabeledSample> samples,
                                          const TaskDescriptor& task);

// Append-only synthetic dataset D. Values are snapshots: copying is cheap
// enough at desk scale and readers never observe a partially applied batch.
class SyntheticDataset {
 public:
  SyntheticDataset() = default;
  explicit SyntheticDataset(std::vector<std::string> generator_ids);

  // Appends a batch whose global indices continue the contiguous range and
  // whose generators are registered. On error the dataset is unchanged.
  absl::Status Append(std::span<const SyntheticSample> batch);

  const std::vector<SyntheticSample>& samples() const { return samples_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const SyntheticSample& operator[](size_t i) const { return samples_[i]; }

  const std::set<std::string>& generators() const { return generators_; }
  // |D_k| for generator `id`.
  int64_t CountFrom(std::string_view id) const;

 private:
  std::set<std::string> generators_;
  std::vector<SyntheticSample> samples_;
};

// Trims ASCII whitespace from both ends.
std::string_view TrimWhitespace(std::string_view s);

}  // namespace wasp

#endif  // WASP_TYPES_H_
