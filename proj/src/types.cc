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

#include "wasp/types.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace wasp {

absl::StatusOr<int> TaskDescriptor::CategoryId(std::string_view label) const {
  const auto it = std::find(categories.begin(), categories.end(), label);
  if (it == categories.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label '", std::string(label), "' is not a category of task '", name,
                     "'"));
  }
  return static_cast<int>(it - categories.begin());
}

absl::Status TaskDescriptor::Validate() const {
  if (categories.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("task '", name, "' needs at least 2 categories"));
  }
  std::set<std::string> seen;
  for (const auto& c : categories) {
    if (TrimWhitespace(c).empty()) {
      return absl::InvalidArgumentError("empty category name");
    }
    if (!seen.insert(c).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate category '", c, "'"));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateSample(const LabeledSample& sample,
                            const TaskDescriptor& task) {
  if (TrimWhitespace(sample.text).empty()) {
    return absl::InvalidArgumentError("sample text is empty");
  }
  return task.CategoryId(sample.label).status();
}

absl::StatusOr<std::vector<int>> LabelIds(std::span<const LabeledSample> samples,
                                          const TaskDescriptor& task) {
  std::vector<int> ids;
  ids.reserve(samples.size());
  for (const auto& s : samples) {
    auto id = task.CategoryId(s.label);
    if (!id.ok()) return id.status();
    ids.push_back(*id);
  }
  return ids;
}

SyntheticDataset::SyntheticDataset(std::vector<std::string> generator_ids)
    : generators_(generator_ids.begin(), generator_ids.end()) {}

absl::Status SyntheticDataset::Append(std::span<const SyntheticSample> batch) {
  const int64_t base = static_cast<int64_t>(samples_.size());
  std::vector<bool> seen(batch.size(), false);
  for (const auto& s : batch) {
    if (!generators_.contains(s.source_generator)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sample references unregistered generator '", s.source_generator,
          "'"));
    }
    const int64_t offset = s.global_index - base;
    if (offset < 0 || offset >= static_cast<int64_t>(batch.size())) {
      return absl::InvalidArgumentError(absl::StrCat(
          "global_index ", s.global_index, " outside the expected range [",
          base, ", ", base + static_cast<int64_t>(batch.size()), ")"));
    }
    if (seen[offset]) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate global_index ", s.global_index));
    }
    seen[offset] = true;
  }
  const size_t old_size = samples_.size();
  samples_.resize(old_size + batch.size());
  for (const auto& s : batch) {
    samples_[static_cast<size_t>(s.global_index)] = s;
  }
  return absl::OkStatus();
}

int64_t SyntheticDataset::CountFrom(std::string_view id) const {
  return std::count_if(samples_.begin(), samples_.end(),
                       [&](const SyntheticSample& s) {
                         return s.source_generator == id;
                       });
}

std::string_view TrimWhitespace(std::string_view s) {
  constexpr std::string_view kSpace = " \t\n\r\f\v";
  const size_t begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const size_t end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

}  // namespace wasp
