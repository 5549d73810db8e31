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

#ifndef WASP_DATASET_IO_H_
#define WASP_DATASET_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/types.h"

namespace wasp {

// Line-delimited dataset files. The first line is a header object
//   {"format":"wasp-dataset","version":1,"kind":"synthetic"|"labeled",
//    "task":...,"count":N,"embedding_dim":d?}
// followed by exactly `count` record objects, one per line. Synthetic records
// carry text, label, attribute, source_generator, born_iteration and
// global_index; labeled records carry only the first three.

struct DatasetHeader {
  std::string kind;
  std::string task;
  size_t count = 0;
  std::optional<int> embedding_dim;
};

// Checks applied while reading. Unset fields are not checked.
struct DatasetExpectations {
  const TaskDescriptor* task = nullptr;
  std::optional<int> embedding_dim;
};

absl::Status WriteDataset(const std::string& path,
                          const std::vector<SyntheticSample>& dataset,
                          const std::string& task_name,
                          std::optional<int> embedding_dim = std::nullopt);

absl::StatusOr<std::vector<SyntheticSample>> ReadDataset(
    const std::string& path, const DatasetExpectations& expect = {});

absl::Status WriteLabeledSamples(const std::string& path,
                                 const std::vector<LabeledSample>& samples,
                                 const std::string& task_name);

// Reads a labeled file. Synthetic files are accepted too; their provenance
// fields are dropped.
absl::StatusOr<std::vector<LabeledSample>> ReadLabeledSamples(
    const std::string& path, const DatasetExpectations& expect = {});

absl::StatusOr<DatasetHeader> ReadDatasetHeader(const std::string& path);

}  // namespace wasp

#endif  // WASP_DATASET_IO_H_
