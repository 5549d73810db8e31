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

#ifndef WASP_VOTING_H_
#define WASP_VOTING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/random.h"
#include "wasp/types.h"

namespace wasp {

// ||a - b||_2. Errors on dimension mismatch.
absl::StatusOr<double> PairwiseDistance(const Embedding& a, const Embedding& b);

struct VoteOptions {
  // Votes per private sample; weights 1, 1/2, ..., 2^-(q-1).
  int q = 1;
  // Worker threads over private samples. Vote weights are dyadic, so partial
  // sums are exact and the result does not depend on the split.
  int threads = 1;
  // Names for error messages; optional.
  const TaskDescriptor* task = nullptr;
};

// Pre-noise Top-Q voting. Each private sample votes for the q nearest and the
// q furthest synthetic samples carrying its label, distance ties broken by the
// smaller index. Pools smaller than q receive one vote per member. The result
// is aligned with `synthetic` (index i = global index i).
absl::StatusOr<VoteHistograms> TopQVote(const EmbeddedSet& private_set,
                                        const EmbeddedSet& synthetic,
                                        const VoteOptions& options);

// Adds N(0, sigma^2) to every entry of both histograms, nearest entries first
// in index order, then furthest. sigma = 0 leaves values unchanged but still
// marks them noised. Noising twice is refused.
absl::StatusOr<VoteHistograms> AddGaussianNoise(VoteHistograms h, double sigma,
                                                Rng& rng);

// In-context candidates per category: the S highest-voted samples of each
// label in the nearest (good) and furthest (bad) histograms.
struct ContrastiveSelection {
  int s = 0;
  std::vector<std::vector<SyntheticSample>> near;
  std::vector<std::vector<SyntheticSample>> far;

  std::vector<int64_t> NearIndices(int category) const;
  std::vector<int64_t> FarIndices(int category) const;
};

// Per category c: near = the S samples labeled c with the largest nearest
// votes, far = likewise for furthest votes; vote ties go to the smaller
// global index. Categories smaller than S are returned whole.
absl::StatusOr<ContrastiveSelection> SelectContrastive(
    std::span<const SyntheticSample> dataset, std::span<const int> labels,
    const VoteHistograms& h, int s, const TaskDescriptor& task);

}  // namespace wasp

#endif  // WASP_VOTING_H_
