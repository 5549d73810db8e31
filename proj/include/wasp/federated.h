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

#ifndef WASP_FEDERATED_H_
#define WASP_FEDERATED_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/random.h"
#include "wasp/types.h"
#include "wasp/voting.h"

namespace wasp {

// One data party: a disjoint slice of the private set.
struct Party {
  int id = 0;
  // Positions in the full private set, ascending.
  std::vector<int64_t> sample_ids;
  EmbeddedSet data;

  size_t size() const { return sample_ids.size(); }
};

// Label-skew partition: for every category, shares drawn from
// Dirichlet(alpha, ..., alpha) split that category's samples (in shuffled
// order) across the parties. Redrawn until every party is non-empty, at most
// `max_attempts` times.
absl::StatusOr<std::vector<Party>> PartitionDirichlet(
    const EmbeddedSet& private_set, int parties, double alpha, Rng& rng,
    int max_attempts = 1000);

// Largest party, the user-level sensitivity multiplier.
int MaxPartySize(std::span<const Party> parties);

// Sample ids per party, as JSON: {"parties": [{"id": 0, "sample_ids": [...]},
// ...]}.
absl::Status WritePartitionManifest(const std::string& path,
                                    std::span<const Party> parties);
absl::StatusOr<std::vector<std::vector<int64_t>>> ReadPartitionManifest(
    const std::string& path);

// A party's noised histograms in transit to the aggregator. Nothing outside
// this module can read the contents; only SecureSum sees them, and it returns
// nothing but the element-wise total.
class AggregationEnvelope {
 public:
  AggregationEnvelope(const AggregationEnvelope&) = default;
  AggregationEnvelope(AggregationEnvelope&&) = default;
  AggregationEnvelope& operator=(const AggregationEnvelope&) = default;
  AggregationEnvelope& operator=(AggregationEnvelope&&) = default;

  size_t size() const { return h_.size(); }

 private:
  explicit AggregationEnvelope(VoteHistograms h) : h_(std::move(h)) {}

  VoteHistograms h_;

  friend absl::StatusOr<AggregationEnvelope> LocalVote(
      const Party& party, const EmbeddedSet& synthetic,
      const VoteOptions& options, double sigma_local, Rng& rng);
  friend absl::StatusOr<VoteHistograms> SecureSum(
      std::span<const AggregationEnvelope> envelopes);
};

// Top-Q voting over the party's samples followed by N(0, sigma_local^2) noise.
absl::StatusOr<AggregationEnvelope> LocalVote(const Party& party,
                                              const EmbeddedSet& synthetic,
                                              const VoteOptions& options,
                                              double sigma_local, Rng& rng);

// Element-wise sum of both histograms over all envelopes; flagged noised.
absl::StatusOr<VoteHistograms> SecureSum(
    std::span<const AggregationEnvelope> envelopes);

// One federated round: every party votes concurrently on its own stream
// DeriveSeed(round_seed, "party", id), then the envelopes are summed.
absl::StatusOr<VoteHistograms> FederatedVote(std::span<const Party> parties,
                                             const EmbeddedSet& synthetic,
                                             const VoteOptions& options,
                                             double sigma_local,
                                             uint64_t round_seed);

}  // namespace wasp

#endif  // WASP_FEDERATED_H_
