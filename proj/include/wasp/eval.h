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

#ifndef WASP_EVAL_H_
#define WASP_EVAL_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "wasp/types.h"

namespace wasp {

// Mean and unbiased covariance of a set of embeddings. The covariance is
// stored row-major, d x d.
struct GaussianSummary {
  std::vector<double> mean;
  std::vector<double> covariance;

  size_t dimension() const { return mean.size(); }
  double Covariance(size_t i, size_t j) const {
    return covariance[i * mean.size() + j];
  }
};

// Needs at least 2 vectors of equal dimension.
absl::StatusOr<GaussianSummary> Summarize(std::span<const Embedding> set);

// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}). Negative eigenvalues
// down to -1e-9 are clipped to zero; a failed decomposition is retried once
// with 1e-6 added to both diagonals.
absl::StatusOr<double> FrechetDistance(const GaussianSummary& a,
                                       const GaussianSummary& b);
absl::StatusOr<double> FrechetDistance(std::span<const Embedding> a,
                                       std::span<const Embedding> b);

// Trains on one labeled embedding set and scores another. Stand-in for a
// fine-tuned downstream classifier.
class DownstreamEvaluator {
 public:
  virtual ~DownstreamEvaluator() = default;
  // Accuracy in [0, 1].
  virtual absl::StatusOr<double> Evaluate(const EmbeddedSet& train,
                                          const EmbeddedSet& test) = 0;
};

// Assigns each test vector the label of the closest per-label train centroid;
// equidistant centroids resolve to the lower label id.
class NearestCentroidEvaluator : public DownstreamEvaluator {
 public:
  absl::StatusOr<double> Evaluate(const EmbeddedSet& train,
                                  const EmbeddedSet& test) override;
};

}  // namespace wasp

#endif  // WASP_EVAL_H_
