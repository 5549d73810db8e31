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

#ifndef WASP_WEIGHTING_H_
#define WASP_WEIGHTING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace wasp {

// Generator importance weights from the noised nearest histogram:
//   s_i = H[i] / sum(H),  w_k = (sum_{i in D_k} s_i) / (|D_k| / |D|).
// `owner[i]` is the generator index of sample i, in [0, num_generators).
// A generator that owns nothing gets raw weight 0. When sum(H) == 0 the
// result is OutOfRange, which callers treat as "fall back to uniform".
absl::StatusOr<std::vector<double>> ScoreGenerators(
    std::span<const double> nearest, std::span<const int> owner,
    int num_generators);

// Sum_k w_k * |D_k| / |D|; equals 1 for weights from ScoreGenerators.
double OwnershipWeightedSum(std::span<const double> weights,
                            std::span<const int64_t> owned_counts);

struct Allocation {
  // Normalized weights: sum to 1, each >= floor.
  std::vector<double> weights;
  // Per-generator sample counts N_k; sum to RoundHalfUp(N / T).
  std::vector<int64_t> counts;
};

// Per-iteration generation total round(N / T), halves rounded up.
int64_t PerIterationTotal(int64_t n, int t);

inline double DefaultWeightFloor(int num_generators) {
  return 0.01 / num_generators;
}

// Clamps raw weights at zero, normalizes them onto the simplex, raises any
// weight below `floor` to it while rescaling the rest, then sets
// N_k = round((N/T) * w_k) and hands out the rounding remainder one sample at
// a time: missing samples go to generators in descending weight order, excess
// samples are taken back in ascending weight order (ties by index).
// All-nonpositive raw weights yield the uniform split.
absl::StatusOr<Allocation> NormalizeAndAllocate(std::span<const double> raw,
                                                int64_t n, int t, double floor);

// Allocation with weights pinned at 1/K.
absl::StatusOr<Allocation> UniformAllocation(int num_generators, int64_t n,
                                             int t);

}  // namespace wasp

#endif  // WASP_WEIGHTING_H_
