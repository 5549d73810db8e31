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

#include "wasp/weighting.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace wasp {

absl::StatusOr<std::vector<double>> ScoreGenerators(
    std::span<const double> nearest, std::span<const int> owner,
    int num_generators) {
  if (num_generators < 1) {
    return absl::InvalidArgumentError("need at least one generator");
  }
  if (owner.size() != nearest.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram has ", nearest.size(), " entries but ownership covers ",
        owner.size()));
  }
  if (nearest.empty()) {
    return absl::InvalidArgumentError("empty histogram");
  }
  double total = 0;
  for (double x : nearest) total += x;
  if (total == 0 || !std::isfinite(total)) {
    return absl::OutOfRangeError(
        "nearest histogram sums to zero; weights are undefined");
  }
  std::vector<double> score_sum(num_generators, 0.0);
  std::vector<int64_t> owned(num_generators, 0);
  for (size_t i = 0; i < nearest.size(); ++i) {
    const int k = owner[i];
    if (k < 0 || k >= num_generators) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, " is owned by unknown generator ", k));
    }
    score_sum[k] += nearest[i] / total;
    ++owned[k];
  }
  const double dataset_size = static_cast<double>(nearest.size());
  std::vector<double> w(num_generators, 0.0);
  for (int k = 0; k < num_generators; ++k) {
    if (owned[k] > 0) {
      w[k] = score_sum[k] / (static_cast<double>(owned[k]) / dataset_size);
    }
  }
  return w;
}

double OwnershipWeightedSum(std::span<const double> weights,
                            std::span<const int64_t> owned_counts) {
  const double total = static_cast<double>(
      std::accumulate(owned_counts.begin(), owned_counts.end(), int64_t{0}));
  double sum = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    sum += weights[k] * static_cast<double>(owned_counts[k]) / total;
  }
  return sum;
}

int64_t PerIterationTotal(int64_t n, int t) { return (2 * n + t) / (2 * t); }

absl::StatusOr<Allocation> NormalizeAndAllocate(std::span<const double> raw,
                                                int64_t n, int t,
                                                double floor) {
  const int k = static_cast<int>(raw.size());
  if (k < 1) return absl::InvalidArgumentError("need at least one weight");
  if (t < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (n < static_cast<int64_t>(k) * t) {
    return absl::InvalidArgumentError(absl::StrCat(
        "N/T = ", static_cast<double>(n) / t, " is below the generator count ",
        k, "; not every generator can receive a sample"));
  }
  if (!(floor >= 0) || floor * k > 1.0 + 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("weight floor ", floor, " is infeasible for ", k,
                     " generators"));
  }

  Allocation out;
  std::vector<double>& w = out.weights;
  w.resize(k);
  double positive = 0;
  for (int i = 0; i < k; ++i) {
    if (!std::isfinite(raw[i])) {
      return absl::InvalidArgumentError("non-finite raw weight");
    }
    w[i] = std::max(raw[i], 0.0);
    positive += w[i];
  }
  if (positive == 0) {
    std::fill(w.begin(), w.end(), 1.0 / k);
  } else {
    for (double& x : w) x /= positive;
  }

  // Water-fill the floor: clamped generators sit exactly at `floor`, the rest
  // share the remaining mass in proportion to their weights.
  std::vector<bool> clamped(k, false);
  for (bool changed = true; changed;) {
    changed = false;
    int num_clamped = 0;
    double free_mass = 0;
    for (int i = 0; i < k; ++i) {
      if (clamped[i]) {
        ++num_clamped;
      } else {
        free_mass += w[i];
      }
    }
    const double target = 1.0 - num_clamped * floor;
    for (int i = 0; i < k; ++i) {
      if (clamped[i]) {
        w[i] = floor;
      } else if (free_mass > 0) {
        w[i] = w[i] / free_mass * target;
      } else {
        w[i] = target / (k - num_clamped);
      }
    }
    for (int i = 0; i < k; ++i) {
      if (!clamped[i] && w[i] < floor) {
        clamped[i] = true;
        changed = true;
      }
    }
  }

  const double per_iteration = static_cast<double>(n) / t;
  const int64_t target = PerIterationTotal(n, t);
  out.counts.resize(k);
  int64_t assigned = 0;
  for (int i = 0; i < k; ++i) {
    out.counts[i] = static_cast<int64_t>(std::floor(per_iteration * w[i] + 0.5));
    assigned += out.counts[i];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w[a] > w[b]; });
  for (size_t r = 0; assigned < target; r = (r + 1) % k) {
    ++out.counts[order[r]];
    ++assigned;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w[a] < w[b]; });
  for (size_t r = 0; assigned > target; r = (r + 1) % k) {
    if (out.counts[order[r]] > 0) {
      --out.counts[order[r]];
      --assigned;
    }
  }
  return out;
}

absl::StatusOr<Allocation> UniformAllocation(int num_generators, int64_t n,
                                             int t) {
  if (num_generators < 1) {
    return absl::InvalidArgumentError("need at least one generator");
  }
  std::vector<double> equal(num_generators, 1.0);
  return NormalizeAndAllocate(equal, n, t, 0.0);
}

}  // namespace wasp
