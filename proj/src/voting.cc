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

#include "wasp/voting.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"

namespace wasp {
namespace {

double SquaredDistance(const Embedding& a, const Embedding& b) {
  double sum = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return sum;
}

std::string LabelName(int label, const TaskDescriptor* task) {
  if (task != nullptr && label >= 0 &&
      label < static_cast<int>(task->categories.size())) {
    return absl::StrCat("'", task->categories[label], "'");
  }
  return absl::StrCat("#", label);
}

struct Candidate {
  double distance;
  size_t index;
};

// Votes of private samples [begin, end) into `h`.
void VoteRange(const EmbeddedSet& private_set, const EmbeddedSet& synthetic,
               const std::vector<std::vector<size_t>>& pools, int q,
               size_t begin, size_t end, VoteHistograms& h) {
  std::vector<Candidate> scratch;
  for (size_t j = begin; j < end; ++j) {
    const auto& pool = pools[private_set.labels[j]];
    scratch.clear();
    for (size_t i : pool) {
      scratch.push_back(
          {std::sqrt(SquaredDistance(private_set.vectors[j],
                                     synthetic.vectors[i])),
           i});
    }
    const size_t votes = std::min(pool.size(), static_cast<size_t>(q));
    auto by_nearest = [](const Candidate& a, const Candidate& b) {
      return a.distance < b.distance ||
             (a.distance == b.distance && a.index < b.index);
    };
    std::partial_sort(scratch.begin(), scratch.begin() + votes, scratch.end(),
                      by_nearest);
    for (size_t r = 0; r < votes; ++r) {
      h.nearest[scratch[r].index] += std::ldexp(1.0, -static_cast<int>(r));
    }
    auto by_furthest = [](const Candidate& a, const Candidate& b) {
      return a.distance > b.distance ||
             (a.distance == b.distance && a.index < b.index);
    };
    std::partial_sort(scratch.begin(), scratch.begin() + votes, scratch.end(),
                      by_furthest);
    for (size_t r = 0; r < votes; ++r) {
      h.furthest[scratch[r].index] += std::ldexp(1.0, -static_cast<int>(r));
    }
  }
}

std::vector<SyntheticSample> TopByVotes(std::span<const SyntheticSample> dataset,
                                        const std::vector<size_t>& members,
                                        const std::vector<double>& votes,
                                        int s) {
  std::vector<size_t> order = members;
  const size_t take = std::min(order.size(), static_cast<size_t>(s));
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](size_t a, size_t b) {
                      return votes[a] > votes[b] ||
                             (votes[a] == votes[b] &&
                              dataset[a].global_index <
                                  dataset[b].global_index);
                    });
  std::vector<SyntheticSample> out;
  out.reserve(take);
  for (size_t r = 0; r < take; ++r) out.push_back(dataset[order[r]]);
  return out;
}

std::vector<int64_t> IndicesOf(const std::vector<SyntheticSample>& v) {
  std::vector<int64_t> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.global_index);
  return out;
}

}  // namespace

absl::StatusOr<double> PairwiseDistance(const Embedding& a,
                                        const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: ", a.dimension(), " vs ", b.dimension()));
  }
  return std::sqrt(SquaredDistance(a, b));
}

absl::StatusOr<VoteHistograms> TopQVote(const EmbeddedSet& private_set,
                                        const EmbeddedSet& synthetic,
                                        const VoteOptions& options) {
  if (options.q < 1) return absl::InvalidArgumentError("Q must be >= 1");
  if (private_set.labels.size() != private_set.vectors.size() ||
      synthetic.labels.size() != synthetic.vectors.size()) {
    return absl::InvalidArgumentError("labels and vectors differ in length");
  }
  int max_label = -1;
  for (int l : synthetic.labels) max_label = std::max(max_label, l);
  for (int l : private_set.labels) max_label = std::max(max_label, l);
  std::vector<std::vector<size_t>> pools(max_label + 1);
  for (size_t i = 0; i < synthetic.size(); ++i) {
    if (synthetic.labels[i] < 0) {
      return absl::InvalidArgumentError("negative synthetic label");
    }
    pools[synthetic.labels[i]].push_back(i);
  }
  const size_t dim =
      synthetic.size() > 0 ? synthetic.vectors[0].dimension() : 0;
  for (const auto& v : synthetic.vectors) {
    if (v.dimension() != dim) {
      return absl::InvalidArgumentError("synthetic embeddings differ in length");
    }
  }
  for (size_t j = 0; j < private_set.size(); ++j) {
    const int l = private_set.labels[j];
    if (l < 0) return absl::InvalidArgumentError("negative private label");
    if (pools[l].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("no synthetic samples carry label ",
                       LabelName(l, options.task), " needed by private sample ",
                       j));
    }
    if (private_set.vectors[j].dimension() != dim) {
      return absl::InvalidArgumentError(absl::StrCat(
          "private embedding ", j, " has dimension ",
          private_set.vectors[j].dimension(), ", synthetic ", dim));
    }
  }

  VoteHistograms h;
  h.nearest.assign(synthetic.size(), 0.0);
  h.furthest.assign(synthetic.size(), 0.0);
  const size_t m = private_set.size();
  const size_t threads =
      std::clamp<size_t>(static_cast<size_t>(std::max(1, options.threads)), 1,
                         std::max<size_t>(1, m));
  if (threads == 1) {
    VoteRange(private_set, synthetic, pools, options.q, 0, m, h);
    return h;
  }
  std::vector<VoteHistograms> partial(threads, h);
  std::vector<std::thread> workers;
  for (size_t t = 0; t < threads; ++t) {
    const size_t begin = m * t / threads;
    const size_t end = m * (t + 1) / threads;
    workers.emplace_back([&, t, begin, end] {
      VoteRange(private_set, synthetic, pools, options.q, begin, end,
                partial[t]);
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& p : partial) {
    for (size_t i = 0; i < h.size(); ++i) {
      h.nearest[i] += p.nearest[i];
      h.furthest[i] += p.furthest[i];
    }
  }
  return h;
}

absl::StatusOr<VoteHistograms> AddGaussianNoise(VoteHistograms h, double sigma,
                                                Rng& rng) {
  if (h.noised) {
    return absl::FailedPreconditionError(
        "histograms are already noised; a second release is not budgeted");
  }
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be finite and >= 0");
  }
  if (sigma > 0) {
    for (double& x : h.nearest) x += sigma * rng.Normal();
    for (double& x : h.furthest) x += sigma * rng.Normal();
  }
  h.noised = true;
  return h;
}

std::vector<int64_t> ContrastiveSelection::NearIndices(int category) const {
  return IndicesOf(near.at(category));
}

std::vector<int64_t> ContrastiveSelection::FarIndices(int category) const {
  return IndicesOf(far.at(category));
}

absl::StatusOr<ContrastiveSelection> SelectContrastive(
    std::span<const SyntheticSample> dataset, std::span<const int> labels,
    const VoteHistograms& h, int s, const TaskDescriptor& task) {
  if (h.nearest.size() != dataset.size() ||
      h.furthest.size() != dataset.size() || labels.size() != dataset.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram length ", h.nearest.size(),
                     " does not match dataset size ", dataset.size()));
  }
  if (s < 1) return absl::InvalidArgumentError("S must be >= 1");
  const int categories = static_cast<int>(task.categories.size());
  std::vector<std::vector<size_t>> members(categories);
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= categories) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, " has label id ", labels[i],
                       " outside the task"));
    }
    members[labels[i]].push_back(i);
  }
  ContrastiveSelection out;
  out.s = s;
  for (int c = 0; c < categories; ++c) {
    if (members[c].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("category '", task.categories[c],
                       "' has no synthetic samples to select from"));
    }
    out.near.push_back(TopByVotes(dataset, members[c], h.nearest, s));
    out.far.push_back(TopByVotes(dataset, members[c], h.furthest, s));
  }
  return out;
}

}  // namespace wasp
