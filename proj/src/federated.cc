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

#include "wasp/federated.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

using json = nlohmann::json;

// Splits `members` into `parties` consecutive runs with Dirichlet shares.
void SplitCategory(std::vector<int64_t> members, int parties, double alpha,
                   Rng& rng, std::vector<std::vector<int64_t>>& out) {
  for (size_t i = members.size(); i > 1; --i) {
    std::swap(members[i - 1], members[rng.Index(i)]);
  }
  std::vector<double> share(parties);
  double total = 0;
  for (double& g : share) {
    g = rng.Gamma(alpha);
    total += g;
  }
  const double n = static_cast<double>(members.size());
  double cumulative = 0;
  size_t begin = 0;
  for (int l = 0; l < parties; ++l) {
    cumulative += total > 0 ? share[l] / total : 1.0 / parties;
    const size_t end =
        l + 1 == parties
            ? members.size()
            : std::min(members.size(),
                       static_cast<size_t>(std::llround(cumulative * n)));
    for (size_t i = begin; i < std::max(begin, end); ++i) {
      out[l].push_back(members[i]);
    }
    begin = std::max(begin, end);
  }
}

}  // namespace

absl::StatusOr<std::vector<Party>> PartitionDirichlet(
    const EmbeddedSet& private_set, int parties, double alpha, Rng& rng,
    int max_attempts) {
  if (parties < 1) return absl::InvalidArgumentError("need at least 1 party");
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError("Dirichlet alpha must be > 0");
  }
  const size_t m = private_set.size();
  if (m < static_cast<size_t>(parties)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot split ", m, " private samples across ", parties, " parties"));
  }
  if (private_set.labels.size() != m) {
    return absl::InvalidArgumentError("labels and vectors differ in length");
  }
  int max_label = -1;
  for (int l : private_set.labels) max_label = std::max(max_label, l);
  std::vector<std::vector<int64_t>> by_label(max_label + 1);
  for (size_t i = 0; i < m; ++i) {
    if (private_set.labels[i] < 0) {
      return absl::InvalidArgumentError("negative private label");
    }
    by_label[private_set.labels[i]].push_back(static_cast<int64_t>(i));
  }

  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    std::vector<std::vector<int64_t>> ids(parties);
    for (const auto& members : by_label) {
      if (!members.empty()) SplitCategory(members, parties, alpha, rng, ids);
    }
    if (std::any_of(ids.begin(), ids.end(),
                    [](const auto& v) { return v.empty(); })) {
      continue;
    }
    std::vector<Party> out(parties);
    for (int l = 0; l < parties; ++l) {
      std::sort(ids[l].begin(), ids[l].end());
      out[l].id = l;
      out[l].sample_ids = std::move(ids[l]);
      for (int64_t i : out[l].sample_ids) {
        out[l].data.vectors.push_back(private_set.vectors[i]);
        out[l].data.labels.push_back(private_set.labels[i]);
      }
    }
    return out;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "no partition of ", m, " samples into ", parties,
      " non-empty parties after ", max_attempts,
      " attempts; use more private samples or a larger alpha"));
}

int MaxPartySize(std::span<const Party> parties) {
  size_t max_size = 0;
  for (const auto& p : parties) max_size = std::max(max_size, p.size());
  return static_cast<int>(max_size);
}

absl::Status WritePartitionManifest(const std::string& path,
                                    std::span<const Party> parties) {
  json j;
  j["format"] = "wasp-partition";
  j["version"] = 1;
  j["parties"] = json::array();
  for (const auto& p : parties) {
    j["parties"].push_back({{"id", p.id}, {"sample_ids", p.sample_ids}});
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::InvalidArgumentError(absl::StrCat("cannot write ", path));
  }
  out << j.dump(1) << "\n";
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::vector<int64_t>>> ReadPartitionManifest(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  try {
    const json j = json::parse(in);
    if (j.at("format") != "wasp-partition") {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": not a partition manifest"));
    }
    std::vector<std::vector<int64_t>> out;
    for (const auto& p : j.at("parties")) {
      out.push_back(p.at("sample_ids").get<std::vector<int64_t>>());
    }
    return out;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
}

absl::StatusOr<AggregationEnvelope> LocalVote(const Party& party,
                                              const EmbeddedSet& synthetic,
                                              const VoteOptions& options,
                                              double sigma_local, Rng& rng) {
  if (party.data.size() == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("party ", party.id, " holds no samples"));
  }
  WASP_ASSIGN_OR_RETURN(VoteHistograms h,
                        TopQVote(party.data, synthetic, options));
  WASP_ASSIGN_OR_RETURN(h, AddGaussianNoise(std::move(h), sigma_local, rng));
  return AggregationEnvelope(std::move(h));
}

absl::StatusOr<VoteHistograms> SecureSum(
    std::span<const AggregationEnvelope> envelopes) {
  if (envelopes.empty()) {
    return absl::InvalidArgumentError("nothing to aggregate");
  }
  VoteHistograms total;
  total.nearest.assign(envelopes[0].h_.size(), 0.0);
  total.furthest.assign(envelopes[0].h_.size(), 0.0);
  for (size_t e = 0; e < envelopes.size(); ++e) {
    const VoteHistograms& h = envelopes[e].h_;
    if (h.size() != total.size() || h.furthest.size() != total.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("envelope ", e, " has length ", h.size(), ", expected ",
                       total.size()));
    }
    if (!h.noised) {
      return absl::FailedPreconditionError(
          absl::StrCat("envelope ", e, " was not noised"));
    }
    for (size_t i = 0; i < total.size(); ++i) {
      total.nearest[i] += h.nearest[i];
      total.furthest[i] += h.furthest[i];
    }
  }
  total.noised = true;
  return total;
}

absl::StatusOr<VoteHistograms> FederatedVote(std::span<const Party> parties,
                                             const EmbeddedSet& synthetic,
                                             const VoteOptions& options,
                                             double sigma_local,
                                             uint64_t round_seed) {
  VoteOptions local = options;
  local.threads = 1;
  std::vector<std::future<absl::StatusOr<AggregationEnvelope>>> pending;
  const size_t width = static_cast<size_t>(std::max(1, options.threads));
  std::vector<absl::StatusOr<AggregationEnvelope>> results;
  results.reserve(parties.size());
  for (size_t start = 0; start < parties.size(); start += width) {
    const size_t stop = std::min(parties.size(), start + width);
    pending.clear();
    for (size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(
          width == 1 ? std::launch::deferred : std::launch::async,
          [&, i]() {
            Rng rng(DeriveSeed(round_seed, "party", parties[i].id));
            return LocalVote(parties[i], synthetic, local, sigma_local, rng);
          }));
    }
    for (auto& f : pending) results.push_back(f.get());
  }
  std::vector<AggregationEnvelope> envelopes;
  envelopes.reserve(results.size());
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    envelopes.push_back(std::move(*r));
  }
  return SecureSum(envelopes);
}

}  // namespace wasp
