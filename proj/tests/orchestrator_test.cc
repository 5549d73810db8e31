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

#include "wasp/orchestrator.h"

#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wasp/dataset_io.h"
#include "wasp/weighting.h"

namespace wasp {
namespace {

using ::wasp::testing::Harness;
using ::wasp::testing::SimParams;

// Fails while `failures` is positive, otherwise forwards to the wrapped mock.
class FlakyGenerator : public Generator {
 public:
  explicit FlakyGenerator(Generator* inner) : inner_(inner) {}
  const std::string& id() const override { return inner_->id(); }
  absl::StatusOr<std::vector<LabeledSample>> GenerateBatch(
      std::span<const Prompt> prompts, Rng& rng) override {
    if (failures.fetch_sub(1) > 0) {
      return absl::UnavailableError("generator is down");
    }
    failures.store(0);
    return inner_->GenerateBatch(prompts, rng);
  }
  std::atomic<int> failures{0};

 private:
  Generator* inner_;
};

TEST(RunWaspTest, FirstIterationSplitsEvenly) {
  SimParams p;
  p.n = 6000;
  p.generators = 6;
  p.private_count = 300;
  p.iterations = 5;
  Harness h;
  ASSERT_TRUE(h.Init(p).ok());
  RunResult r;
  ASSERT_TRUE(h.Run(&r).ok());
  ASSERT_EQ(r.trace.size(), 5u);
  for (const auto& g : r.trace[0].generators) {
    EXPECT_EQ(g.allocation, 200);
    EXPECT_DOUBLE_EQ(g.weight, 1.0 / 6);
    EXPECT_DOUBLE_EQ(g.raw_weight, 1.0);
  }
  EXPECT_EQ(r.dataset.size(), 6000u);
}

TEST(RunWaspTest, TraceBookkeeping) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult r;
  std::vector<int> seen;
  RunOptions options;
  options.on_iteration = [&](const IterationRecord& rec) {
    seen.push_back(rec.iteration);
  };
  ASSERT_TRUE(h.Run(&r, options).ok());
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.privacy.releases, 4);

  std::map<std::string, int64_t> owned;
  for (int t = 0; t < 5; ++t) {
    const IterationRecord& rec = r.trace[t];
    EXPECT_EQ(rec.iteration, t);
    EXPECT_EQ(rec.dataset_size, 100 * (t + 1));
    EXPECT_EQ(rec.voted, t < 4);
    EXPECT_EQ(rec.attempts, 1);
    EXPECT_EQ(rec.prompt_style,
              t == 0 ? PromptStyle::kZeroShot : PromptStyle::kContrastive);
    EXPECT_EQ(rec.sigma, rec.voted ? r.privacy.sigma_local : 0.0);
    EXPECT_EQ(rec.near_ids.size(), rec.voted ? 2u : 0u);
    int64_t sum = 0;
    double wsum = 0;
    for (const auto& g : rec.generators) {
      sum += g.allocation;
      wsum += g.weight;
      owned[g.id] += g.allocation;
      EXPECT_EQ(g.owned, owned[g.id]);
      EXPECT_GE(g.weight, h.config.EffectiveWeightFloor() - 1e-12);
    }
    EXPECT_EQ(sum, 100);
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    EXPECT_TRUE(std::isfinite(rec.frechet));
  }
  for (size_t i = 0; i < r.dataset.size(); ++i) {
    EXPECT_EQ(r.dataset[i].global_index, static_cast<int64_t>(i));
  }
  // Selected ids point into the dataset at the time of the vote.
  for (const auto& rec : r.trace) {
    for (const auto& ids : rec.near_ids) {
      for (int64_t id : ids) EXPECT_LT(id, rec.dataset_size);
    }
  }
}

TEST(RunWaspTest, ReplayIsDeterministic) {
  SimParams p;
  p.threads = 3;
  Harness a, b;
  ASSERT_TRUE(a.Init(p).ok());
  p.threads = 1;
  ASSERT_TRUE(b.Init(p).ok());
  RunResult ra, rb;
  ASSERT_TRUE(a.Run(&ra).ok());
  ASSERT_TRUE(b.Run(&rb).ok());
  EXPECT_EQ(ra.trace, rb.trace);
  EXPECT_EQ(ra.dataset, rb.dataset);

  SimParams other;
  other.seed = 8;
  Harness c;
  ASSERT_TRUE(c.Init(other).ok());
  RunResult rc;
  ASSERT_TRUE(c.Run(&rc).ok());
  EXPECT_NE(rc.dataset, ra.dataset);
}

TEST(RunWaspTest, ReloadedDatasetMatchesAllocations) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult r;
  ASSERT_TRUE(h.Run(&r).ok());
  const std::string path = ::testing::TempDir() + "/orchestrator_dataset.jsonl";
  ASSERT_TRUE(WriteDataset(path, r.dataset, "imdb", 8).ok());
  DatasetExpectations expect;
  expect.task = &h.config.task;
  auto back = ReadDataset(path, expect);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, r.dataset);
  std::map<std::string, int64_t> per_generator;
  std::map<std::pair<int, std::string>, int64_t> per_round;
  for (const auto& s : *back) {
    ++per_generator[s.source_generator];
    ++per_round[{s.born_iteration, s.source_generator}];
  }
  for (const auto& rec : r.trace) {
    for (const auto& g : rec.generators) {
      EXPECT_EQ((per_round[{rec.iteration, g.id}]), g.allocation);
    }
  }
  for (const auto& g : r.trace.back().generators) {
    EXPECT_EQ(per_generator[g.id], g.owned);
  }
}

TEST(RunWaspTest, SingleGeneratorSingleVote) {
  SimParams p;
  p.generators = 1;
  p.q = 1;
  Harness h;
  ASSERT_TRUE(h.Init(p).ok());
  RunResult r;
  ASSERT_TRUE(h.Run(&r).ok());
  for (const auto& rec : r.trace) {
    ASSERT_EQ(rec.generators.size(), 1u);
    EXPECT_EQ(rec.generators[0].allocation, 100);
    EXPECT_DOUBLE_EQ(rec.generators[0].weight, 1.0);
  }
}

TEST(RunWaspTest, NoiseFreeRunFavoursMatchedGenerator) {
  SimParams p;
  p.epsilon = "inf";
  Harness h;
  ASSERT_TRUE(h.Init(p).ok());
  RunResult r;
  ASSERT_TRUE(h.Run(&r).ok());
  EXPECT_EQ(r.privacy.sigma_local, 0.0);
  for (size_t t = 1; t < r.trace.size(); ++t) {
    EXPECT_GT(r.trace[t].generators[0].weight, 0.5) << t;
  }
  EXPECT_LT(r.trace.back().frechet, r.trace.front().frechet);
}

TEST(RunWaspTest, FederatedRun) {
  SimParams p;
  p.parties = 4;
  Harness h;
  ASSERT_TRUE(h.Init(p).ok());
  RunResult r;
  ASSERT_TRUE(h.Run(&r).ok());
  ASSERT_EQ(r.parties.size(), 4u);
  size_t total = 0;
  for (const auto& party : r.parties) total += party.size();
  EXPECT_EQ(total, 1000u);
  EXPECT_NEAR(r.privacy.sigma_local * 2.0, r.privacy.sigma_total,
              1e-9 * r.privacy.sigma_total);
  EXPECT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(r.trace[1].sigma, r.privacy.sigma_local);
}

TEST(RunWaspTest, UserLevelRejectsOversizedParty) {
  SimParams p;
  p.parties = 4;
  p.level = "user";
  p.max_party_size = 10;
  Harness h;
  ASSERT_TRUE(h.Init(p).ok());
  RunResult r;
  EXPECT_EQ(h.Run(&r).code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(r.trace.empty());

  p.max_party_size = 1000;
  Harness ok;
  ASSERT_TRUE(ok.Init(p).ok());
  EXPECT_TRUE(ok.Run(&r).ok());
  // Central user-level run: the single party is the whole private set.
  p.parties = 1;
  p.max_party_size = 999;
  Harness central;
  ASSERT_TRUE(central.Init(p).ok());
  EXPECT_EQ(central.Run(&r).code(), absl::StatusCode::kFailedPrecondition);
}

TEST(RunWaspTest, TransientFailureIsRetriedOnce) {
  Harness clean;
  ASSERT_TRUE(clean.Init(SimParams()).ok());
  RunResult expected;
  ASSERT_TRUE(clean.Run(&expected).ok());

  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  FlakyGenerator flaky(h.inputs.generators[0]);
  h.inputs.generators[0] = &flaky;
  RunOptions options;
  options.on_iteration = [&](const IterationRecord& rec) {
    if (rec.iteration == 1) flaky.failures = 1;
  };
  RunResult r;
  ASSERT_TRUE(h.Run(&r, options).ok());
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(r.trace[2].attempts, 2);
  EXPECT_EQ(r.dataset, expected.dataset);
  for (int t = 0; t < 5; ++t) {
    IterationRecord rec = r.trace[t];
    rec.attempts = 1;
    EXPECT_EQ(rec, expected.trace[t]) << t;
  }
}

TEST(RunWaspTest, PersistentFailureAbortsWithPartialTrace) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  FlakyGenerator flaky(h.inputs.generators[1]);
  h.inputs.generators[1] = &flaky;
  std::vector<IterationRecord> flushed;
  RunOptions options;
  options.on_iteration = [&](const IterationRecord& rec) {
    flushed.push_back(rec);
    if (rec.iteration == 1) flaky.failures = 1000000;
  };
  RunResult r;
  const absl::Status s = h.Run(&r, options);
  EXPECT_EQ(s.code(), absl::StatusCode::kUnavailable);
  EXPECT_NE(s.message().find("iteration 2 failed twice"), std::string::npos);
  ASSERT_EQ(flushed.size(), 2u);
  EXPECT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.dataset.size(), 200u);
}

TEST(RunWaspTest, InputMismatches) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult r;
  RunInputs swapped = h.inputs;
  std::swap(swapped.generators[0], swapped.generators[1]);
  EXPECT_EQ(RunWasp(h.config, swapped, {}, &r).code(),
            absl::StatusCode::kInvalidArgument);
  RunInputs missing = h.inputs;
  missing.generators.pop_back();
  EXPECT_FALSE(RunWasp(h.config, missing, {}, &r).ok());
  RunInputs no_embedder = h.inputs;
  no_embedder.embedder = nullptr;
  EXPECT_FALSE(RunWasp(h.config, no_embedder, {}, &r).ok());
  std::vector<LabeledSample> bad = h.private_data;
  bad[3].label = "neutral";
  RunInputs bad_data = h.inputs;
  bad_data.private_data = &bad;
  EXPECT_FALSE(RunWasp(h.config, bad_data, {}, &r).ok());
}

TEST(RunWaspTest, KeepsReleasedHistograms) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult r;
  RunOptions options;
  options.keep_histograms = true;
  ASSERT_TRUE(h.Run(&r, options).ok());
  ASSERT_EQ(r.histograms.size(), 4u);
  for (size_t t = 0; t < 4; ++t) {
    EXPECT_TRUE(r.histograms[t].noised);
    EXPECT_EQ(r.histograms[t].size(),
              static_cast<size_t>(r.trace[t].dataset_size));
  }
}

TEST(AblationTest, NoWeightingKeepsUniformAllocation) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  AblationSpec spec;
  spec.mode = AblationMode::kNoWeighting;
  auto runs = RunAblation(h.config, h.inputs, spec);
  ASSERT_TRUE(runs.ok()) << runs.status();
  ASSERT_EQ(runs->size(), 1u);
  EXPECT_EQ((*runs)[0].label, "no_weighting");
  for (const auto& rec : (*runs)[0].result.trace) {
    EXPECT_EQ(rec.generators[0].allocation, 50);
    EXPECT_EQ(rec.generators[1].allocation, 50);
    EXPECT_EQ(rec.prompt_style,
              rec.iteration == 0 ? PromptStyle::kZeroShot
                                 : PromptStyle::kContrastive);
  }
}

TEST(AblationTest, NoContrastChangesOnlyPromptsAfterFirstRound) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult base;
  ASSERT_TRUE(h.Run(&base).ok());
  AblationSpec spec;
  spec.mode = AblationMode::kNoContrast;
  auto runs = RunAblation(h.config, h.inputs, spec);
  ASSERT_TRUE(runs.ok());
  const auto& trace = (*runs)[0].result.trace;
  EXPECT_EQ(trace[0], base.trace[0]);
  for (size_t t = 1; t < trace.size(); ++t) {
    EXPECT_EQ(trace[t].prompt_style, PromptStyle::kNonContrastive);
    EXPECT_NE(trace[t].template_hash, base.trace[t].template_hash);
  }
}

TEST(AblationTest, QOverrideRunsEachValue) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  AblationSpec spec;
  spec.mode = AblationMode::kQOverride;
  spec.q_values = {1, 2, 4, 8};
  auto runs = RunAblation(h.config, h.inputs, spec);
  ASSERT_TRUE(runs.ok());
  ASSERT_EQ(runs->size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ((*runs)[i].label, "q=" + std::to_string(spec.q_values[i]));
    EXPECT_EQ((*runs)[i].config.q, spec.q_values[i]);
    EXPECT_EQ((*runs)[i].result.trace.size(), 5u);
  }
  spec.q_values.clear();
  EXPECT_FALSE(RunAblation(h.config, h.inputs, spec).ok());
}

TEST(AblationTest, EpsilonSweepScalesNoise) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  AblationSpec spec;
  spec.mode = AblationMode::kEpsilonSweep;
  spec.epsilons = {0.5, 1, 2, 4, HUGE_VAL};
  auto runs = RunAblation(h.config, h.inputs, spec);
  ASSERT_TRUE(runs.ok()) << runs.status();
  ASSERT_EQ(runs->size(), 5u);
  for (size_t i = 1; i < runs->size(); ++i) {
    EXPECT_LT((*runs)[i].result.privacy.sigma_local,
              (*runs)[i - 1].result.privacy.sigma_local);
  }
  EXPECT_TRUE(runs->back().config.privacy.infinite_epsilon);
  EXPECT_EQ(runs->back().result.trace[1].sigma, 0.0);
  spec.epsilons.clear();
  EXPECT_FALSE(RunAblation(h.config, h.inputs, spec).ok());
}

TEST(AblationTest, ParseMode) {
  EXPECT_EQ(*ParseAblationMode("no_contrast"), AblationMode::kNoContrast);
  EXPECT_EQ(*ParseAblationMode("epsilon_sweep"), AblationMode::kEpsilonSweep);
  EXPECT_FALSE(ParseAblationMode("everything").ok());
}

}  // namespace
}  // namespace wasp
