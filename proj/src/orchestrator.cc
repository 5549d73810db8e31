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

#include <cmath>
#include <future>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "wasp/dataset_io.h"
#include "wasp/eval.h"
#include "wasp/random.h"
#include "wasp/status_macros.h"
#include "wasp/voting.h"
#include "wasp/weighting.h"

namespace wasp {
namespace {

struct GeneratedRound {
  std::vector<GenerationOutput> per_generator;
};

absl::StatusOr<GeneratedRound> GenerateRound(
    const RunConfig& config, const RunInputs& inputs,
    const std::vector<int64_t>& counts, const ContrastiveSelection* selection,
    PromptStyle style, int iteration, int64_t first_index,
    uint64_t iteration_seed) {
  const size_t k = inputs.generators.size();
  std::vector<std::future<absl::StatusOr<GenerationOutput>>> pending;
  int64_t next_index = first_index;
  for (size_t g = 0; g < k; ++g) {
    GenerationRequest request;
    request.tmpl = inputs.tmpl;
    request.task = &config.task;
    request.selection = selection;
    request.style = style;
    request.n_hat = counts[g];
    request.iteration = iteration;
    request.first_index = next_index;
    next_index += counts[g];
    Generator* generator = inputs.generators[g];
    const uint64_t seed = DeriveSeed(iteration_seed, "generator", g);
    pending.push_back(std::async(
        k > 1 ? std::launch::async : std::launch::deferred,
        [generator, request, seed]() {
          Rng rng(seed);
          return WeightedSynDataGeneration(*generator, request, rng);
        }));
  }
  GeneratedRound round;
  absl::Status first = absl::OkStatus();
  for (auto& f : pending) {
    absl::StatusOr<GenerationOutput> out = f.get();
    if (!out.ok()) {
      if (first.ok()) first = out.status();
      continue;
    }
    round.per_generator.push_back(std::move(*out));
  }
  if (!first.ok()) return first;
  return round;
}

absl::StatusOr<EmbeddedSet> EmbedLabeled(Embedder& embedder,
                                         std::span<const LabeledSample> samples,
                                         const TaskDescriptor& task) {
  EmbeddedSet set;
  if (samples.empty()) return set;
  WASP_ASSIGN_OR_RETURN(set.labels, LabelIds(samples, task));
  WASP_ASSIGN_OR_RETURN(set.vectors, EmbedSamples(embedder, samples));
  for (const auto& v : set.vectors) {
    if (static_cast<int>(v.dimension()) != embedder.dimension()) {
      return absl::DataLossError(absl::StrCat(
          "embedder returned dimension ", v.dimension(), ", expected ",
          embedder.dimension()));
    }
  }
  return set;
}

absl::Status CheckInputs(const RunConfig& config, const RunInputs& inputs) {
  if (inputs.private_data == nullptr || inputs.embedder == nullptr ||
      inputs.tmpl == nullptr) {
    return absl::InvalidArgumentError(
        "run needs private data, an embedder and a template");
  }
  if (inputs.generators.size() != config.generators.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "config lists ", config.generators.size(), " generators, ",
        inputs.generators.size(), " supplied"));
  }
  for (size_t g = 0; g < inputs.generators.size(); ++g) {
    if (inputs.generators[g] == nullptr ||
        inputs.generators[g]->id() != config.generators[g].id()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "generator ", g, " does not match config entry '",
          config.generators[g].id(), "'"));
    }
  }
  if (inputs.embedder->dimension() != config.embedder.dimension) {
    return absl::InvalidArgumentError("embedder dimension differs from config");
  }
  if (inputs.private_data->empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  for (const auto& s : *inputs.private_data) {
    WASP_RETURN_IF_ERROR(ValidateSample(s, config.task));
  }
  return inputs.tmpl->Validate();
}

uint64_t CombineDigests(const std::vector<GenerationOutput>& outputs) {
  uint64_t h = kFnvOffset;
  for (const auto& o : outputs) {
    const uint64_t d = o.prompt_digest;
    h = Fnv1a(std::string_view(reinterpret_cast<const char*>(&d), sizeof(d)),
              h);
  }
  return h;
}

}  // namespace

absl::Status RunWasp(const RunConfig& config, const RunInputs& inputs,
                     const RunOptions& options, RunResult* result) {
  *result = RunResult();
  WASP_RETURN_IF_ERROR(config.Validate());
  WASP_RETURN_IF_ERROR(CheckInputs(config, inputs));
  const int k = config.num_generators();
  const int t_total = config.iterations();
  const int parties = config.privacy.parties;

  WASP_ASSIGN_OR_RETURN(
      EmbeddedSet private_set,
      EmbedLabeled(*inputs.embedder, *inputs.private_data, config.task));

  PrivacyBudget budget = config.privacy;
  if (parties > 1) {
    Rng partition_rng(DeriveSeed(config.seed, "partition"));
    WASP_ASSIGN_OR_RETURN(
        result->parties,
        PartitionDirichlet(private_set, parties, config.dirichlet_alpha,
                           partition_rng));
  }
  if (budget.level == PrivacyLevel::kUser) {
    const int largest = parties > 1
                            ? MaxPartySize(result->parties)
                            : static_cast<int>(private_set.size());
    if (largest > *budget.max_party_size) {
      return absl::FailedPreconditionError(absl::StrCat(
          "a party holds ", largest, " samples but the user-level budget is "
          "calibrated for at most ", *budget.max_party_size));
    }
  }
  WASP_ASSIGN_OR_RETURN(result->privacy, VerifyComposition(budget));
  const double sigma = result->privacy.sigma_local;

  SyntheticDataset dataset(config.GeneratorIds());
  EmbeddedSet synthetic;
  std::vector<int> owner;
  std::vector<int64_t> owned(k, 0);
  PrivacyAccountant accountant(t_total);

  WASP_ASSIGN_OR_RETURN(Allocation allocation,
                        UniformAllocation(k, config.n, t_total));
  std::vector<double> raw(k, 1.0);
  std::optional<ContrastiveSelection> selection;

  for (int t = 0; t < t_total; ++t) {
    IterationRecord record;
    record.iteration = t;
    record.rng_checkpoint = DeriveSeed(config.seed, "iteration", t);
    record.prompt_style =
        t == 0 ? PromptStyle::kZeroShot
               : (config.contrastive ? PromptStyle::kContrastive
                                     : PromptStyle::kNonContrastive);
    record.template_hash = TemplateHash(*inputs.tmpl, record.prompt_style);

    absl::StatusOr<GeneratedRound> round = absl::InternalError("unset");
    for (record.attempts = 1; record.attempts <= 2; ++record.attempts) {
      round = GenerateRound(config, inputs, allocation.counts,
                            selection ? &*selection : nullptr,
                            record.prompt_style, t,
                            static_cast<int64_t>(dataset.size()),
                            record.rng_checkpoint);
      if (round.ok()) break;
    }
    if (!round.ok()) {
      return absl::Status(
          round.status().code(),
          absl::StrCat("iteration ", t, " failed twice: ",
                       round.status().message()));
    }
    record.prompt_digest = CombineDigests(round->per_generator);

    std::vector<SyntheticSample> batch;
    for (int g = 0; g < k; ++g) {
      for (auto& s : round->per_generator[g].samples) {
        owner.push_back(g);
        batch.push_back(std::move(s));
      }
      owned[g] += allocation.counts[g];
    }
    WASP_RETURN_IF_ERROR(dataset.Append(batch));
    std::vector<LabeledSample> texts;
    texts.reserve(batch.size());
    for (const auto& s : batch) texts.push_back(s.sample);
    WASP_ASSIGN_OR_RETURN(EmbeddedSet added,
                          EmbedLabeled(*inputs.embedder, texts, config.task));
    for (size_t i = 0; i < added.size(); ++i) {
      synthetic.vectors.push_back(std::move(added.vectors[i]));
      synthetic.labels.push_back(added.labels[i]);
    }

    for (int g = 0; g < k; ++g) {
      record.generators.push_back({config.generators[g].id(), raw[g],
                                   allocation.weights[g],
                                   allocation.counts[g], owned[g]});
    }
    record.dataset_size = static_cast<int64_t>(dataset.size());
    WASP_ASSIGN_OR_RETURN(record.frechet,
                          FrechetDistance(synthetic.vectors, private_set.vectors));

    if (t < t_total - 1) {
      VoteOptions vote;
      vote.q = config.q;
      vote.threads = config.threads;
      vote.task = &config.task;
      VoteHistograms h;
      if (parties > 1) {
        WASP_ASSIGN_OR_RETURN(
            h, FederatedVote(result->parties, synthetic, vote, sigma,
                             DeriveSeed(record.rng_checkpoint, "parties")));
      } else {
        WASP_ASSIGN_OR_RETURN(h, TopQVote(private_set, synthetic, vote));
        Rng noise(DeriveSeed(record.rng_checkpoint, "noise"));
        WASP_ASSIGN_OR_RETURN(h, AddGaussianNoise(std::move(h), sigma, noise));
      }
      WASP_RETURN_IF_ERROR(accountant.RecordRelease(t));
      record.voted = true;
      record.sigma = sigma;

      WASP_ASSIGN_OR_RETURN(
          ContrastiveSelection chosen,
          SelectContrastive(dataset.samples(), synthetic.labels, h, config.s,
                            config.task));
      for (size_t c = 0; c < config.task.categories.size(); ++c) {
        record.near_ids.push_back(chosen.NearIndices(static_cast<int>(c)));
        record.far_ids.push_back(chosen.FarIndices(static_cast<int>(c)));
      }
      selection = std::move(chosen);

      absl::StatusOr<std::vector<double>> scored =
          ScoreGenerators(h.nearest, owner, k);
      if (scored.ok()) {
        raw = *std::move(scored);
      } else if (scored.status().code() == absl::StatusCode::kOutOfRange) {
        record.weight_fallback = true;
        raw.assign(k, 1.0);
      } else {
        return scored.status();
      }
      if (config.weighting) {
        WASP_ASSIGN_OR_RETURN(
            allocation, NormalizeAndAllocate(raw, config.n, t_total,
                                             config.EffectiveWeightFloor()));
      } else {
        WASP_ASSIGN_OR_RETURN(allocation,
                              UniformAllocation(k, config.n, t_total));
      }
      if (options.keep_histograms) result->histograms.push_back(std::move(h));
    }

    result->dataset = dataset.samples();
    result->trace.push_back(record);
    if (options.on_iteration) options.on_iteration(record);
  }
  return accountant.Finish();
}

absl::StatusOr<std::vector<LabeledSample>> LoadPrivateData(
    const RunConfig& config) {
  if (!config.private_data.empty()) {
    DatasetExpectations expect;
    expect.task = &config.task;
    return ReadLabeledSamples(config.private_data, expect);
  }
  if (config.private_simulation.has_value()) {
    return SimulatePrivateData(*config.private_simulation, config.task,
                               config.embedder.dimension);
  }
  return absl::InvalidArgumentError("config names no private data");
}

absl::Status RunWaspFromConfig(const RunConfig& config,
                               const RunOptions& options, RunResult* result) {
  *result = RunResult();
  WASP_RETURN_IF_ERROR(config.Validate());
  WASP_ASSIGN_OR_RETURN(std::vector<LabeledSample> private_data,
                        LoadPrivateData(config));
  WASP_ASSIGN_OR_RETURN(std::unique_ptr<Embedder> embedder,
                        MakeEmbedder(config.embedder));
  WASP_ASSIGN_OR_RETURN(std::vector<std::unique_ptr<Generator>> generators,
                        MakeGenerators(config));
  WASP_ASSIGN_OR_RETURN(PromptTemplate tmpl, ResolveTemplate(config));
  RunInputs inputs;
  inputs.private_data = &private_data;
  inputs.embedder = embedder.get();
  for (auto& g : generators) inputs.generators.push_back(g.get());
  inputs.tmpl = &tmpl;
  return RunWasp(config, inputs, options, result);
}

absl::StatusOr<AblationMode> ParseAblationMode(std::string_view name) {
  if (name == "no_contrast") return AblationMode::kNoContrast;
  if (name == "no_weighting") return AblationMode::kNoWeighting;
  if (name == "q_override") return AblationMode::kQOverride;
  if (name == "epsilon_sweep") return AblationMode::kEpsilonSweep;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown ablation '", std::string(name),
      "'; expected no_contrast, no_weighting, q_override or epsilon_sweep"));
}

absl::StatusOr<std::vector<AblationRun>> RunAblation(
    const RunConfig& config, const RunInputs& inputs,
    const AblationSpec& spec) {
  std::vector<AblationRun> runs;
  switch (spec.mode) {
    case AblationMode::kNoContrast: {
      AblationRun r{"no_contrast", config, {}};
      r.config.contrastive = false;
      runs.push_back(std::move(r));
      break;
    }
    case AblationMode::kNoWeighting: {
      AblationRun r{"no_weighting", config, {}};
      r.config.weighting = false;
      runs.push_back(std::move(r));
      break;
    }
    case AblationMode::kQOverride:
      if (spec.q_values.empty()) {
        return absl::InvalidArgumentError("q_override needs Q values");
      }
      for (int q : spec.q_values) {
        AblationRun r{absl::StrCat("q=", q), config, {}};
        r.config.q = q;
        runs.push_back(std::move(r));
      }
      break;
    case AblationMode::kEpsilonSweep:
      if (spec.epsilons.empty()) {
        return absl::InvalidArgumentError("epsilon_sweep needs epsilon values");
      }
      for (double eps : spec.epsilons) {
        AblationRun r{absl::StrCat("epsilon=", eps), config, {}};
        r.config.privacy.infinite_epsilon = std::isinf(eps) && eps > 0;
        r.config.privacy.epsilon = eps;
        runs.push_back(std::move(r));
      }
      break;
  }
  for (auto& r : runs) {
    WASP_RETURN_IF_ERROR(RunWasp(r.config, inputs, RunOptions(), &r.result));
  }
  return runs;
}

}  // namespace wasp
