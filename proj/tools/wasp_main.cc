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

// Command-line front end.
//
//   wasp run       --config run.yaml [--output-dir DIR] [--dump-histograms]
//                  [--ablation MODE [--q-values 1,2,4] [--epsilons inf,4]]
//   wasp report    --trace trace.jsonl [--format markdown|csv]
//   wasp partition --config run.yaml --out partition.json
//   wasp eval      --config run.yaml --synthetic D.jsonl --private B.jsonl
//                  [--test T.jsonl]
//   wasp simulate  --config run.yaml --out private.jsonl
//
// Exit codes: 0 success, 1 other failure, 2 configuration or input error,
// 3 backend error, 4 privacy-discipline error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "wasp/dataset_io.h"
#include "wasp/embedding.h"
#include "wasp/eval.h"
#include "wasp/federated.h"
#include "wasp/orchestrator.h"
#include "wasp/run_config.h"
#include "wasp/status_macros.h"
#include "wasp/trace_io.h"

namespace wasp {
namespace {

namespace fs = std::filesystem;

int ExitCode(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
      return 2;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kDeadlineExceeded:
      return 3;
    case absl::StatusCode::kFailedPrecondition:
      return 4;
    default:
      return 1;
  }
}

absl::StatusOr<std::vector<double>> ParseEpsilons(
    const std::vector<std::string>& text) {
  std::vector<double> out;
  for (const auto& t : text) {
    if (t == "inf" || t == "infinity" || t == ".inf") {
      out.push_back(HUGE_VAL);
      continue;
    }
    double v = 0;
    if (!absl::SimpleAtod(t, &v)) {
      return absl::InvalidArgumentError(absl::StrCat("bad epsilon '", t, "'"));
    }
    out.push_back(v);
  }
  return out;
}

absl::Status WriteRunOutputs(const std::string& dir, const RunConfig& config,
                             const RunResult& result, bool dump_histograms) {
  WASP_RETURN_IF_ERROR(WriteDataset((fs::path(dir) / "dataset.jsonl").string(),
                                    result.dataset, config.task.name,
                                    config.embedder.dimension));
  WASP_RETURN_IF_ERROR(WriteMetricsCsv(
      (fs::path(dir) / "metrics.csv").string(), result.trace));
  if (!result.parties.empty()) {
    WASP_RETURN_IF_ERROR(WritePartitionManifest(
        (fs::path(dir) / "partition.json").string(), result.parties));
  }
  if (dump_histograms) {
    const fs::path hist = fs::path(dir) / "histograms";
    fs::create_directories(hist);
    for (size_t i = 0; i < result.histograms.size(); ++i) {
      WASP_RETURN_IF_ERROR(WriteHistogramCsv(
          (hist / absl::StrCat("round_", i, ".csv")).string(),
          result.histograms[i]));
    }
  }
  return absl::OkStatus();
}

absl::Status RunOne(const RunConfig& config, const std::string& dir,
                    bool dump_histograms) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot create output directory ", dir));
  }
  WASP_ASSIGN_OR_RETURN(CompositionReport privacy,
                        VerifyComposition(config.privacy));
  WASP_ASSIGN_OR_RETURN(
      TraceWriter trace,
      TraceWriter::Open((fs::path(dir) / "trace.jsonl").string(),
                        MakeTraceHeader(config, privacy)));
  absl::Status trace_status = absl::OkStatus();
  RunOptions options;
  options.keep_histograms = dump_histograms;
  options.on_iteration = [&](const IterationRecord& r) {
    if (trace_status.ok()) trace_status = trace.Append(r);
    std::cerr << "iteration " << r.iteration << ": |D|=" << r.dataset_size
              << " frechet=" << r.frechet << "\n";
  };
  RunResult result;
  const absl::Status run = RunWaspFromConfig(config, options, &result);
  WASP_RETURN_IF_ERROR(trace_status);
  WASP_RETURN_IF_ERROR(run);
  WASP_RETURN_IF_ERROR(WriteRunOutputs(dir, config, result, dump_histograms));
  std::cout << "wrote " << result.dataset.size() << " samples to " << dir
            << "\n";
  return absl::OkStatus();
}

absl::Status CmdRun(const std::string& config_path, std::string output_dir,
                    bool dump_histograms, const std::string& ablation,
                    const std::vector<int>& q_values,
                    const std::vector<std::string>& epsilons) {
  WASP_ASSIGN_OR_RETURN(RunConfig config, LoadRunConfig(config_path));
  if (output_dir.empty()) output_dir = config.output_dir;
  if (output_dir.empty()) {
    return absl::InvalidArgumentError(
        "no output directory: set output_dir or pass --output-dir");
  }
  if (ablation.empty()) return RunOne(config, output_dir, dump_histograms);

  WASP_ASSIGN_OR_RETURN(AblationMode mode, ParseAblationMode(ablation));
  std::vector<std::pair<std::string, RunConfig>> variants;
  switch (mode) {
    case AblationMode::kNoContrast:
      variants.push_back({"no_contrast", config});
      variants.back().second.contrastive = false;
      break;
    case AblationMode::kNoWeighting:
      variants.push_back({"no_weighting", config});
      variants.back().second.weighting = false;
      break;
    case AblationMode::kQOverride:
      if (q_values.empty()) {
        return absl::InvalidArgumentError("--q-values is required");
      }
      for (int q : q_values) {
        variants.push_back({absl::StrCat("q_", q), config});
        variants.back().second.q = q;
      }
      break;
    case AblationMode::kEpsilonSweep: {
      WASP_ASSIGN_OR_RETURN(std::vector<double> eps, ParseEpsilons(epsilons));
      if (eps.empty()) {
        return absl::InvalidArgumentError("--epsilons is required");
      }
      for (double e : eps) {
        variants.push_back(
            {std::isinf(e) ? "epsilon_inf" : absl::StrCat("epsilon_", e),
             config});
        variants.back().second.privacy.epsilon = e;
        variants.back().second.privacy.infinite_epsilon = std::isinf(e);
      }
      break;
    }
  }
  for (const auto& [label, variant] : variants) {
    WASP_RETURN_IF_ERROR(variant.Validate());
    WASP_RETURN_IF_ERROR(RunOne(variant, (fs::path(output_dir) / label).string(),
                                dump_histograms));
  }
  return absl::OkStatus();
}

absl::Status CmdReport(const std::string& trace_path,
                       const std::string& format) {
  WASP_ASSIGN_OR_RETURN(TraceFile trace, ReadTrace(trace_path));
  WASP_ASSIGN_OR_RETURN(std::string text, RenderReport(trace, format));
  std::cout << text;
  return absl::OkStatus();
}

absl::Status CmdPartition(const std::string& config_path,
                          const std::string& out) {
  WASP_ASSIGN_OR_RETURN(RunConfig config, LoadRunConfig(config_path));
  WASP_ASSIGN_OR_RETURN(std::vector<LabeledSample> data,
                        LoadPrivateData(config));
  EmbeddedSet set;
  WASP_ASSIGN_OR_RETURN(set.labels, LabelIds(data, config.task));
  set.vectors.resize(data.size());
  Rng rng(DeriveSeed(config.seed, "partition"));
  WASP_ASSIGN_OR_RETURN(
      std::vector<Party> parties,
      PartitionDirichlet(set, config.privacy.parties, config.dirichlet_alpha,
                         rng));
  WASP_RETURN_IF_ERROR(WritePartitionManifest(out, parties));
  std::cout << "parties: " << parties.size()
            << " largest: " << MaxPartySize(parties) << "\n";
  return absl::OkStatus();
}

absl::StatusOr<EmbeddedSet> EmbedFile(const std::string& path,
                                      const RunConfig& config,
                                      Embedder& embedder) {
  DatasetExpectations expect;
  expect.task = &config.task;
  WASP_ASSIGN_OR_RETURN(std::vector<LabeledSample> samples,
                        ReadLabeledSamples(path, expect));
  EmbeddedSet set;
  WASP_ASSIGN_OR_RETURN(set.labels, LabelIds(samples, config.task));
  WASP_ASSIGN_OR_RETURN(set.vectors, EmbedSamples(embedder, samples));
  return set;
}

absl::Status CmdEval(const std::string& config_path,
                     const std::string& synthetic_path,
                     const std::string& private_path,
                     const std::string& test_path) {
  WASP_ASSIGN_OR_RETURN(RunConfig config, LoadRunConfig(config_path));
  WASP_ASSIGN_OR_RETURN(std::unique_ptr<Embedder> embedder,
                        MakeEmbedder(config.embedder));
  WASP_ASSIGN_OR_RETURN(EmbeddedSet synthetic,
                        EmbedFile(synthetic_path, config, *embedder));
  WASP_ASSIGN_OR_RETURN(EmbeddedSet priv,
                        EmbedFile(private_path, config, *embedder));
  WASP_ASSIGN_OR_RETURN(double fd,
                        FrechetDistance(synthetic.vectors, priv.vectors));
  EmbeddedSet test = priv;
  if (!test_path.empty()) {
    WASP_ASSIGN_OR_RETURN(test, EmbedFile(test_path, config, *embedder));
  }
  NearestCentroidEvaluator evaluator;
  WASP_ASSIGN_OR_RETURN(double acc, evaluator.Evaluate(synthetic, test));
  std::cout << "frechet_distance " << fd << "\n"
            << "nearest_centroid_accuracy " << acc << "\n"
            << "embedder " << config.embedder.kind << " dimension "
            << config.embedder.dimension << "\n";
  return absl::OkStatus();
}

absl::Status CmdSimulate(const std::string& config_path,
                         const std::string& out) {
  WASP_ASSIGN_OR_RETURN(RunConfig config, LoadRunConfig(config_path));
  if (!config.private_simulation.has_value()) {
    return absl::InvalidArgumentError("config has no private_simulation block");
  }
  WASP_ASSIGN_OR_RETURN(
      std::vector<LabeledSample> samples,
      SimulatePrivateData(*config.private_simulation, config.task,
                          config.embedder.dimension));
  WASP_RETURN_IF_ERROR(WriteLabeledSamples(out, samples, config.task.name));
  std::cout << "wrote " << samples.size() << " private samples to " << out
            << "\n";
  return absl::OkStatus();
}

}  // namespace
}  // namespace wasp

int main(int argc, char** argv) {
  CLI::App app{"Private synthetic text generation with weighted generators"};
  app.require_subcommand(1);

  std::string config, output_dir, ablation, trace, format = "markdown", out,
                                                synthetic, private_path, test;
  bool dump_histograms = false;
  std::vector<int> q_values;
  std::vector<std::string> epsilons;

  CLI::App* run = app.add_subcommand("run", "Run the generation loop");
  run->add_option("--config", config, "Run config (YAML)")->required();
  run->add_option("--output-dir", output_dir, "Overrides output_dir");
  run->add_flag("--dump-histograms", dump_histograms,
                "Write each released histogram pair as CSV");
  run->add_option("--ablation", ablation,
                  "no_contrast, no_weighting, q_override or epsilon_sweep");
  run->add_option("--q-values", q_values, "Q values for q_override")
      ->delimiter(',');
  run->add_option("--epsilons", epsilons,
                  "Epsilon values for epsilon_sweep (inf allowed)")
      ->delimiter(',');

  CLI::App* report = app.add_subcommand("report", "Summarize a trace");
  report->add_option("--trace", trace, "trace.jsonl")->required();
  report->add_option("--format", format, "markdown or csv");

  CLI::App* partition =
      app.add_subcommand("partition", "Write a Dirichlet party partition");
  partition->add_option("--config", config, "Run config (YAML)")->required();
  partition->add_option("--out", out, "Manifest path")->required();

  CLI::App* eval = app.add_subcommand(
      "eval", "Fréchet distance and nearest-centroid accuracy");
  eval->add_option("--config", config, "Run config for the embedder")
      ->required();
  eval->add_option("--synthetic", synthetic, "Synthetic dataset")->required();
  eval->add_option("--private", private_path, "Private dataset")->required();
  eval->add_option("--test", test, "Held-out test set (default: private)");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Draw simulated private data from a config");
  simulate->add_option("--config", config, "Run config (YAML)")->required();
  simulate->add_option("--out", out, "Output dataset path")->required();

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (*run) {
    status = wasp::CmdRun(config, output_dir, dump_histograms, ablation,
                          q_values, epsilons);
  } else if (*report) {
    status = wasp::CmdReport(trace, format);
  } else if (*partition) {
    status = wasp::CmdPartition(config, out);
  } else if (*eval) {
    status = wasp::CmdEval(config, synthetic, private_path, test);
  } else if (*simulate) {
    status = wasp::CmdSimulate(config, out);
  }
  if (!status.ok()) {
    std::cerr << "error: " << status.message() << "\n";
    return wasp::ExitCode(status);
  }
  return 0;
}
