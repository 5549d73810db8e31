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

#include "wasp/generation.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

using json = nlohmann::json;

absl::StatusOr<std::vector<double>> Centroid(
    const SimulationEmbedder& codec, const std::vector<std::string>& texts) {
  std::vector<double> sum(codec.dimension(), 0.0);
  for (const auto& t : texts) {
    WASP_ASSIGN_OR_RETURN(Embedding v, codec.EmbedText(t));
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += v.values[i];
  }
  for (double& x : sum) x /= static_cast<double>(texts.size());
  return sum;
}

}  // namespace

absl::Status MockGeneratorOptions::Validate() const {
  if (id.empty()) return absl::InvalidArgumentError("generator has no id");
  if (dimension < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("generator '", id, "': dimension must be >= 1"));
  }
  if (label_means.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("generator '", id, "': no label means"));
  }
  for (const auto& [label, mean] : label_means) {
    if (static_cast<int>(mean.size()) != dimension) {
      return absl::InvalidArgumentError(
          absl::StrCat("generator '", id, "': mean for '", label, "' has ",
                       mean.size(), " components, expected ", dimension));
    }
  }
  if (!offset.empty() && static_cast<int>(offset.size()) != dimension) {
    return absl::InvalidArgumentError(
        absl::StrCat("generator '", id, "': offset has wrong length"));
  }
  if (!(stddev >= 0) || !std::isfinite(stddev)) {
    return absl::InvalidArgumentError(
        absl::StrCat("generator '", id, "': stddev must be finite and >= 0"));
  }
  if (!std::isfinite(responsiveness) || !std::isfinite(contrast)) {
    return absl::InvalidArgumentError(
        absl::StrCat("generator '", id, "': non-finite feedback parameter"));
  }
  return absl::OkStatus();
}

MockGenerator::MockGenerator(MockGeneratorOptions options)
    : options_(std::move(options)), codec_(options_.dimension, 0) {}

absl::StatusOr<std::vector<double>> MockGenerator::ConditionalMean(
    const Prompt& prompt) const {
  const auto it = options_.label_means.find(prompt.label);
  if (it == options_.label_means.end()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "generator '", options_.id, "' has no mean for label '", prompt.label,
        "'"));
  }
  std::vector<double> base = it->second;
  if (!options_.offset.empty()) {
    for (size_t i = 0; i < base.size(); ++i) base[i] += options_.offset[i];
  }
  std::vector<double> mean = base;
  const double r = options_.responsiveness;
  if (!prompt.good.empty()) {
    WASP_ASSIGN_OR_RETURN(std::vector<double> g, Centroid(codec_, prompt.good));
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += r * (g[i] - base[i]);
  }
  if (!prompt.bad.empty()) {
    WASP_ASSIGN_OR_RETURN(std::vector<double> b, Centroid(codec_, prompt.bad));
    for (size_t i = 0; i < mean.size(); ++i) {
      mean[i] -= r * options_.contrast * (b[i] - base[i]);
    }
  }
  return mean;
}

absl::StatusOr<std::vector<LabeledSample>> MockGenerator::GenerateBatch(
    std::span<const Prompt> prompts, Rng& rng) {
  std::vector<LabeledSample> out;
  out.reserve(prompts.size());
  for (const Prompt& p : prompts) {
    WASP_ASSIGN_OR_RETURN(std::vector<double> mean, ConditionalMean(p));
    Embedding x;
    x.values.resize(mean.size());
    for (size_t i = 0; i < mean.size(); ++i) {
      x.values[i] = mean[i] + options_.stddev * rng.Normal();
    }
    WASP_ASSIGN_OR_RETURN(std::string text, codec_.Decode(x));
    out.push_back({std::move(text), p.label, p.attribute});
  }
  return out;
}

std::string CleanCompletion(std::string_view text) {
  std::string_view t = TrimWhitespace(text);
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') &&
      t.back() == t.front()) {
    t = TrimWhitespace(t.substr(1, t.size() - 2));
  }
  return std::string(t);
}

HttpGenerator::HttpGenerator(HttpGeneratorOptions options)
    : options_(std::move(options)) {
  if (options_.http.api_key.empty()) {
    options_.http.api_key = ReadEnv(options_.api_key_env);
  }
}

absl::StatusOr<std::string> HttpGenerator::Complete(
    const std::string& prompt) const {
  json body = {{"model", options_.model},
               {"temperature", options_.temperature},
               {"max_tokens", options_.max_tokens}};
  if (options_.api == "chat") {
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  } else {
    body["prompt"] = prompt;
  }
  WASP_ASSIGN_OR_RETURN(json reply,
                        PostJson(options_.endpoint, body, options_.http));
  try {
    const json& choice = reply.at("choices").at(0);
    if (options_.api == "chat") {
      return CleanCompletion(
          choice.at("message").at("content").get<std::string>());
    }
    return CleanCompletion(choice.at("text").get<std::string>());
  } catch (const json::exception& e) {
    return absl::UnavailableError(
        absl::StrCat("generator '", options_.id,
                     "': malformed completion reply: ", e.what()));
  }
}

absl::StatusOr<std::vector<LabeledSample>> HttpGenerator::GenerateBatch(
    std::span<const Prompt> prompts, Rng&) {
  if (options_.api != "chat" && options_.api != "completions") {
    return absl::InvalidArgumentError(absl::StrCat(
        "generator '", options_.id, "': api must be chat or completions"));
  }
  std::vector<LabeledSample> out(prompts.size());
  auto one = [this, &prompts, &out](size_t i) -> absl::Status {
    absl::Status last = absl::OkStatus();
    for (int attempt = 0; attempt < std::max(1, options_.item_retries);
         ++attempt) {
      absl::StatusOr<std::string> text = Complete(prompts[i].text);
      if (!text.ok()) {
        if (text.status().code() == absl::StatusCode::kInvalidArgument) {
          return text.status();
        }
        last = text.status();
        continue;
      }
      if (text->empty()) {
        last = absl::UnavailableError("empty completion");
        continue;
      }
      out[i] = {std::move(*text), prompts[i].label, prompts[i].attribute};
      return absl::OkStatus();
    }
    return absl::UnavailableError(
        absl::StrCat("generator '", options_.id, "': item ", i, " failed after ",
                     options_.item_retries, " attempts: ", last.message()));
  };
  const size_t width = static_cast<size_t>(std::max(1, options_.concurrency));
  for (size_t start = 0; start < prompts.size(); start += width) {
    const size_t stop = std::min(prompts.size(), start + width);
    std::vector<std::future<absl::Status>> pending;
    for (size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(std::launch::async, one, i));
    }
    absl::Status first = absl::OkStatus();
    for (auto& f : pending) {
      absl::Status s = f.get();
      if (first.ok() && !s.ok()) first = s;
    }
    if (!first.ok()) return first;
  }
  return out;
}

absl::StatusOr<GenerationOutput> WeightedSynDataGeneration(
    Generator& generator, const GenerationRequest& request, Rng& rng) {
  if (request.tmpl == nullptr || request.task == nullptr) {
    return absl::InvalidArgumentError("generation needs a template and task");
  }
  if (request.n_hat < 0) {
    return absl::InvalidArgumentError("sample count must be >= 0");
  }
  GenerationOutput out;
  out.prompt_digest = kFnvOffset;
  if (request.n_hat == 0) return out;

  const TaskDescriptor& task = *request.task;
  const int64_t c = static_cast<int64_t>(task.categories.size());
  if (c < 1) return absl::InvalidArgumentError("task has no categories");
  const int64_t per = (request.n_hat + c - 1) / c;

  std::vector<Prompt> prompts;
  prompts.reserve(per * c);
  for (int64_t cat = 0; cat < c; ++cat) {
    for (int64_t j = 0; j < per; ++j) {
      PromptRequest pr;
      pr.label = task.categories[cat];
      pr.category = static_cast<int>(cat);
      if (!task.attributes.empty()) {
        pr.attribute = task.attributes[rng.Index(task.attributes.size())];
      }
      WASP_ASSIGN_OR_RETURN(
          Prompt p, BuildPrompt(*request.tmpl, request.style, pr,
                                request.selection, rng));
      out.prompt_digest = Fnv1a(p.text, out.prompt_digest);
      out.prompt_digest = Fnv1a(std::string_view("\0", 1), out.prompt_digest);
      prompts.push_back(std::move(p));
    }
  }

  WASP_ASSIGN_OR_RETURN(std::vector<LabeledSample> generated,
                        generator.GenerateBatch(prompts, rng));
  if (generated.size() != prompts.size()) {
    return absl::InternalError(absl::StrCat(
        "generator '", generator.id(), "' returned ", generated.size(),
        " samples for ", prompts.size(), " prompts"));
  }

  std::vector<bool> drop(generated.size(), false);
  const int64_t surplus = per * c - request.n_hat;
  for (size_t cat : rng.SampleWithoutReplacement(c, surplus)) {
    drop[cat * per + rng.Index(per)] = true;
  }

  out.samples.reserve(request.n_hat);
  for (size_t i = 0; i < generated.size(); ++i) {
    if (drop[i]) continue;
    SyntheticSample s;
    s.sample = std::move(generated[i]);
    s.sample.label = prompts[i].label;
    s.sample.attribute = prompts[i].attribute;
    s.global_index =
        request.first_index + static_cast<int64_t>(out.samples.size());
    s.source_generator = generator.id();
    s.born_iteration = request.iteration;
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace wasp
