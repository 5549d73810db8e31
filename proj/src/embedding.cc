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

#include "wasp/embedding.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "wasp/random.h"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

using json = nlohmann::json;

constexpr std::string_view kSimPrefix = "sim:";

}  // namespace

absl::StatusOr<std::string> Embedder::Decode(const Embedding&) const {
  return absl::UnimplementedError(
      "decoding vectors to text is only supported by the simulation embedder");
}

absl::StatusOr<std::vector<Embedding>> EmbedSamples(
    Embedder& embedder, std::span<const LabeledSample> samples) {
  std::vector<std::string> texts;
  texts.reserve(samples.size());
  for (const auto& s : samples) texts.push_back(s.text);
  return embedder.EmbedBatch(texts);
}

SimulationEmbedder::SimulationEmbedder(int dimension, uint64_t seed)
    : dimension_(dimension), seed_(seed) {}

absl::StatusOr<Embedding> SimulationEmbedder::EmbedText(
    std::string_view text) const {
  Embedding v;
  v.values.reserve(dimension_);
  if (text.starts_with(kSimPrefix)) {
    const char* p = text.data() + kSimPrefix.size();
    const char* end = text.data() + text.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0;
      const auto [next, ec] = std::from_chars(p, end, x, std::chars_format::hex);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        return absl::InvalidArgumentError(
            absl::StrCat("malformed simulation text near offset ",
                         p - text.data()));
      }
      if (!std::isfinite(x)) {
        return absl::InvalidArgumentError("non-finite simulation component");
      }
      v.values.push_back(x);
      p = next;
    }
    if (static_cast<int>(v.values.size()) != dimension_) {
      return absl::InvalidArgumentError(absl::StrCat(
          "simulation text has ", v.values.size(), " components, expected ",
          dimension_));
    }
    return v;
  }
  const uint64_t h = Fnv1a(text) ^ SplitMix64(seed_);
  for (int i = 0; i < dimension_; ++i) {
    const uint64_t x = SplitMix64(h + 0x9e3779b97f4a7c15ULL * (i + 1));
    const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
    v.values.push_back(2.0 * u - 1.0);
  }
  return v;
}

absl::StatusOr<std::vector<Embedding>> SimulationEmbedder::EmbedBatch(
    std::span<const std::string> texts) {
  if (texts.empty()) return absl::InvalidArgumentError("empty embedding batch");
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    WASP_ASSIGN_OR_RETURN(Embedding v, EmbedText(t));
    out.push_back(std::move(v));
  }
  return out;
}

absl::StatusOr<std::string> SimulationEmbedder::Decode(
    const Embedding& v) const {
  if (static_cast<int>(v.dimension()) != dimension_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "vector has length ", v.dimension(), ", embedder dimension is ",
        dimension_));
  }
  std::string text(kSimPrefix);
  char buf[64];
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      return absl::InvalidArgumentError("cannot encode non-finite component");
    }
    const auto [end, ec] =
        std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::hex);
    if (ec != std::errc()) return absl::InternalError("to_chars failed");
    text.push_back(' ');
    text.append(buf, end);
  }
  return text;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options)
    : options_(std::move(options)) {
  if (options_.http.api_key.empty()) {
    options_.http.api_key = ReadEnv(options_.api_key_env);
  }
}

int64_t HttpEmbedder::remote_fetches() const {
  std::lock_guard<std::mutex> lock(mu_);
  return remote_fetches_;
}

std::string HttpEmbedder::CachePath(const std::string& text) const {
  const uint64_t h = Fnv1a(text, Fnv1a(options_.model + '\0'));
  return (std::filesystem::path(options_.cache_dir) /
          absl::StrFormat("%016x.json", h))
      .string();
}

std::optional<Embedding> HttpEmbedder::CacheLookup(
    const std::string& text) const {
  if (options_.cache_dir.empty()) return std::nullopt;
  std::ifstream in(CachePath(text), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    // Hash collisions fall through to a refetch.
    if (j.at("model") != options_.model || j.at("text") != text) {
      return std::nullopt;
    }
    Embedding v{j.at("embedding").get<std::vector<double>>()};
    if (static_cast<int>(v.dimension()) != options_.dimension) {
      return std::nullopt;
    }
    return v;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void HttpEmbedder::CacheStore(const std::string& text, const Embedding& v) {
  if (options_.cache_dir.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  std::error_code ec;
  std::filesystem::create_directories(options_.cache_dir, ec);
  const std::string path = CachePath(text);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    json j = {{"model", options_.model}, {"text", text},
              {"embedding", v.values}};
    out << j.dump(-1, ' ', false, json::error_handler_t::replace);
  }
  std::filesystem::rename(tmp, path, ec);
}

absl::StatusOr<std::vector<Embedding>> HttpEmbedder::Fetch(
    const std::vector<std::string>& texts) {
  json body = {{"model", options_.model}, {"input", texts}};
  WASP_ASSIGN_OR_RETURN(json reply,
                        PostJson(options_.endpoint, body, options_.http));
  std::vector<Embedding> out(texts.size());
  std::vector<bool> filled(texts.size(), false);
  try {
    const json& data = reply.at("data");
    if (!data.is_array() || data.size() != texts.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "embedding reply has ", data.size(), " items for ", texts.size(),
          " inputs"));
    }
    for (size_t i = 0; i < data.size(); ++i) {
      const size_t slot =
          data[i].contains("index") ? data[i]["index"].get<size_t>() : i;
      if (slot >= out.size() || filled[slot]) {
        return absl::InvalidArgumentError("embedding reply has bad indices");
      }
      out[slot].values = data[i].at("embedding").get<std::vector<double>>();
      filled[slot] = true;
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed embedding reply: ", e.what()));
  }
  for (const auto& v : out) {
    if (static_cast<int>(v.dimension()) != options_.dimension) {
      return absl::DataLossError(absl::StrCat(
          "embedding backend returned dimension ", v.dimension(),
          ", binding declares ", options_.dimension));
    }
    for (double x : v.values) {
      if (!std::isfinite(x)) {
        return absl::InvalidArgumentError("non-finite embedding component");
      }
    }
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    remote_fetches_ += static_cast<int64_t>(out.size());
  }
  return out;
}

absl::StatusOr<std::vector<Embedding>> HttpEmbedder::EmbedBatch(
    std::span<const std::string> texts) {
  if (texts.empty()) return absl::InvalidArgumentError("empty embedding batch");
  std::vector<Embedding> out(texts.size());
  std::vector<size_t> missing;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = CacheLookup(texts[i])) {
      out[i] = std::move(*hit);
    } else {
      missing.push_back(i);
    }
  }
  const size_t batch = static_cast<size_t>(std::max(1, options_.max_batch));
  for (size_t start = 0; start < missing.size(); start += batch) {
    const size_t stop = std::min(missing.size(), start + batch);
    std::vector<std::string> chunk;
    for (size_t k = start; k < stop; ++k) chunk.push_back(texts[missing[k]]);
    WASP_ASSIGN_OR_RETURN(std::vector<Embedding> fetched, Fetch(chunk));
    for (size_t k = start; k < stop; ++k) {
      CacheStore(texts[missing[k]], fetched[k - start]);
      out[missing[k]] = std::move(fetched[k - start]);
    }
  }
  return out;
}

}  // namespace wasp
