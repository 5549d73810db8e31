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

#ifndef WASP_EMBEDDING_H_
#define WASP_EMBEDDING_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wasp/http_client.h"
#include "wasp/types.h"

namespace wasp {

// Maps sample text to a fixed-dimension vector. Implementations are pure
// functions of (binding, text) and safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual int dimension() const = 0;

  // One vector per input, in order. Empty input is an error.
  virtual absl::StatusOr<std::vector<Embedding>> EmbedBatch(
      std::span<const std::string> texts) = 0;

  // Text whose embedding is exactly `v`. Only the simulation embedder can do
  // this; others return Unimplemented.
  virtual absl::StatusOr<std::string> Decode(const Embedding& v) const;
};

absl::StatusOr<std::vector<Embedding>> EmbedSamples(
    Embedder& embedder, std::span<const LabeledSample> samples);

// Deterministic embedder for simulation runs. A text of the form
//   "sim: <c_0> <c_1> ... <c_{d-1}>"
// with each component written as a hexadecimal float embeds to exactly those
// components; Decode produces such texts. Any other text embeds to a
// pseudo-random vector in [-1, 1)^d derived from its bytes and the seed.
class SimulationEmbedder : public Embedder {
 public:
  SimulationEmbedder(int dimension, uint64_t seed);

  int dimension() const override { return dimension_; }
  absl::StatusOr<std::vector<Embedding>> EmbedBatch(
      std::span<const std::string> texts) override;
  absl::StatusOr<std::string> Decode(const Embedding& v) const override;

  absl::StatusOr<Embedding> EmbedText(std::string_view text) const;

 private:
  int dimension_;
  uint64_t seed_;
};

struct HttpEmbedderOptions {
  // OpenAI-compatible embeddings URL, e.g. http://host/v1/embeddings.
  std::string endpoint;
  std::string model;
  int dimension = 0;
  // Empty disables the on-disk cache.
  std::string cache_dir;
  std::string api_key_env;
  int max_batch = 64;
  HttpOptions http;
};

// Embeddings from a remote service, cached on disk by (model, content hash)
// so replays see identical vectors.
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderOptions options);

  int dimension() const override { return options_.dimension; }
  absl::StatusOr<std::vector<Embedding>> EmbedBatch(
      std::span<const std::string> texts) override;

  // Number of vectors fetched over the network so far.
  int64_t remote_fetches() const;

 private:
  std::string CachePath(const std::string& text) const;
  std::optional<Embedding> CacheLookup(const std::string& text) const;
  void CacheStore(const std::string& text, const Embedding& v);
  absl::StatusOr<std::vector<Embedding>> Fetch(
      const std::vector<std::string>& texts);

  HttpEmbedderOptions options_;
  mutable std::mutex mu_;
  int64_t remote_fetches_ = 0;
};

}  // namespace wasp

#endif  // WASP_EMBEDDING_H_
