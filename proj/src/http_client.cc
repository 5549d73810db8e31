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

#include "wasp/http_client.h"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "absl/strings/str_cat.h"
#include "httplib.h"

namespace wasp {

absl::StatusOr<ParsedUrl> ParseUrl(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("URL '", url, "' has no scheme"));
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported URL scheme '", scheme, "'"));
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  if (path_start == std::string::npos) {
    parsed.scheme_host_port = url;
    parsed.path = "/";
  } else {
    parsed.scheme_host_port = url.substr(0, path_start);
    parsed.path = url.substr(path_start);
  }
  if (parsed.scheme_host_port.size() <= scheme_end + 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("URL '", url, "' has no host"));
  }
  return parsed;
}

absl::StatusOr<nlohmann::json> PostJson(const std::string& url,
                                        const nlohmann::json& body,
                                        const HttpOptions& options) {
  auto parsed = ParseUrl(url);
  if (!parsed.ok()) return parsed.status();

  httplib::Client client(parsed->scheme_host_port);
  const auto timeout = std::chrono::duration<double>(options.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!options.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options.api_key);
  }
  const std::string payload =
      body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  std::string last_error;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(
          options.backoff_seconds * (1 << (attempt - 1))));
    }
    auto res = client.Post(parsed->path, headers, payload, "application/json");
    if (!res) {
      last_error = absl::StrCat("transport error: ",
                                httplib::to_string(res.error()));
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = absl::StrCat("HTTP ", res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      return absl::InvalidArgumentError(
          absl::StrCat(url, ": HTTP ", res->status, ": ", res->body));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(url, ": unparsable reply: ", e.what()));
    }
  }
  return absl::UnavailableError(absl::StrCat(
      url, ": ", last_error, " after ", options.retries + 1, " attempts"));
}

std::string ReadEnv(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v == nullptr ? std::string() : std::string(v);
}

}  // namespace wasp
