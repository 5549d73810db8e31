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

#ifndef WASP_HTTP_CLIENT_H_
#define WASP_HTTP_CLIENT_H_

#include <string>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace wasp {

struct HttpOptions {
  double timeout_seconds = 60.0;
  // Additional attempts after the first on transport errors, 429 and 5xx.
  int retries = 2;
  double backoff_seconds = 0.5;
  // Sent as "Authorization: Bearer <key>" when non-empty.
  std::string api_key;
};

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://localhost:8080"
  std::string path;              // e.g. "/v1/embeddings"
};

absl::StatusOr<ParsedUrl> ParseUrl(const std::string& url);

// POSTs a JSON body and parses a JSON reply. Transport failures and retryable
// statuses that survive all attempts come back as Unavailable; other non-2xx
// replies and unparsable bodies as InvalidArgument.
absl::StatusOr<nlohmann::json> PostJson(const std::string& url,
                                        const nlohmann::json& body,
                                        const HttpOptions& options);

// Value of environment variable `name`, or empty.
std::string ReadEnv(const std::string& name);

}  // namespace wasp

#endif  // WASP_HTTP_CLIENT_H_
