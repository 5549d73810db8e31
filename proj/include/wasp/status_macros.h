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

#ifndef WASP_STATUS_MACROS_H_
#define WASP_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define WASP_STATUS_CONCAT_INNER_(x, y) x##y
#define WASP_STATUS_CONCAT_(x, y) WASP_STATUS_CONCAT_INNER_(x, y)

#define WASP_RETURN_IF_ERROR(expr)                 \
  do {                                             \
    const absl::Status wasp_status_ = (expr);      \
    if (!wasp_status_.ok()) return wasp_status_;   \
  } while (0)

#define WASP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = std::move(statusor).value()

#define WASP_ASSIGN_OR_RETURN(lhs, rexpr) \
  WASP_ASSIGN_OR_RETURN_IMPL_(            \
      WASP_STATUS_CONCAT_(wasp_statusor_, __LINE__), lhs, rexpr)

#endif  // WASP_STATUS_MACROS_H_
