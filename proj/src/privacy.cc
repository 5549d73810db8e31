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

#include "wasp/privacy.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "wasp/status_macros.h"

namespace wasp {

std::string_view PrivacyLevelName(PrivacyLevel level) {
  return level == PrivacyLevel::kUser ? "user" : "sample";
}

absl::StatusOr<PrivacyLevel> ParsePrivacyLevel(std::string_view name) {
  if (name == "sample") return PrivacyLevel::kSample;
  if (name == "user") return PrivacyLevel::kUser;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown privacy level '", std::string(name), "'"));
}

absl::Status PrivacyBudget::Validate() const {
  if (!infinite_epsilon && !(epsilon > 0 && std::isfinite(epsilon))) {
    return absl::InvalidArgumentError("epsilon must be finite and positive");
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (iterations < 2) {
    return absl::InvalidArgumentError(
        "T must be at least 2: with T < 2 no feedback round exists");
  }
  if (parties < 1) {
    return absl::InvalidArgumentError("party count L must be at least 1");
  }
  if (level == PrivacyLevel::kUser &&
      (!max_party_size.has_value() || *max_party_size < 1)) {
    return absl::InvalidArgumentError(
        "user-level privacy requires max_party_size >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Sensitivity(PrivacyLevel level,
                                   std::optional<int> max_party_size) {
  if (level == PrivacyLevel::kSample) return kSampleSensitivity;
  if (!max_party_size.has_value() || *max_party_size < 1) {
    return absl::InvalidArgumentError(
        "user-level sensitivity requires max_party_size >= 1");
  }
  return kSampleSensitivity * *max_party_size;
}

absl::StatusOr<double> CalibrateSigma(const PrivacyBudget& budget) {
  WASP_RETURN_IF_ERROR(budget.Validate());
  if (budget.infinite_epsilon) return 0.0;
  WASP_ASSIGN_OR_RETURN(double sensitivity,
                        Sensitivity(budget.level, budget.max_party_size));
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / budget.delta)) *
         std::sqrt(static_cast<double>(budget.iterations - 1)) /
         (budget.epsilon * std::sqrt(static_cast<double>(budget.parties)));
}

double AggregateNoiseScale(double sigma_local, int parties) {
  return sigma_local * std::sqrt(static_cast<double>(parties));
}

double VoteMassPerSample(int q) { return 2.0 - std::ldexp(1.0, -(q - 1)); }

absl::StatusOr<CompositionReport> VerifyComposition(
    const PrivacyBudget& budget) {
  WASP_RETURN_IF_ERROR(budget.Validate());
  CompositionReport r;
  WASP_ASSIGN_OR_RETURN(r.sensitivity,
                        Sensitivity(budget.level, budget.max_party_size));
  r.releases = budget.iterations - 1;
  r.per_round_epsilon =
      budget.infinite_epsilon
          ? HUGE_VAL
          : budget.epsilon / std::sqrt(static_cast<double>(r.releases));

  PrivacyBudget single = budget;
  single.parties = 1;
  WASP_ASSIGN_OR_RETURN(r.sigma_total, CalibrateSigma(single));
  WASP_ASSIGN_OR_RETURN(r.sigma_local, CalibrateSigma(budget));
  r.aggregate_sigma = AggregateNoiseScale(r.sigma_local, budget.parties);
  r.consistent =
      std::abs(r.aggregate_sigma - r.sigma_total) <= 1e-12 * r.sigma_total;
  return r;
}

PrivacyAccountant::PrivacyAccountant(int iterations)
    : iterations_(iterations) {}

absl::Status PrivacyAccountant::RecordRelease(int iteration) {
  if (iteration < 0 || iteration > iterations_ - 2) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no noised release is budgeted for iteration ", iteration,
        " (releases happen at iterations 0..", iterations_ - 2, ")"));
  }
  if (iteration <= last_round_) {
    return absl::FailedPreconditionError(absl::StrCat(
        "iteration ", iteration, " already released its histograms"));
  }
  last_round_ = iteration;
  ++releases_;
  return absl::OkStatus();
}

absl::Status PrivacyAccountant::Finish() const {
  if (releases_ != iterations_ - 1) {
    return absl::FailedPreconditionError(
        absl::StrCat("run made ", releases_, " noised releases, budget covers ",
                     iterations_ - 1));
  }
  return absl::OkStatus();
}

}  // namespace wasp
