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

#ifndef WASP_PRIVACY_H_
#define WASP_PRIVACY_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace wasp {

// l2 sensitivity of one vote histogram to adding or removing one private
// sample: the decaying Top-Q weights sum to 2 - 2^-(Q-1) < 2.
inline constexpr double kPerHistogramSensitivity = 2.0;
// Both histograms together.
inline constexpr double kSampleSensitivity = 4.0;

enum class PrivacyLevel { kSample, kUser };

std::string_view PrivacyLevelName(PrivacyLevel level);
absl::StatusOr<PrivacyLevel> ParsePrivacyLevel(std::string_view name);

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
  // Generation iterations T; T-1 of them release noised histograms.
  int iterations = 2;
  // Number of data parties L.
  int parties = 1;
  PrivacyLevel level = PrivacyLevel::kSample;
  // Largest number of samples one party may hold; required at user level.
  std::optional<int> max_party_size;
  // epsilon = infinity: the mechanism runs with zero noise.
  bool infinite_epsilon = false;

  absl::Status Validate() const;
};

// Delta: 4 at sample level, 4 * max_party_size at user level.
absl::StatusOr<double> Sensitivity(PrivacyLevel level,
                                   std::optional<int> max_party_size);

// Per-party Gaussian noise scale
//   sigma = Delta * sqrt(2 ln(1.25 / delta)) * sqrt(T - 1) / (epsilon sqrt(L)).
// Zero when epsilon is infinite.
absl::StatusOr<double> CalibrateSigma(const PrivacyBudget& budget);

// Scale of the sum of `parties` independent N(0, sigma_local^2) draws.
double AggregateNoiseScale(double sigma_local, int parties);

// Sum of the decaying vote weights one private sample spends per histogram.
double VoteMassPerSample(int q);

struct CompositionReport {
  double sensitivity = 0;
  int releases = 0;
  // Budget each noised release must meet so that T-1 releases compose to
  // epsilon under sqrt(k) Gaussian composition.
  double per_round_epsilon = 0;
  // Single-party calibration (L = 1).
  double sigma_total = 0;
  // Per-party calibration actually applied.
  double sigma_local = 0;
  // sigma_local * sqrt(L); equals sigma_total when the calibration composes.
  double aggregate_sigma = 0;
  bool consistent = false;
};

absl::StatusOr<CompositionReport> VerifyComposition(const PrivacyBudget& budget);

// Counts noised histogram releases for one run and refuses anything beyond
// one release per feedback round (rounds 0 .. T-2).
class PrivacyAccountant {
 public:
  explicit PrivacyAccountant(int iterations);

  absl::Status RecordRelease(int iteration);
  int releases() const { return releases_; }
  int expected_releases() const { return iterations_ - 1; }
  // OK iff exactly T-1 releases were recorded.
  absl::Status Finish() const;

 private:
  int iterations_;
  int releases_ = 0;
  int last_round_ = -1;
};

}  // namespace wasp

#endif  // WASP_PRIVACY_H_
