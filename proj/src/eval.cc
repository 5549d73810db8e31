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

#include "wasp/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

constexpr double kEigenClip = -1e-9;
constexpr double kConditioning = 1e-6;

using Matrix = Eigen::MatrixXd;

Matrix ToMatrix(const GaussianSummary& s) {
  const Eigen::Index d = static_cast<Eigen::Index>(s.dimension());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = s.Covariance(i, j);
  }
  return 0.5 * (m + m.transpose());
}

// Symmetric PSD square root; fails on eigenvalues below the clip threshold
// (relative to the spectrum's scale) or non-convergence.
absl::StatusOr<Matrix> SqrtPsd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigendecomposition did not converge");
  }
  Eigen::VectorXd ev = solver.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!std::isfinite(ev(i)) || ev(i) < kEigenClip * scale) {
      return absl::InternalError(
          absl::StrCat("matrix is not positive semidefinite (eigenvalue ",
                       ev(i), ")"));
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return solver.eigenvectors() * ev.asDiagonal() *
         solver.eigenvectors().transpose();
}

// tr((A B)^{1/2}) through the symmetric form A^{1/2} B A^{1/2}.
absl::StatusOr<double> TraceSqrtProduct(const Matrix& a, const Matrix& b) {
  WASP_ASSIGN_OR_RETURN(Matrix sqrt_a, SqrtPsd(a));
  Matrix inner = sqrt_a * b * sqrt_a;
  inner = 0.5 * (inner + inner.transpose());
  WASP_ASSIGN_OR_RETURN(Matrix root, SqrtPsd(inner));
  return root.trace();
}

}  // namespace

absl::StatusOr<GaussianSummary> Summarize(std::span<const Embedding> set) {
  if (set.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 vectors, got ", set.size()));
  }
  const size_t d = set[0].dimension();
  if (d == 0) return absl::InvalidArgumentError("zero-dimensional vectors");
  GaussianSummary s;
  s.mean.assign(d, 0.0);
  for (const auto& v : set) {
    if (v.dimension() != d) {
      return absl::InvalidArgumentError("vectors differ in dimension");
    }
    for (size_t i = 0; i < d; ++i) s.mean[i] += v.values[i];
  }
  const double n = static_cast<double>(set.size());
  for (double& x : s.mean) x /= n;
  s.covariance.assign(d * d, 0.0);
  std::vector<double> c(d);
  for (const auto& v : set) {
    for (size_t i = 0; i < d; ++i) c[i] = v.values[i] - s.mean[i];
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = i; j < d; ++j) s.covariance[i * d + j] += c[i] * c[j];
    }
  }
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i; j < d; ++j) {
      s.covariance[i * d + j] /= n - 1;
      s.covariance[j * d + i] = s.covariance[i * d + j];
    }
  }
  return s;
}

absl::StatusOr<double> FrechetDistance(const GaussianSummary& a,
                                       const GaussianSummary& b) {
  const size_t d = a.dimension();
  if (d == 0 || b.dimension() != d || a.covariance.size() != d * d ||
      b.covariance.size() != d * d) {
    return absl::InvalidArgumentError(
        absl::StrCat("summary dimensions differ: ", d, " vs ", b.dimension()));
  }
  double mean_term = 0;
  for (size_t i = 0; i < d; ++i) {
    const double diff = a.mean[i] - b.mean[i];
    mean_term += diff * diff;
  }
  Matrix sa = ToMatrix(a);
  Matrix sb = ToMatrix(b);
  const double trace_sum = sa.trace() + sb.trace();

  absl::StatusOr<double> cross = absl::InternalError("unset");
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) {
      sa += kConditioning * Matrix::Identity(sa.rows(), sa.cols());
      sb += kConditioning * Matrix::Identity(sb.rows(), sb.cols());
    }
    absl::StatusOr<double> ab = TraceSqrtProduct(sa, sb);
    absl::StatusOr<double> ba = TraceSqrtProduct(sb, sa);
    if (ab.ok() && ba.ok()) {
      cross = 0.5 * (*ab + *ba);
      break;
    }
    cross = ab.ok() ? ba.status() : ab.status();
  }
  if (!cross.ok()) {
    return absl::InternalError(absl::StrCat(
        "matrix square root failed after conditioning: ",
        cross.status().message()));
  }
  return std::max(0.0, mean_term + trace_sum - 2.0 * *cross);
}

absl::StatusOr<double> FrechetDistance(std::span<const Embedding> a,
                                       std::span<const Embedding> b) {
  WASP_ASSIGN_OR_RETURN(GaussianSummary sa, Summarize(a));
  WASP_ASSIGN_OR_RETURN(GaussianSummary sb, Summarize(b));
  return FrechetDistance(sa, sb);
}

absl::StatusOr<double> NearestCentroidEvaluator::Evaluate(
    const EmbeddedSet& train, const EmbeddedSet& test) {
  if (train.size() == 0 || test.size() == 0) {
    return absl::InvalidArgumentError("train and test sets must be non-empty");
  }
  if (train.labels.size() != train.size() || test.labels.size() != test.size()) {
    return absl::InvalidArgumentError("labels and vectors differ in length");
  }
  const size_t d = train.vectors[0].dimension();
  int max_label = -1;
  for (int l : train.labels) max_label = std::max(max_label, l);
  for (int l : test.labels) max_label = std::max(max_label, l);
  std::vector<std::vector<double>> centroid(max_label + 1,
                                            std::vector<double>(d, 0.0));
  std::vector<int64_t> count(max_label + 1, 0);
  for (size_t i = 0; i < train.size(); ++i) {
    const int l = train.labels[i];
    if (l < 0) return absl::InvalidArgumentError("negative train label");
    if (train.vectors[i].dimension() != d) {
      return absl::InvalidArgumentError("train vectors differ in dimension");
    }
    for (size_t k = 0; k < d; ++k) centroid[l][k] += train.vectors[i].values[k];
    ++count[l];
  }
  for (size_t l = 0; l < centroid.size(); ++l) {
    if (count[l] == 0) continue;
    for (double& x : centroid[l]) x /= static_cast<double>(count[l]);
  }
  int64_t correct = 0;
  for (size_t j = 0; j < test.size(); ++j) {
    const int truth = test.labels[j];
    if (truth < 0 || count[truth] == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "test label ", truth, " has no training samples"));
    }
    if (test.vectors[j].dimension() != d) {
      return absl::InvalidArgumentError("test vector dimension mismatch");
    }
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l < centroid.size(); ++l) {
      if (count[l] == 0) continue;
      double dist = 0;
      for (size_t k = 0; k < d; ++k) {
        const double diff = test.vectors[j].values[k] - centroid[l][k];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(l);
      }
    }
    if (best == truth) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace wasp
