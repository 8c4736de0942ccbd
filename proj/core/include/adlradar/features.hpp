// Copyright 2026 The adlradar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adlradar/common.hpp"

namespace adlradar {

/// Paired micro-Doppler and range-map images of one motion, both eta x eta.
struct Snippet {
  RealMatrix md;
  RealMatrix rm;
  int label = 0;
  bool center_shifted = false;
};

[[nodiscard]] Eigen::MatrixXd to_eigen(const RealMatrix& m);
[[nodiscard]] RealMatrix from_eigen(const Eigen::MatrixXd& m);

/// H = (1/I) sum (X - mean)^T (X - mean).
[[nodiscard]] Eigen::MatrixXd covariance2d(std::span<const Eigen::MatrixXd> images, Eigen::MatrixXd* mean = nullptr);

struct Pca2d {
  Eigen::MatrixXd mean;     // eta x eta
  Eigen::MatrixXd phi;      // eta x d, orthonormal columns
  Eigen::VectorXd eigvals;  // d, descending
};

/// Top-d eigenvectors of H; each column's largest-magnitude entry is positive.
[[nodiscard]] Pca2d pca2d_train(std::span<const Eigen::MatrixXd> images, std::size_t d);

/// Y = X * phi.
[[nodiscard]] Eigen::MatrixXd project(const Eigen::MatrixXd& x, const Eigen::MatrixXd& phi);
/// X^ = Y (phi^T phi)^-1 phi^T. Throws if phi is rank deficient.
[[nodiscard]] Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& y, const Eigen::MatrixXd& phi);

/// Column-major vectorization of both projections, micro-Doppler first.
[[nodiscard]] Eigen::VectorXd fuse(const Eigen::MatrixXd& y_md, const Eigen::MatrixXd& y_rm);
[[nodiscard]] std::pair<Eigen::MatrixXd, Eigen::MatrixXd> unfuse(const Eigen::VectorXd& v, std::size_t eta,
                                                                 std::size_t d_md, std::size_t d_rm);

struct FeatureDims {
  std::size_t d_md = 14;
  std::size_t d_rm = 4;
  bool operator==(const FeatureDims&) const = default;
};

/// Restricts a fused vector built with `full` dims to the leading `use` columns of each part.
[[nodiscard]] Eigen::VectorXd select_dims(const Eigen::VectorXd& v, std::size_t eta, FeatureDims full, FeatureDims use);

struct TrainEntry {
  int label = 0;
  Eigen::VectorXd vec;
};

struct FeatureModel {
  std::size_t eta = 128;
  FeatureDims dims;
  Pca2d md;
  Pca2d rm;
  std::vector<TrainEntry> train;

  /// Fused vector of a snippet at the model's full dims.
  [[nodiscard]] Eigen::VectorXd features(const Snippet& s) const;
};

[[nodiscard]] FeatureModel train_model(std::span<const Snippet> snippets, FeatureDims dims);

struct Classification {
  int label = 0;
  double margin = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Nearest neighbour among training vectors whose label is in `class_set`,
/// using the leading `use` dims. margin = (d2 - d1) / d2 with d2 the nearest
/// distance from a different class (1 when only one class is eligible).
[[nodiscard]] Classification nn_classify(const Eigen::VectorXd& query, const FeatureModel& model,
                                         std::span<const int> class_set, FeatureDims use, std::size_t k = 1);

struct ConfusionMatrix {
  std::vector<int> classes;
  Matrix<std::size_t> counts;
  RealMatrix rates;  // row-normalized percentages; rows are true classes

  [[nodiscard]] double accuracy() const;
};

[[nodiscard]] ConfusionMatrix confusion_from_pairs(std::span<const int> classes,
                                                   std::span<const std::pair<int, int>> truth_pred);

/// Classifies every test snippet against `class_set`.
[[nodiscard]] ConfusionMatrix evaluate(const FeatureModel& model, std::span<const Snippet> test,
                                       std::span<const int> class_set, FeatureDims use, std::size_t k = 1);

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& names = {});

/// PCA2: "PCA2", u32 eta, u32 d_md, u32 d_rm, means, phi matrices and
/// eigenvalues (column-major), u32 count, then (u32 label, vector) entries.
/// All values f32 little-endian.
void write_model(const std::filesystem::path& path, const FeatureModel& model);
[[nodiscard]] FeatureModel read_model(const std::filesystem::path& path);

}  // namespace adlradar
