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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "adlradar/features.hpp"
#include "test_util.hpp"

using namespace adlradar;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Eigen::MatrixXd naive_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

std::vector<Eigen::MatrixXd> random_images(std::size_t n, Eigen::Index eta, std::mt19937_64& rng) {
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_matrix(eta, eta, rng));
  return out;
}

Snippet cluster_snippet(int label, std::size_t eta, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.05);
  Snippet s;
  s.label = label;
  s.md = RealMatrix(eta, eta);
  s.rm = RealMatrix(eta, eta);
  for (std::size_t r = 0; r < eta; ++r)
    for (std::size_t c = 0; c < eta; ++c) {
      // Class 1 lights the upper half, class 2 the lower half.
      const bool on = (label == 1) == (r < eta / 2);
      s.md(r, c) = (on ? 1.0 : 0.0) + g(rng);
      s.rm(r, c) = (on ? 0.5 : 0.0) + g(rng);
    }
  return s;
}

}  // namespace

TEST_CASE("covariance2d") {
  std::mt19937_64 rng(1);
  SUBCASE("a single image has zero covariance") {
    const std::vector<Eigen::MatrixXd> one{random_matrix(6, 6, rng)};
    CHECK(covariance2d(one).isZero(0.0));
    const Pca2d p = pca2d_train(one, 3);
    for (Eigen::Index i = 0; i < p.eigvals.size(); ++i) CHECK(p.eigvals(i) == doctest::Approx(0.0));
  }
  SUBCASE("symmetric positive semidefinite") {
    const auto imgs = random_images(10, 16, rng);
    const Eigen::MatrixXd h = covariance2d(imgs);
    CHECK((h - h.transpose()).norm() < 1e-12);
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd v = random_matrix(16, 1, rng);
      CHECK(v.dot(h * v) >= -1e-12);
    }
  }
}

TEST_CASE("pca2d_train on an analytic 2x2 case") {
  // X1 = A + M and X2 = -A + M have mean M and H = A^T A.
  Eigen::Matrix2d a;
  a << 1.0, 2.0, 3.0, -1.0;
  Eigen::Matrix2d m;
  m << 0.5, 0.25, -2.0, 4.0;
  const std::vector<Eigen::MatrixXd> imgs{a + m, -a + m};
  const double p = 1.0 + 9.0, q = 4.0 + 1.0, r = 2.0 - 3.0;  // H = [[p, r], [r, q]]
  const double disc = std::sqrt((p - q) * (p - q) + 4.0 * r * r);
  const double l1 = 0.5 * (p + q + disc), l2 = 0.5 * (p + q - disc);

  const Pca2d pc = pca2d_train(imgs, 2);
  CHECK(pc.eigvals(0) == doctest::Approx(l1));
  CHECK(pc.eigvals(1) == doctest::Approx(l2));
  CHECK((pc.mean - m).norm() < 1e-12);
  Eigen::Vector2d v1(r, l1 - p);
  v1.normalize();
  CHECK(std::abs(v1.dot(pc.phi.col(0))) == doctest::Approx(1.0));
  for (Eigen::Index j = 0; j < 2; ++j) {
    Eigen::Index idx = 0;
    pc.phi.col(j).cwiseAbs().maxCoeff(&idx);
    CHECK(pc.phi(idx, j) > 0.0);
  }
}

TEST_CASE("pca2d contract") {
  std::mt19937_64 rng(2);
  const auto imgs = random_images(12, 20, rng);
  const Pca2d p = pca2d_train(imgs, 8);
  CHECK(p.phi.cols() == 8);
  const Eigen::MatrixXd gram = p.phi.transpose() * p.phi;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
  for (Eigen::Index i = 1; i < p.eigvals.size(); ++i) CHECK(p.eigvals(i) <= p.eigvals(i - 1));
  for (Eigen::Index i = 0; i < p.eigvals.size(); ++i) CHECK(p.eigvals(i) >= -1e-12);
  CHECK_THROWS_AS((void)pca2d_train(imgs, 21), InvalidArgument);
  CHECK_THROWS_AS((void)pca2d_train(imgs, 0), InvalidArgument);
}

TEST_CASE("project and reconstruct") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = random_matrix(16, 16, rng);
  CHECK(project(x, Eigen::MatrixXd::Identity(16, 16)) == x);
  CHECK(project(Eigen::MatrixXd::Zero(16, 16), random_matrix(16, 4, rng)).isZero(0.0));
  const Eigen::MatrixXd phi = random_matrix(16, 5, rng);
  CHECK((project(x, phi) - naive_product(x, phi)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS((void)project(x, random_matrix(15, 4, rng)), InvalidArgument);

  CHECK(reconstruct(Eigen::MatrixXd::Zero(16, 5), phi).isZero(0.0));
  Eigen::MatrixXd deficient = phi;
  deficient.col(1) = deficient.col(0);
  CHECK_THROWS_AS((void)reconstruct(Eigen::MatrixXd::Zero(16, 5), deficient), ProcessingError);

  const auto imgs = random_images(10, 16, rng);
  const Pca2d full = pca2d_train(imgs, 16);
  for (const auto& img : imgs) {
    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index d = 1; d <= 16; ++d) {
      const Eigen::MatrixXd phid = full.phi.leftCols(d);
      const double err = (img - reconstruct(project(img, phid), phid)).norm() / img.norm();
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
    CHECK(prev < 1e-6);
    CHECK(project(img, full.phi.leftCols(4)).norm() <= img.norm() + 1e-12);
  }
}

TEST_CASE("fuse and select_dims") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd a = random_matrix(128, 14, rng);
  const Eigen::MatrixXd b = random_matrix(128, 4, rng);
  const Eigen::VectorXd v = fuse(a, b);
  CHECK(v.size() == 2304);
  CHECK(v(1) == a(1, 0));    // column-major
  CHECK(v(128) == a(0, 1));
  CHECK(v(128 * 14) == b(0, 0));
  const auto [a2, b2] = unfuse(v, 128, 14, 4);
  CHECK(a2 == a);
  CHECK(b2 == b);
  CHECK(fuse(Eigen::MatrixXd::Zero(8, 2), Eigen::MatrixXd::Zero(8, 1)).isZero(0.0));

  const Eigen::VectorXd s = select_dims(v, 128, {14, 4}, {2, 1});
  REQUIRE(s.size() == 128 * 3);
  CHECK(s.head(256) == v.head(256));
  CHECK(s.tail(128) == v.segment(128 * 14, 128));
  CHECK_THROWS_AS((void)select_dims(v, 128, {14, 4}, {15, 4}), InvalidArgument);
}

TEST_CASE("nearest neighbour classification") {
  std::mt19937_64 rng(5);
  std::vector<Snippet> train, test;
  for (int label : {1, 2})
    for (int i = 0; i < 15; ++i) (i < 10 ? train : test).push_back(cluster_snippet(label, 16, rng));
  const FeatureModel model = train_model(train, {4, 2});
  const std::vector<int> both{1, 2};

  SUBCASE("training vectors classify to their own label") {
    for (const auto& e : model.train) {
      const Classification c = nn_classify(e.vec, model, both, model.dims);
      CHECK(c.label == e.label);
      CHECK(c.d1 == 0.0);
      CHECK(c.margin == doctest::Approx(1.0));
    }
  }
  SUBCASE("separated clusters are classified perfectly") {
    const ConfusionMatrix cm = evaluate(model, test, both, model.dims);
    CHECK(cm.accuracy() == 1.0);
    CHECK(cm.rates(0, 0) == 100.0);
    CHECK(cm.rates(1, 1) == 100.0);
  }
  SUBCASE("class set filters the candidates") {
    const std::vector<int> only2{2};
    const Classification c = nn_classify(model.features(test.front()), model, only2, model.dims);
    CHECK(test.front().label == 1);
    CHECK(c.label == 2);
    CHECK(c.margin == 1.0);
    const std::vector<int> none{7};
    CHECK_THROWS_AS((void)nn_classify(model.features(test.front()), model, none, model.dims), InvalidArgument);
  }
  SUBCASE("margin uses the nearest vector of another class") {
    const Eigen::VectorXd q = model.features(test.front());
    const Classification c = nn_classify(q, model, both, model.dims);
    double d1 = 1e300, d2 = 1e300;
    for (const auto& e : model.train) {
      const double d = (e.vec - q).norm();
      if (e.label == c.label) d1 = std::min(d1, d);
      else d2 = std::min(d2, d);
    }
    CHECK(c.d1 == doctest::Approx(d1));
    CHECK(c.d2 == doctest::Approx(d2));
    CHECK(c.margin == doctest::Approx((d2 - d1) / d2));
  }
}

TEST_CASE("confusion matrices") {
  const std::vector<int> classes{3, 5, 9};
  std::vector<std::pair<int, int>> perfect{{3, 3}, {5, 5}, {9, 9}, {9, 9}};
  const ConfusionMatrix id = confusion_from_pairs(classes, perfect);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(id.rates(i, j) == (i == j ? 100.0 : 0.0));

  const std::vector<int> two{1, 2};
  const std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}, {2, 2}};
  const ConfusionMatrix cm = confusion_from_pairs(two, pairs);
  CHECK(cm.counts.rows() == 2);
  CHECK(cm.counts.cols() == 2);
  CHECK(cm.rates(0, 1) == 50.0);

  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> lab(1, 15);
  std::vector<int> all(15);
  for (int i = 0; i < 15; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  std::vector<std::pair<int, int>> noisy;
  for (int i = 0; i < 500; ++i) noisy.emplace_back(lab(rng), lab(rng));
  const ConfusionMatrix big = confusion_from_pairs(all, noisy);
  std::vector<std::size_t> row_count(15, 0);
  for (const auto& [t, p] : noisy) ++row_count[static_cast<std::size_t>(t - 1)];
  for (std::size_t i = 0; i < 15; ++i) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < 15; ++j) {
      s += big.rates(i, j);
      n += big.counts(i, j);
    }
    CHECK(n == row_count[i]);
    if (n > 0) CHECK(std::abs(s - 100.0) <= 0.1);
  }
  CHECK_THROWS_AS((void)confusion_from_pairs(two, std::vector<std::pair<int, int>>{{4, 1}}), InvalidArgument);
}

TEST_CASE("model file round-trip is deterministic") {
  std::mt19937_64 rng(7);
  std::vector<Snippet> train;
  for (int label : {1, 2})
    for (int i = 0; i < 10; ++i) train.push_back(cluster_snippet(label, 16, rng));
  const auto dir = std::filesystem::temp_directory_path();
  const auto p1 = dir / "adlradar_model_a.pca2";
  const auto p2 = dir / "adlradar_model_b.pca2";
  write_model(p1, train_model(train, {5, 3}));
  write_model(p2, train_model(train, {5, 3}));
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);

  const FeatureModel back = read_model(p1);
  CHECK(back.eta == 16);
  CHECK(back.dims == FeatureDims{5, 3});
  CHECK(back.train.size() == 20);
  const Eigen::MatrixXd gram = back.md.phi.transpose() * back.md.phi;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-5);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}
