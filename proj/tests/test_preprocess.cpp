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

#include <algorithm>
#include <cmath>
#include <random>

#include "adlradar/preprocess.hpp"
#include "test_util.hpp"

using namespace adlradar;
using namespace adlradar::testing;

namespace {

std::size_t nonzeros(const RealMatrix& m) {
  return static_cast<std::size_t>(std::count_if(m.data().begin(), m.data().end(), [](double v) { return v != 0.0; }));
}

// Keeps pixels whose histogram bin index lies among the `keep` highest of
// `bins` equal-width bins over the nonzero range.
RealMatrix threshold_oracle(const RealMatrix& img, std::size_t bins, std::size_t keep) {
  std::vector<double> nz;
  for (double v : img.data())
    if (v != 0.0) nz.push_back(v);
  RealMatrix out = img;
  if (nz.empty()) return out;
  const auto [mn, mx] = std::minmax_element(nz.begin(), nz.end());
  const double width = (*mx - *mn) / static_cast<double>(bins);
  for (double& v : out.data()) {
    if (v == 0.0) continue;
    const auto b = std::min(static_cast<std::size_t>((v - *mn) / width), bins - 1);
    if (b < bins - keep) v = 0.0;
  }
  return out;
}

}  // namespace

TEST_CASE("column_normalize") {
  RealMatrix m(2, 3);
  m(0, 0) = 2.0;
  m(1, 0) = 4.0;
  m(0, 1) = 3.0;
  m(1, 1) = 3.0;
  const RealMatrix n = column_normalize(m);
  CHECK(n(0, 0) == 0.5);
  CHECK(n(1, 0) == 1.0);
  CHECK(n(0, 1) == 1.0);
  CHECK(n(1, 1) == 1.0);
  CHECK(n(0, 2) == 0.0);
  CHECK(n(1, 2) == 0.0);

  std::mt19937_64 rng(11);
  const RealMatrix r = column_normalize(random_image(40, 50, rng, 0.4));
  for (std::size_t c = 0; c < r.cols(); ++c) {
    double mx = 0.0;
    for (std::size_t row = 0; row < r.rows(); ++row) mx = std::max(mx, r(row, c));
    CHECK((mx == 1.0 || mx == 0.0));
  }
}

TEST_CASE("floor_reference clips at the median") {
  RealMatrix m(1, 5);
  m.data() = {-120.0, -60.0, -50.0, -40.0, -10.0};
  const RealMatrix f = floor_reference(m);
  CHECK(f.data() == std::vector<double>{0.0, 0.0, 0.0, 10.0, 40.0});
}

TEST_CASE("eclean") {
  SUBCASE("keeping every bin is the identity") {
    std::mt19937_64 rng(1);
    const RealMatrix img = random_image(30, 30, rng);
    CHECK(eclean_bins(img, 100, 100) == img);
  }
  SUBCASE("two-level histogram") {
    RealMatrix img(1, 1005, 1.0);
    for (std::size_t i = 0; i < 5; ++i) img(0, i * 200) = 10.0;
    const RealMatrix out = eclean_bins(img, 100, 20);
    for (std::size_t i = 0; i < img.cols(); ++i) CHECK(out(0, i) == (img(0, i) == 10.0 ? 10.0 : 0.0));
  }
  SUBCASE("range-map mode matches the explicit histogram oracle") {
    std::mt19937_64 rng(2);
    CleanParams p;
    for (int trial = 0; trial < 20; ++trial) {
      const RealMatrix img = random_image(64, 64, rng, 0.5);
      CHECK(eclean(img, p, CleanMode::RangeMap) == threshold_oracle(img, 100, 20));
    }
  }
  SUBCASE("support shrinks and grows monotonically with the kept bins") {
    std::mt19937_64 rng(3);
    const RealMatrix img = random_image(50, 50, rng, 0.6);
    RealMatrix prev = eclean_bins(img, 100, 1);
    for (std::size_t keep = 2; keep <= 100; ++keep) {
      const RealMatrix cur = eclean_bins(img, 100, keep);
      CHECK(nonzeros(cur) <= nonzeros(img));
      for (std::size_t i = 0; i < img.size(); ++i) {
        if (prev.data()[i] != 0.0) CHECK(cur.data()[i] == img.data()[i]);
        CHECK((cur.data()[i] == 0.0 || cur.data()[i] == img.data()[i]));
      }
      prev = cur;
    }
  }
  CHECK(eclean_kept_bins(CleanParams{}, CleanMode::Spectrogram) == 60);
  CHECK_THROWS_AS((void)eclean_bins(RealMatrix(2, 2), 10, 11), InvalidArgument);
}

TEST_CASE("remove_outliers") {
  SUBCASE("isolated pixel is removed") {
    RealMatrix img(10, 10);
    img(4, 4) = 1.0;
    CHECK(nonzeros(remove_outliers(img, 50)) == 0);
  }
  SUBCASE("a component of exactly min_pixels is kept") {
    RealMatrix img(20, 20);
    for (std::size_t i = 0; i < 50; ++i) img(i / 10, i % 10) = 1.0;
    CHECK(remove_outliers(img, 50) == img);
    CHECK(nonzeros(remove_outliers(img, 51)) == 0);
  }
  SUBCASE("diagonal neighbours are connected") {
    RealMatrix img(5, 5);
    for (std::size_t i = 0; i < 5; ++i) img(i, i) = 1.0;
    CHECK(remove_outliers(img, 5) == img);
  }
  SUBCASE("matches a union-find oracle and is idempotent") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      const RealMatrix img = random_image(40, 60, rng, 0.35);
      const RealMatrix out = remove_outliers(img, 12);
      CHECK(out == union_find_area_open(img, 12));
      CHECK(remove_outliers(out, 12) == out);
    }
  }
}

TEST_CASE("kernel_clean") {
  SUBCASE("horizontal six-row line is kept and a nearer stray blob dropped") {
    // Trace with win = 6: the farthest nonzero row is 25, so m starts at 24.
    // Block 1 (rows 20..25) holds the whole line and wins, m moves to 26;
    // from there the lower block (rows 20..25) wins and m settles at 25.
    RealMatrix img(40, 30);
    for (std::size_t r = 20; r <= 25; ++r)
      for (std::size_t c = 0; c < 30; ++c) img(r, c) = 1.0;
    RealMatrix noisy = img;
    noisy(3, 10) = 0.7;
    noisy(4, 11) = 0.7;
    CHECK(kernel_clean(noisy, 6) == img);
  }
  SUBCASE("all-zero input") {
    CHECK(kernel_clean(RealMatrix(20, 20), 6) == RealMatrix(20, 20));
  }
  SUBCASE("a disjoint nearer noise line is not followed") {
    RealMatrix img(60, 40);
    for (std::size_t c = 0; c < 40; ++c) {
      const std::size_t top = 40 - c / 4;  // slowly approaching target
      for (std::size_t r = top; r < top + 6; ++r) img(r, c) = 1.0;
      for (std::size_t r = 10; r < 13; ++r) img(r, c) = 0.8;
    }
    const RealMatrix out = kernel_clean(img, 6);
    for (std::size_t c = 0; c < 40; ++c)
      for (std::size_t r = 10; r < 13; ++r) CHECK(out(r, c) == 0.0);
    CHECK(nonzeros(out) > 0);
  }
  SUBCASE("overlapping kernels bound each column to 2 win - 1 rows") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
      const RealMatrix out = kernel_clean(random_image(48, 60, rng, 0.3), 6);
      for (std::size_t c = 0; c < out.cols(); ++c) {
        std::size_t lo = out.rows(), hi = 0;
        for (std::size_t r = 0; r < out.rows(); ++r)
          if (out(r, c) != 0.0) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
          }
        if (lo <= hi) CHECK(hi - lo + 1 <= 11);
      }
    }
  }
  CHECK_THROWS_AS((void)kernel_clean(RealMatrix(5, 5), 6), InvalidArgument);
}

TEST_CASE("cleaning is non-amplifying") {
  std::mt19937_64 rng(8);
  RealMatrix db(64, 96);
  std::normal_distribution<double> noise(-60.0, 3.0);
  for (double& v : db.data()) v = noise(rng);
  for (std::size_t c = 0; c < db.cols(); ++c)
    for (std::size_t r = 30; r < 36; ++r) db(r, c) = -20.0;
  CleanParams p;
  const RealMatrix md = clean_spectrogram(db, p);
  const RealMatrix ref = floor_reference(db);
  for (std::size_t i = 0; i < md.size(); ++i) CHECK((md.data()[i] == 0.0 || md.data()[i] == ref.data()[i]));
  const RealMatrix rm = clean_rangemap(db, p);
  const RealMatrix norm = column_normalize(ref);
  for (std::size_t i = 0; i < rm.size(); ++i) CHECK((rm.data()[i] == 0.0 || rm.data()[i] == norm.data()[i]));
  for (std::size_t c = 0; c < rm.cols(); ++c)
    for (std::size_t r = 30; r < 36; ++r) CHECK(rm(r, c) == 1.0);
}
