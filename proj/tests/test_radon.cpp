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
#include <filesystem>
#include <random>

#include "adlradar/radon.hpp"
#include "test_util.hpp"

using namespace adlradar;
using namespace adlradar::testing;

namespace {

std::size_t argmax_theta(const RadonImage& ri) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < ri.values.size(); ++i)
    if (ri.values.data()[i] > ri.values.data()[best]) best = i;
  return best % ri.values.cols();
}

// Range-map with a target line of `thick` rows: rows(c) gives the top row.
template <typename F>
RealMatrix line_image(std::size_t rows, std::size_t cols, F top_row, std::size_t thick = 6) {
  RealMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto top = static_cast<std::size_t>(std::lround(top_row(static_cast<double>(c))));
    for (std::size_t r = top; r < std::min(rows, top + thick); ++r) m(r, c) = 1.0;
  }
  return m;
}

// Minor-axis rounding of the ideal segment; exact when the major-axis span is odd.
std::vector<Pixel> rounded_line(Pixel a, Pixel b) {
  const std::ptrdiff_t dr = b.row - a.row, dc = b.col - a.col;
  const std::ptrdiff_t n = std::max(std::abs(dr), std::abs(dc));
  std::vector<Pixel> out;
  for (std::ptrdiff_t k = 0; k <= n; ++k) {
    const double t = n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
    out.push_back({a.row + static_cast<std::ptrdiff_t>(std::lround(t * static_cast<double>(dr))),
                   a.col + static_cast<std::ptrdiff_t>(std::lround(t * static_cast<double>(dc)))});
  }
  return out;
}

}  // namespace

TEST_CASE("image centre convention") {
  const ImageCenter c = image_center(128, 384);
  CHECK(c.row == 63.0);
  CHECK(c.col == 191.0);
  CHECK(image_center(5, 5).row == 2.0);
}

TEST_CASE("radon transform") {
  SUBCASE("all-zero image") {
    const RadonImage ri = radon_transform(RealMatrix(32, 48));
    CHECK(ri.theta_deg.size() == 180);
    CHECK(std::all_of(ri.values.data().begin(), ri.values.data().end(), [](double v) { return v == 0.0; }));
  }
  SUBCASE("horizontal line peaks at 90 degrees") {
    RealMatrix m(64, 96);
    for (std::size_t c = 0; c < 96; ++c) m(20, c) = 1.0;
    const RadonImage ri = radon_transform(m);
    CHECK(ri.theta_deg[argmax_theta(ri)] == 90.0);
  }
  SUBCASE("transposed line peaks at 0 degrees") {
    RealMatrix m(96, 64);
    for (std::size_t r = 0; r < 96; ++r) m(r, 20) = 1.0;
    const RadonImage ri = radon_transform(m);
    const double th = ri.theta_deg[argmax_theta(ri)];
    CHECK((th == 0.0 || th == 179.0));
  }
  SUBCASE("diagonal line peaks where cot(theta) is its slope") {
    RealMatrix m(64, 64);
    for (std::size_t i = 0; i < 64; ++i) m(i, i) = 1.0;  // row grows with column: slope +1
    const RadonImage ri = radon_transform(m);
    const double th = ri.theta_deg[argmax_theta(ri)];
    CHECK(th == 45.0);
    CHECK(line_from_peak(th, 0.0).slope == doctest::Approx(1.0));

    // Brute-force oracle: sum of pixel values whose projection rounds to x'.
    std::size_t oracle_best = 0;
    double oracle_val = -1.0;
    for (std::size_t k = 0; k < 180; ++k) {
      const double a = static_cast<double>(k) * kPi / 180.0;
      std::vector<double> bins(ri.values.rows(), 0.0);
      for (std::size_t i = 0; i < 64; ++i) {
        const double x = static_cast<double>(i) - ri.center.col;
        const double y = ri.center.row - static_cast<double>(i);
        const double pos = x * std::cos(a) + y * std::sin(a) - ri.xprime_origin;
        bins[static_cast<std::size_t>(std::lround(pos))] += 1.0;
      }
      const double v = *std::max_element(bins.begin(), bins.end());
      if (v > oracle_val) {
        oracle_val = v;
        oracle_best = k;
      }
    }
    CHECK(oracle_best == 45);
  }
  SUBCASE("nonnegative and mass preserving") {
    std::mt19937_64 rng(2);
    const RealMatrix m = random_image(30, 40, rng);
    const RadonImage ri = radon_transform(m);
    double mass = 0.0;
    for (double v : m.data()) mass += v;
    for (std::size_t k = 0; k < ri.values.cols(); ++k) {
      double col = 0.0;
      for (std::size_t r = 0; r < ri.values.rows(); ++r) {
        CHECK(ri.values(r, k) >= 0.0);
        col += ri.values(r, k);
      }
      CHECK(col == doctest::Approx(mass));
    }
  }
}

TEST_CASE("find_lines") {
  SUBCASE("one horizontal line gives one in-place line") {
    RealMatrix m(64, 128);
    for (std::size_t c = 0; c < 128; ++c)
      for (std::size_t r = 30; r < 34; ++r) m(r, c) = 1.0;
    const auto lines = find_lines(radon_transform(m), 4);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].kind == MotionKind::InPlace);
    CHECK(lines[0].theta_deg == 90.0);
  }
  SUBCASE("walk then stand gives a translation and an in-place line") {
    const RealMatrix m = line_image(128, 384, [](double c) { return c < 160 ? 100.0 - c / 4.0 : 60.0; });
    const auto lines = find_lines(radon_transform(m), 4);
    REQUIRE(lines.size() >= 2);
    const bool has_inplace = std::any_of(lines.begin(), lines.end(), [](const DetectedLine& l) {
      return l.kind == MotionKind::InPlace && l.theta_deg == 90.0;
    });
    const bool has_walk = std::any_of(lines.begin(), lines.end(), [](const DetectedLine& l) {
      return l.kind == MotionKind::Translation && l.slope < 0.0;
    });
    CHECK(has_inplace);
    CHECK(has_walk);
  }
  CHECK(find_lines(radon_transform(RealMatrix(16, 16)), 3).empty());
}

TEST_CASE("intersect") {
  auto line = [](double m, double n) {
    DetectedLine l;
    l.slope = m;
    l.intercept = n;
    return l;
  };
  const LinePoint p0 = intersect(line(0.0, 0.0), line(1.0, 0.0));
  CHECK(p0.x == 0.0);
  CHECK(p0.y == 0.0);
  const LinePoint p1 = intersect(line(0.0, 1.0), line(-1.0, 3.0));
  CHECK(p1.x == doctest::Approx(2.0));
  CHECK(p1.y == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)intersect(line_from_peak(90.0, 3.0), line_from_peak(90.0, -7.0)), NoIntersection);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> th(1, 179);
  for (int i = 0; i < 1000; ++i) {
    const DetectedLine a = line_from_peak(th(rng), u(rng));
    const DetectedLine b = line_from_peak(th(rng), u(rng));
    if (std::abs(a.slope - b.slope) < 1e-6) continue;
    const LinePoint p = intersect(a, b);
    const double scale = std::max({1.0, std::abs(p.y), std::abs(a.slope * p.x), std::abs(b.slope * p.x)});
    CHECK(std::abs(a.slope * p.x + a.intercept - p.y) / scale < 1e-9);
    CHECK(std::abs(b.slope * p.x + b.intercept - p.y) / scale < 1e-9);
  }
}

TEST_CASE("bresenham and segment_energy") {
  CHECK(bresenham({0, 0}, {0, 0}).size() == 1);
  const auto diag = bresenham({0, 0}, {4, 4});
  REQUIRE(diag.size() == 5);
  for (std::ptrdiff_t i = 0; i < 5; ++i) CHECK(diag[static_cast<std::size_t>(i)] == Pixel{i, i});

  CHECK(segment_energy(RealMatrix(20, 20, 1.0), {2, 3}, {17, 11}) == doctest::Approx(1.0));
  CHECK(segment_energy(RealMatrix(20, 20), {2, 3}, {17, 11}) == 0.0);

  std::mt19937_64 rng(12);
  const RealMatrix img = random_image(40, 40, rng, 0.8);
  std::uniform_int_distribution<std::ptrdiff_t> pos(0, 39);
  int checked = 0;
  while (checked < 200) {
    const Pixel a{pos(rng), pos(rng)};
    const Pixel b{pos(rng), pos(rng)};
    const auto span = std::max(std::abs(b.row - a.row), std::abs(b.col - a.col));
    if (span % 2 == 0) continue;  // odd spans have no rounding ties
    ++checked;
    const auto ref = rounded_line(a, b);
    CHECK(bresenham(a, b) == ref);
    double s = 0.0;
    for (const Pixel& p : ref) s += img(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col));
    CHECK(segment_energy(img, a, b) == doctest::Approx(s / static_cast<double>(ref.size())));
  }
  CHECK_THROWS_AS((void)segment_energy(img, {0, 0}, {40, 0}), InvalidArgument);
}

TEST_CASE("build_timeline") {
  TimelineParams p;
  SUBCASE("single in-place line spans everything") {
    RealMatrix m(128, 384);
    for (std::size_t c = 0; c < 384; ++c)
      for (std::size_t r = 60; r < 66; ++r) m(r, c) = 1.0;
    const Timeline tl = build_timeline(m, find_lines(radon_transform(m), 4), p);
    REQUIRE(tl.intervals.size() == 1);
    CHECK(tl.intervals[0].kind == MotionKind::InPlace);
    CHECK(tl.intervals[0].t0 == 0.0);
    CHECK(tl.intervals[0].t1 == doctest::Approx(12.0));
    CHECK(tl.breakpoints.empty());
  }
  SUBCASE("walk for 5 s then stand") {
    const RealMatrix m = line_image(128, 384, [](double c) { return c < 160 ? 100.0 - c / 4.0 : 60.0; });
    const Timeline tl = build_timeline(m, find_lines(radon_transform(m), 4), p);
    REQUIRE(tl.intervals.size() == 2);
    CHECK(tl.intervals[0].kind == MotionKind::Translation);
    CHECK(tl.intervals[0].direction == Direction::Toward);
    CHECK(tl.intervals[1].kind == MotionKind::InPlace);
    REQUIRE(tl.breakpoints.size() == 1);
    CHECK(std::abs(tl.breakpoints[0].t - 5.0) <= 0.5);
    CHECK(tl.intervals[0].t0 == 0.0);
    CHECK(tl.intervals[0].t1 == tl.intervals[1].t0);
    CHECK(tl.intervals[1].t1 == doctest::Approx(12.0));
  }
  CHECK_THROWS_AS((void)build_timeline(RealMatrix(10, 10), {}, p), InvalidArgument);
}

TEST_CASE("normalize_timeline") {
  std::vector<TimelineInterval> iv = {
      {0.0, 3.0, MotionKind::Translation, Direction::Toward, 1.0},
      {3.0, 3.2, MotionKind::InPlace, Direction::None, 1.0},
      {3.2, 6.0, MotionKind::Translation, Direction::Toward, 1.0},
      {6.0, 9.0, MotionKind::InPlace, Direction::None, 1.0},
  };
  const Timeline tl = normalize_timeline(iv, 9.0, 0.5);
  REQUIRE(tl.intervals.size() == 2);
  CHECK(tl.intervals[0].t1 == 6.0);
  REQUIRE(tl.breakpoints.size() == 1);
  CHECK(tl.breakpoints[0].t == 6.0);
  CHECK(tl.breakpoints[0].from_kind == MotionKind::Translation);
  CHECK(tl.breakpoints[0].to_kind == MotionKind::InPlace);
}

TEST_CASE("windowed timeline over a long recording") {
  // 20 s at 32 columns/s: walk away for 6 s, then stand.
  const RealMatrix m = line_image(128, 640, [](double c) { return c < 192 ? 30.0 + c / 4.0 : 78.0; });
  WindowedRadonParams wp;
  const Timeline tl = windowed_timeline(m, wp);
  REQUIRE(tl.breakpoints.size() == 1);
  CHECK(std::abs(tl.breakpoints[0].t - 6.0) <= 0.5);
  CHECK(tl.intervals.front().direction == Direction::Away);
  double t = 0.0;
  for (const auto& i : tl.intervals) {
    CHECK(i.t0 == doctest::Approx(t));
    t = i.t1;
  }
  CHECK(t == doctest::Approx(20.0));

  const auto path = std::filesystem::temp_directory_path() / "adlradar_timeline.csv";
  write_timeline_csv(path, tl);
  const Timeline back = read_timeline_csv(path);
  REQUIRE(back.intervals.size() == tl.intervals.size());
  for (std::size_t i = 0; i < tl.intervals.size(); ++i) {
    CHECK(back.intervals[i].t0 == doctest::Approx(tl.intervals[i].t0));
    CHECK(back.intervals[i].kind == tl.intervals[i].kind);
    CHECK(back.intervals[i].direction == tl.intervals[i].direction);
  }
  std::filesystem::remove(path);
}
