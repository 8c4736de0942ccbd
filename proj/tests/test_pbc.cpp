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

#include "adlradar/pbc.hpp"
#include "test_util.hpp"

using namespace adlradar;
using namespace adlradar::testing;

namespace {

// Spectrogram-shaped image: 128 rows over [-500, 500) Hz, 8 ms frames.
RadarImage md_image(std::size_t frames) {
  RadarImage img;
  img.kind = ImageKind::Spectrogram;
  img.pixels = RealMatrix(128, frames);
  img.row_axis = {-500.0, 1000.0 / 128.0};
  img.col_axis = {0.0, 0.008};
  return img;
}

std::size_t row_of(const RadarImage& img, double hz) {
  return static_cast<std::size_t>(std::lround((hz - img.row_axis.origin) / img.row_axis.step));
}

// Frame labels of the threshold rule evaluated directly.
std::vector<bool> active_oracle(const std::vector<double>& pcf, double frac) {
  const auto [mn, mx] = std::minmax_element(pcf.begin(), pcf.end());
  const double thr = *mn + frac * (*mx - *mn);
  std::vector<bool> out(pcf.size());
  for (std::size_t i = 0; i < pcf.size(); ++i) out[i] = pcf[i] >= thr;
  return out;
}

std::vector<bool> labels_of(const std::vector<MotionSegment>& segs, std::size_t n, double rate) {
  std::vector<bool> out(n, false);
  for (const auto& s : segs) {
    const auto a = static_cast<std::size_t>(std::lround(s.onset * rate));
    const auto b = static_cast<std::size_t>(std::lround(s.offset * rate));
    for (std::size_t i = a; i < b && i < n; ++i) out[i] = true;
  }
  return out;
}

}  // namespace

TEST_CASE("power_burst") {
  PbcParams p;
  SUBCASE("zero spectrogram") {
    for (double v : power_burst(md_image(20), p)) CHECK(v == 0.0);
  }
  SUBCASE("near-DC energy is excluded") {
    RadarImage img = md_image(20);
    for (std::size_t c = 0; c < 20; ++c)
      for (std::size_t r = row_of(img, -15.0); r <= row_of(img, 15.0); ++r) img.pixels(r, c) = 5.0;
    for (double v : power_burst(img, p)) CHECK(v == 0.0);
  }
  SUBCASE("a +100 Hz tone gives its squared magnitude") {
    RadarImage img = md_image(30);
    for (std::size_t c = 0; c < 30; ++c) img.pixels(row_of(img, 100.0), c) = 1.0;
    for (double v : power_burst(img, p)) CHECK(v == 1.0);
  }
  SUBCASE("matches a direct band sum and scales quadratically") {
    std::mt19937_64 rng(3);
    RadarImage img = md_image(40);
    img.pixels = random_image(128, 40, rng, 0.5);
    const auto pc = power_burst(img, p);
    for (std::size_t c = 0; c < 40; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < 128; ++r) {
        const double f = img.row_axis.at(static_cast<double>(r));
        const bool in_pos = f >= p.pos_band.first - img.row_axis.step / 2 && f <= p.pos_band.second + img.row_axis.step / 2;
        const bool in_neg = f >= p.neg_band.first - img.row_axis.step / 2 && f <= p.neg_band.second + img.row_axis.step / 2;
        if (in_pos || in_neg) s += img.pixels(r, c) * img.pixels(r, c);
      }
      CHECK(pc[c] == doctest::Approx(s));
    }
    RadarImage scaled = img;
    for (double& v : scaled.pixels.data()) v *= 3.0;
    const auto pc3 = power_burst(scaled, p);
    for (std::size_t c = 0; c < 40; ++c) CHECK(pc3[c] == doctest::Approx(9.0 * pc[c]));
  }
}

TEST_CASE("smooth_pbc") {
  const std::vector<double> c(10, 4.0);
  for (double v : smooth_pbc(c, 5)) CHECK(v == doctest::Approx(4.0));

  std::vector<double> impulse(16, 0.0);
  impulse[6] = 1.0;
  const auto s = smooth_pbc(impulse, 5);
  for (std::size_t i = 0; i < 16; ++i) CHECK(s[i] == doctest::Approx(i >= 6 && i <= 10 ? 0.2 : 0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> x(200);
  for (auto& v : x) v = u(rng);
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  const auto y = smooth_pbc(x, 7);
  const double mx = *std::max_element(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i + 1 >= 7 ? i + 1 - 7 : 0;
    CHECK(y[i] == doctest::Approx((prefix[i + 1] - prefix[lo]) / static_cast<double>(i + 1 - lo)));
    CHECK(y[i] <= mx + 1e-12);
  }
}

TEST_CASE("threshold_segments") {
  SUBCASE("one burst") {
    const std::vector<double> pcf{0, 0, 10, 10, 0};
    const auto segs = threshold_segments(pcf, 0.03, 1.0, 0.0);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].onset == 2.0);
    CHECK(segs[0].offset == 4.0);
  }
  SUBCASE("constant curve is active everywhere") {
    const std::vector<double> pcf(8, 3.0);
    const auto segs = threshold_segments(pcf, 0.03, 2.0, 0.0);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].onset == 0.0);
    CHECK(segs[0].offset == 4.0);
  }
  SUBCASE("two Gaussian bursts over a floor") {
    const double rate = 125.0;
    std::vector<double> pcf(1500, 0.0);
    for (std::size_t i = 0; i < pcf.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      pcf[i] = 1.0 + 100.0 * std::exp(-0.5 * std::pow((t - 3.0) / 0.15, 2)) +
               80.0 * std::exp(-0.5 * std::pow((t - 8.0) / 0.2, 2));
    }
    const auto segs = threshold_segments(pcf, 0.03, rate, 0.3);
    REQUIRE(segs.size() == 2);
    CHECK(std::abs(0.5 * (segs[0].onset + segs[0].offset) - 3.0) * rate <= 2.0);
    CHECK(std::abs(0.5 * (segs[1].onset + segs[1].offset) - 8.0) * rate <= 2.0);
  }
  SUBCASE("labels match the brute-force rule and ignore positive scaling") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> pcf(300);
      for (auto& v : pcf) v = u(rng) < 0.8 ? u(rng) * 0.02 : u(rng);
      const auto segs = threshold_segments(pcf, 0.03, 1.0, 0.0, 0.0);
      CHECK(labels_of(segs, pcf.size(), 1.0) == active_oracle(pcf, 0.03));
      std::vector<double> scaled = pcf;
      for (auto& v : scaled) v *= 7.5;
      CHECK(labels_of(threshold_segments(scaled, 0.03, 1.0, 0.0, 0.0), pcf.size(), 1.0) == active_oracle(pcf, 0.03));
    }
  }
  SUBCASE("short gaps join and short runs drop") {
    std::vector<double> pcf(100, 0.0);
    for (std::size_t i = 10; i < 30; ++i) pcf[i] = 1.0;
    for (std::size_t i = 32; i < 50; ++i) pcf[i] = 1.0;
    for (std::size_t i = 80; i < 82; ++i) pcf[i] = 1.0;
    const auto segs = threshold_segments(pcf, 0.03, 10.0, 0.3, 0.25);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].onset == doctest::Approx(1.0));
    CHECK(segs[0].offset == doctest::Approx(5.0));
  }
}

TEST_CASE("merge_events") {
  Timeline tl;
  tl.intervals = {{0.0, 5.0, MotionKind::Translation, Direction::Toward, 1.0},
                  {5.0, 12.0, MotionKind::InPlace, Direction::None, 1.0},
                  {12.0, 15.0, MotionKind::Translation, Direction::Away, 1.0}};
  tl.breakpoints = {{5.0, MotionKind::Translation, MotionKind::InPlace, 1.0},
                    {12.0, MotionKind::InPlace, MotionKind::Translation, 1.0}};
  tl.t_max = 15.0;

  SUBCASE("one capture per breakpoint without bursts") {
    const auto segs = merge_events(tl, {}, 15.0);
    std::vector<MotionSegment> merged;
    for (const auto& s : segs)
      if (s.source == SegmentSource::Merged) merged.push_back(s);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].kind == SegmentKind::WalkStop);
    CHECK(merged[0].capture_start == doctest::Approx(3.5));
    CHECK(merged[0].capture_end == doctest::Approx(5.5));
    CHECK(merged[1].kind == SegmentKind::WalkStart);
    CHECK(merged[1].direction == Direction::Away);
    CHECK(merged[1].capture_start == doctest::Approx(12.0));
    CHECK(merged[1].capture_end == doctest::Approx(15.0));
  }
  SUBCASE("bursts strictly inside in-place spans are kept") {
    std::vector<MotionSegment> pbc(3);
    pbc[0].onset = 6.0;
    pbc[0].offset = 8.0;
    pbc[1].onset = 9.0;
    pbc[1].offset = 10.5;
    pbc[2].onset = 2.0;  // inside the walk: dropped
    pbc[2].offset = 3.0;
    const auto segs = merge_events(tl, pbc, 15.0);
    std::size_t inplace = 0;
    for (const auto& s : segs)
      if (s.kind == SegmentKind::InPlace) {
        ++inplace;
        CHECK(s.capture_start == s.onset);
        CHECK(s.capture_end == s.offset);
      }
    CHECK(inplace == 2);
    for (std::size_t i = 1; i < segs.size(); ++i) CHECK(segs[i - 1].onset <= segs[i].onset);
    for (const auto& s : segs) CHECK(s.onset < s.offset);

    const auto path = std::filesystem::temp_directory_path() / "adlradar_segments.csv";
    write_segments_csv(path, segs);
    const auto back = read_segments_csv(path);
    REQUIRE(back.size() == segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(back[i].kind == segs[i].kind);
      CHECK(back[i].direction == segs[i].direction);
      CHECK(back[i].source == segs[i].source);
      CHECK(back[i].onset == doctest::Approx(segs[i].onset));
      CHECK(back[i].capture_end == doctest::Approx(segs[i].capture_end));
    }
    std::filesystem::remove(path);
  }
}
