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

#include "adlradar/rdmap.hpp"
#include "adlradar/sim.hpp"
#include "test_util.hpp"

using namespace adlradar;
using namespace adlradar::testing;

namespace {

BasebandMatrix tone_columns(std::size_t n, std::size_t m, double cycles) {
  RadarParams p;
  p.fast_samples = n;
  p.num_pri = m;
  BasebandMatrix bb(p);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = 2.0 * kPi * cycles * static_cast<double>(i) / static_cast<double>(n);
      bb.at(i, j) = cplxf(static_cast<float>(std::cos(ang)), static_cast<float>(std::sin(ang)));
    }
  return bb;
}

std::size_t argmax_abs(std::span<const cplxf> col) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < col.size(); ++i)
    if (std::abs(col[i]) > std::abs(col[best])) best = i;
  return best;
}

std::size_t argmax_col(const RealMatrix& m, std::size_t c) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < m.rows(); ++r)
    if (m(r, c) > m(best, c)) best = r;
  return best;
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("range_map of a basis vector") {
  // Positive-frequency beat tones map to their own bin; the conjugate tone
  // lands in the mirrored bin.
  const ComplexRangeMap pos = range_map(tone_columns(512, 4, 40.0));
  const ComplexRangeMap neg = range_map(tone_columns(512, 4, -40.0));
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(argmax_abs(pos.column(m)) == 40);
    CHECK(argmax_abs(neg.column(m)) == 512 - 40);
    CHECK(std::abs(pos.at(40, m)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("range_map of zeros is zero") {
  RadarParams p;
  p.num_pri = 8;
  const ComplexRangeMap rm = range_map(BasebandMatrix(p));
  for (std::size_t m = 0; m < rm.pris(); ++m)
    for (auto v : rm.column(m)) CHECK(v == cplxf{});
}

TEST_CASE("walk from 3 m to 1 m traces a descending ridge") {
  const Scenario sc = moving_scenario(3.0, -2.0 / 12.0, 12000);
  const ComplexRangeMap rm = range_map(synthesize_baseband(sc, 1));
  CHECK(argmax_abs(rm.column(0)) == 40);
  const auto last = argmax_abs(rm.column(rm.pris() - 1));
  CHECK(std::abs(static_cast<double>(last) - 1.0 / 0.075) <= 1.0);
  std::size_t prev = argmax_abs(rm.column(0));
  for (std::size_t m = 100; m < rm.pris(); m += 100) {
    const std::size_t cur = argmax_abs(rm.column(m));
    CHECK(cur <= prev);
    const double expected = sc.tracks[0].range_at(static_cast<double>(m) * rm.pri()) / rm.bin_size();
    CHECK(std::abs(static_cast<double>(cur) - expected) <= 1.0);
    prev = cur;
  }
}

TEST_CASE("range_bin_sum") {
  const ComplexRangeMap rm = range_map(synthesize_baseband(stationary_scenario(3.0, 64), 1));
  SUBCASE("single row") {
    const auto v = range_bin_sum(rm, 5, 5);
    for (std::size_t m = 0; m < rm.pris(); ++m) CHECK(v[m] == cplx(rm.at(5, m).real(), rm.at(5, m).imag()));
  }
  SUBCASE("stationary scatterer gives constant magnitude") {
    const auto v = range_bin_sum(rm, 10, 128);
    const double ref = std::abs(v[0]);
    CHECK(ref > 0.0);
    for (const auto& x : v) CHECK(std::abs(std::abs(x) - ref) <= 0.01 * ref);
  }
  SUBCASE("zero map") {
    RadarParams p;
    p.num_pri = 4;
    for (const auto& x : range_bin_sum(range_map(BasebandMatrix(p)), 10, 128)) CHECK(x == cplx{});
  }
  CHECK_THROWS_AS((void)range_bin_sum(rm, 6, 5), InvalidArgument);
  CHECK_THROWS_AS((void)range_bin_sum(rm, 0, 512), InvalidArgument);
}

TEST_CASE("spectrogram") {
  const StftParams p;
  CHECK(p.overlap() == 0.9375);

  SUBCASE("100 Hz tone peaks at the nearest bin in every frame") {
    std::vector<cplx> v(2000);
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = std::polar(1.0, 2.0 * kPi * 0.1 * static_cast<double>(m));
    const RadarImage sg = spectrogram(v, p, 1e-3);
    CHECK(sg.rows() == 128);
    CHECK(sg.cols() == 250);
    const double row = (100.0 - sg.row_axis.origin) / sg.row_axis.step;
    const auto nearest = static_cast<std::size_t>(std::lround(row));
    for (std::size_t c = 0; c < sg.cols(); ++c) CHECK(argmax_col(sg.pixels, c) == nearest);
  }
  SUBCASE("zero input") {
    const std::vector<cplx> v(512);
    const RadarImage sg = spectrogram(v, p, 1e-3);
    CHECK(std::all_of(sg.pixels.data().begin(), sg.pixels.data().end(), [](double x) { return x == 0.0; }));
  }
  SUBCASE("frame energy is bounded by window energy times frame energy") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<cplx> v(1024);
    for (auto& x : v) x = {g(rng), g(rng)};
    const RadarImage sg = spectrogram(v, p, 1e-3);
    const auto w = make_window(p.window, p.L);
    double wmax2 = 0.0;
    for (double x : w) wmax2 = std::max(wmax2, x * x);
    for (std::size_t c = 8; c + 8 < sg.cols(); ++c) {
      double spec = 0.0, frame = 0.0;
      for (std::size_t r = 0; r < sg.rows(); ++r) spec += sg.pixels(r, c);
      const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(c * p.hop) - 64;
      for (std::ptrdiff_t k = 0; k < 128; ++k) frame += std::norm(v[static_cast<std::size_t>(first + k)]);
      // Parseval: sum |X|^2 = L * sum |w x|^2 <= L * max w^2 * sum |x|^2.
      CHECK(spec <= 128.0 * wmax2 * frame * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS((void)spectrogram(std::vector<cplx>(10), p, 1e-3), InvalidArgument);
  CHECK_THROWS_AS((void)spectrogram(std::vector<cplx>(512), StftParams{128, 0}, 1e-3), InvalidArgument);
}

TEST_CASE("hanning window is the interior form") {
  const auto w = make_window(WindowKind::Hanning, 128);
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(w[k] > 0.0);
    CHECK(w[k] == doctest::Approx(0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k + 1) / 129.0))));
    CHECK(w[k] == doctest::Approx(w[w.size() - 1 - k]));
  }
  for (double x : make_window(WindowKind::Rectangular, 16)) CHECK(x == 1.0);
}

TEST_CASE("log_magnitude") {
  CHECK(log_magnitude(1.0) == 0.0);
  CHECK(log_magnitude(10.0) == doctest::Approx(10.0));
  CHECK(log_magnitude(0.0) == kLogFloorDb);
  CHECK(log_magnitude(1e-30) == kLogFloorDb);
}

TEST_CASE("resize") {
  std::mt19937_64 rng(5);
  const RealMatrix img = random_image(20, 30, rng, 0.7);
  SUBCASE("same shape is the identity") {
    CHECK(resize(img, 20, 30, ResizeMethod::Subsample) == img);
    const RealMatrix lin = resize(img, 20, 30, ResizeMethod::Linear);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(lin.data()[i] == doctest::Approx(img.data()[i]));
  }
  SUBCASE("constant stays constant") {
    const RealMatrix c(7, 9, 2.5);
    for (auto method : {ResizeMethod::Subsample, ResizeMethod::Linear}) {
      const RealMatrix out = resize(c, 13, 4, method);
      CHECK(out.rows() == 13);
      CHECK(out.cols() == 4);
      for (double v : out.data()) CHECK(v == doctest::Approx(2.5));
    }
  }
  SUBCASE("subsample follows the index map") {
    RealMatrix big(256, 12000);
    for (std::size_t r = 0; r < big.rows(); ++r)
      for (std::size_t c = 0; c < big.cols(); ++c) big(r, c) = static_cast<double>(r * 100000 + c);
    const RealMatrix small = resize(big, 128, 384, ResizeMethod::Subsample);
    for (std::size_t r = 0; r < 128; ++r)
      for (std::size_t c = 0; c < 384; ++c) {
        const auto sr = std::min<std::size_t>(255, static_cast<std::size_t>(std::lround(r * 2.0)));
        const auto sc = std::min<std::size_t>(11999, static_cast<std::size_t>(std::lround(c * 31.25)));
        REQUIRE(small(r, c) == static_cast<double>(sr * 100000 + sc));
      }
  }
  SUBCASE("linear never overshoots") {
    const RealMatrix out = resize(img, 57, 11, ResizeMethod::Linear);
    const auto [mn, mx] = std::minmax_element(img.data().begin(), img.data().end());
    for (double v : out.data()) {
      CHECK(v >= *mn - 1e-12);
      CHECK(v <= *mx + 1e-12);
    }
  }
  SUBCASE("axes are rescaled") {
    RadarImage ri{img, {0.0, 0.075}, {0.0, 0.001}, ImageKind::RangeMap};
    const RadarImage out = resize(ri, 10, 15, ResizeMethod::Subsample);
    CHECK(out.row_axis.step == doctest::Approx(0.15));
    CHECK(out.col_axis.step == doctest::Approx(0.002));
  }
}

TEST_CASE("smooth3x3 and crop_columns") {
  const RealMatrix c(5, 6, 1.0);
  const RealMatrix sc = smooth3x3(c);
  for (double v : sc.data()) CHECK(v == 9.0);
  RealMatrix impulse(5, 5);
  impulse(2, 2) = 1.0;
  const RealMatrix s = smooth3x3(impulse);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t col = 0; col < 5; ++col)
      CHECK(s(r, col) == ((r >= 1 && r <= 3 && col >= 1 && col <= 3) ? 1.0 : 0.0));

  RadarImage img{c, {0.0, 1.0}, {0.0, 0.5}, ImageKind::Generic};
  const RadarImage crop = crop_columns(img, 2, 5);
  CHECK(crop.cols() == 3);
  CHECK(crop.col_axis.origin == doctest::Approx(1.0));
}

TEST_CASE("RDM and PGM round-trips") {
  std::mt19937_64 rng(9);
  RadarImage img{random_image(12, 17, rng, 0.5), {0.0, 0.075}, {0.0, 0.008}, ImageKind::RangeMap};
  const auto rdm = temp_file("adlradar_test.rdm");
  write_rdm(rdm, img);
  const RadarImage back = read_rdm(rdm);
  CHECK(back.kind == ImageKind::RangeMap);
  CHECK(back.row_axis.step == img.row_axis.step);
  CHECK(back.col_axis.step == img.col_axis.step);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    CHECK(back.pixels.data()[i] == static_cast<double>(static_cast<float>(img.pixels.data()[i])));

  const auto pgm = temp_file("adlradar_test.pgm");
  write_pgm(pgm, img.pixels);
  const PgmImage g = read_pgm(pgm);
  CHECK(g.rows == 12);
  CHECK(g.cols == 17);
  CHECK(g.pixels == to_gray8(img.pixels));
  CHECK(std::filesystem::exists(pgm.string() + ".scale"));
  std::filesystem::remove(rdm);
  std::filesystem::remove(pgm);
  std::filesystem::remove(pgm.string() + ".scale");
}
