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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adlradar/common.hpp"
#include "adlradar/sim.hpp"

namespace adlradar {

/// Uniform axis: coordinate of index i is origin + i * step.
struct Axis {
  double origin = 0.0;
  double step = 1.0;

  [[nodiscard]] double at(double i) const { return origin + i * step; }
  bool operator==(const Axis&) const = default;
};

enum class ImageKind : std::uint8_t { RangeMap = 0, Spectrogram = 1, Generic = 2 };

/// Real-valued image with physical axes. Row 0 is the nearest range bin of a
/// range-map or the most negative Doppler bin of a spectrogram.
struct RadarImage {
  RealMatrix pixels;
  Axis row_axis;  // m per bin or Hz per bin
  Axis col_axis;  // s per column
  ImageKind kind = ImageKind::Generic;

  [[nodiscard]] std::size_t rows() const { return pixels.rows(); }
  [[nodiscard]] std::size_t cols() const { return pixels.cols(); }
};

/// Complex range-map R(p, m), column-major (one PRI per column).
class ComplexRangeMap {
 public:
  ComplexRangeMap() = default;
  ComplexRangeMap(std::size_t bins, std::size_t pris, double bin_size_m, double pri_s)
      : bins_(bins), pris_(pris), bin_size_(bin_size_m), pri_(pri_s), data_(bins * pris) {}

  [[nodiscard]] std::size_t bins() const noexcept { return bins_; }
  [[nodiscard]] std::size_t pris() const noexcept { return pris_; }
  [[nodiscard]] double bin_size() const noexcept { return bin_size_; }
  [[nodiscard]] double pri() const noexcept { return pri_; }

  cplxf& at(std::size_t p, std::size_t m) noexcept { return data_[m * bins_ + p]; }
  const cplxf& at(std::size_t p, std::size_t m) const noexcept { return data_[m * bins_ + p]; }
  std::span<cplxf> column(std::size_t m) noexcept { return {data_.data() + m * bins_, bins_}; }
  std::span<const cplxf> column(std::size_t m) const noexcept { return {data_.data() + m * bins_, bins_}; }

 private:
  std::size_t bins_ = 0;
  std::size_t pris_ = 0;
  double bin_size_ = 0.0;
  double pri_ = 0.0;
  std::vector<cplxf> data_;
};

enum class WindowKind { Hanning, Rectangular };

struct StftParams {
  std::size_t L = 128;
  std::size_t hop = 8;
  WindowKind window = WindowKind::Hanning;

  [[nodiscard]] double overlap() const { return static_cast<double>(L - hop) / static_cast<double>(L); }
  void validate() const;
};

/// Window taper of length L. Hanning is the interior form
/// 0.5 * (1 - cos(2 pi k / (L + 1))), k = 1..L, which never reaches zero.
[[nodiscard]] std::vector<double> make_window(WindowKind kind, std::size_t L);

/// Per-column DFT of the baseband, scaled by 1/N.
[[nodiscard]] ComplexRangeMap range_map(const BasebandMatrix& bb);

/// V(m) = sum of rows r1..r2 (inclusive) of the range-map.
[[nodiscard]] std::vector<cplx> range_bin_sum(const ComplexRangeMap& rm, std::size_t r1 = 10, std::size_t r2 = 128);

/// Squared-magnitude STFT of V sampled at 1/pri. Frames are centred on
/// multiples of hop with zero padding at both ends; rows are fftshifted so
/// row L/2 is 0 Hz.
[[nodiscard]] RadarImage spectrogram(std::span<const cplx> v, const StftParams& p, double pri);

inline constexpr double kLogFloorDb = -120.0;

/// 10 log10 |x|, clamped below at `floor_db`.
[[nodiscard]] double log_magnitude(double mag, double floor_db = kLogFloorDb);
[[nodiscard]] RealMatrix log_magnitude(const RealMatrix& x, double floor_db = kLogFloorDb);

/// Range-map in dB restricted to rows [0, max_bins).
[[nodiscard]] RadarImage rangemap_db(const ComplexRangeMap& rm, std::size_t max_bins, double floor_db = kLogFloorDb);

enum class ResizeMethod { Subsample, Linear };

/// Subsample picks the nearest source index round(i * src / dst); linear is
/// align-corners bilinear. Axis steps are rescaled to the new grid.
[[nodiscard]] RadarImage resize(const RadarImage& img, std::size_t rows, std::size_t cols, ResizeMethod method);
[[nodiscard]] RealMatrix resize(const RealMatrix& img, std::size_t rows, std::size_t cols, ResizeMethod method);

/// 3x3 unit-coefficient box sum with edge replication.
[[nodiscard]] RealMatrix smooth3x3(const RealMatrix& img);

/// Columns [c0, c1) of an image, with the column axis shifted accordingly.
[[nodiscard]] RadarImage crop_columns(const RadarImage& img, std::size_t c0, std::size_t c1);

// ---------------------------------------------------------------------------
// Files

/// RDM1: "RDM1", u32 rows, u32 cols, u8 kind, f64 row step, f64 col step,
/// then f32 row-major. Origins are implied by the kind.
void write_rdm(const std::filesystem::path& path, const RadarImage& img);
[[nodiscard]] RadarImage read_rdm(const std::filesystem::path& path);

struct PgmImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// 8-bit binary PGM, linearly scaled from [min, max]; the scale is written
/// to a "<path>.scale" sidecar.
void write_pgm(const std::filesystem::path& path, const RealMatrix& img);
[[nodiscard]] PgmImage read_pgm(const std::filesystem::path& path);
[[nodiscard]] std::vector<std::uint8_t> to_gray8(const RealMatrix& img);

}  // namespace adlradar
