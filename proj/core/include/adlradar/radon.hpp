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

#include <filesystem>
#include <string_view>
#include <vector>

#include "adlradar/common.hpp"

namespace adlradar {

enum class MotionKind { InPlace, Translation };
enum class Direction { None, Toward, Away };

[[nodiscard]] std::string_view to_string(MotionKind kind);
[[nodiscard]] std::string_view to_string(Direction dir);
[[nodiscard]] MotionKind motion_kind_from_string(std::string_view s);
[[nodiscard]] Direction direction_from_string(std::string_view s);

class NoIntersection : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

/// Image centre used by the transform: floor((size + 1) / 2) - 1 on each axis.
struct ImageCenter {
  double row = 0.0;
  double col = 0.0;
};

[[nodiscard]] ImageCenter image_center(std::size_t rows, std::size_t cols);

/// Projections R(theta, x'). Rows are x' bins, columns are angles. With the
/// image centre at the origin, x = col - cx grows with slow time and
/// y = cy - row grows toward the radar; x' = x cos(theta) + y sin(theta).
struct RadonImage {
  RealMatrix values;
  std::vector<double> theta_deg;
  double xprime_origin = 0.0;  // x' of row 0
  double xprime_step = 1.0;
  ImageCenter center;
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;

  [[nodiscard]] double xprime_at(std::size_t bin) const { return xprime_origin + static_cast<double>(bin) * xprime_step; }
};

/// Transform over theta = 0..179 degrees in 1 degree steps. Each pixel's
/// value is split linearly between the two nearest x' bins.
[[nodiscard]] RadonImage radon_transform(const RealMatrix& img);

/// Line u = slope * x + intercept in centred coordinates, where u = row - cy
/// counts range bins away from the radar and x = col - cx.
struct DetectedLine {
  double theta_deg = 90.0;
  double xprime = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  MotionKind kind = MotionKind::InPlace;
  double strength = 0.0;

  /// Row of the line at pixel column `col` of an image with centre `c`.
  [[nodiscard]] double row_at(double col, const ImageCenter& c) const { return c.row + slope * (col - c.col) + intercept; }
};

struct FindLinesParams {
  double rel_threshold = 0.4;
  double suppress_theta_deg = 5.0;
  double suppress_xprime = 10.0;
  double inplace_tolerance_deg = 2.0;
};

/// Builds the line for a Radon peak at (theta, x').
[[nodiscard]] DetectedLine line_from_peak(double theta_deg, double xprime, double strength = 0.0,
                                          double inplace_tolerance_deg = 2.0);

/// Greedy peak picking with neighbourhood suppression.
[[nodiscard]] std::vector<DetectedLine> find_lines(const RadonImage& ri, std::size_t max_lines,
                                                   const FindLinesParams& p = {});

struct LinePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Solves slope_a * x + n_a = slope_b * x + n_b. Throws NoIntersection for
/// (near) parallel lines.
[[nodiscard]] LinePoint intersect(const DetectedLine& a, const DetectedLine& b);

struct Pixel {
  std::ptrdiff_t row = 0;
  std::ptrdiff_t col = 0;
  bool operator==(const Pixel&) const = default;
};

/// Bresenham rasterization of p0 -> p1, endpoints included.
[[nodiscard]] std::vector<Pixel> bresenham(Pixel p0, Pixel p1);

/// Mean pixel value along the Bresenham line p0 -> p1.
[[nodiscard]] double segment_energy(const RealMatrix& img, Pixel p0, Pixel p1);

struct TimelineParams {
  double col_step_s = 1.0 / 32.0;    // seconds per slow-time pixel
  double row_step_m = 0.15;          // metres per range pixel
  double min_translation_swath_m = 1.0;
  double min_interval_s = 0.5;
  int energy_band_rows = 2;          // +/- rows searched around each line
};

struct TimelineInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  MotionKind kind = MotionKind::InPlace;
  Direction direction = Direction::None;
  double energy = 0.0;
};

struct BreakPoint {
  double t = 0.0;
  MotionKind from_kind = MotionKind::InPlace;
  MotionKind to_kind = MotionKind::InPlace;
  double chosen_segment_energy = 0.0;
};

struct Timeline {
  std::vector<TimelineInterval> intervals;
  std::vector<BreakPoint> breakpoints;
  double t_max = 0.0;
};

/// Splits [0, cols * col_step] at line intersections, keeps the line with the
/// highest normalised energy on each piece, merges equal neighbours and
/// demotes translations whose range swath is below the threshold.
[[nodiscard]] Timeline build_timeline(const RealMatrix& img, const std::vector<DetectedLine>& lines,
                                      const TimelineParams& p = {});

/// Rebuilds breakpoints from intervals after merging equal neighbours and
/// absorbing runs shorter than `min_interval_s`.
[[nodiscard]] Timeline normalize_timeline(std::vector<TimelineInterval> intervals, double t_max, double min_interval_s);

struct WindowedRadonParams {
  std::size_t window_cols = 384;
  std::size_t hop_cols = 192;
  std::size_t max_lines = 4;
  FindLinesParams lines{};
  TimelineParams timeline{};
};

/// Applies the transform on overlapping windows of a long cleaned range-map.
/// Each window contributes the central part it owns.
[[nodiscard]] Timeline windowed_timeline(const RealMatrix& img, const WindowedRadonParams& p);

void write_timeline_csv(const std::filesystem::path& path, const Timeline& tl);
[[nodiscard]] Timeline read_timeline_csv(const std::filesystem::path& path);

}  // namespace adlradar
