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
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "adlradar/radon.hpp"
#include "adlradar/rdmap.hpp"

namespace adlradar {

struct PbcParams {
  std::pair<double, double> pos_band{20.0, 270.0};    // Hz
  std::pair<double, double> neg_band{-270.0, -20.0};  // Hz
  std::size_t w = 5;
  double threshold_frac = 0.03;
  double min_duration_s = 0.3;
  double join_gap_s = 0.25;  // bursts closer than this form one motion

  void validate() const;
};

/// translation / inplace come from Radon spans or PBC bursts; walk_stop and
/// walk_start mark breakpoints where walking merges with an in-place motion.
enum class SegmentKind { Translation, InPlace, WalkStop, WalkStart };
enum class SegmentSource { Radon, Pbc, Merged };

[[nodiscard]] std::string_view to_string(SegmentKind k);
[[nodiscard]] std::string_view to_string(SegmentSource s);
[[nodiscard]] SegmentKind segment_kind_from_string(std::string_view s);
[[nodiscard]] SegmentSource segment_source_from_string(std::string_view s);

struct MotionSegment {
  double onset = 0.0;
  double offset = 0.0;
  SegmentKind kind = SegmentKind::InPlace;
  Direction direction = Direction::None;
  SegmentSource source = SegmentSource::Pbc;
  double capture_start = 0.0;
  double capture_end = 0.0;

  [[nodiscard]] bool classifiable() const { return kind != SegmentKind::Translation; }
};

/// Per-frame band energy: sum of MD^2 over both Doppler bands (edges map to
/// the nearest rows, inclusive).
[[nodiscard]] std::vector<double> power_burst(const RadarImage& md, const PbcParams& p);

/// Causal moving average of length w; early samples average what exists.
[[nodiscard]] std::vector<double> smooth_pbc(std::span<const double> pc, std::size_t w);

/// Runs of frames with pcf >= min + frac * (max - min). Runs separated by at
/// most `join_gap_s` are joined, then runs shorter than `min_duration_s` are
/// dropped. Offsets are exclusive frame edges.
[[nodiscard]] std::vector<MotionSegment> threshold_segments(std::span<const double> pcf, double threshold_frac,
                                                            double frame_rate, double min_duration_s = 0.3,
                                                            double join_gap_s = 0.0);

struct MergeParams {
  double stop_before_s = 1.5;  // capture of walking before a stop
  double stop_after_s = 0.5;   // capture of the in-place part after a stop
  double start_after_s = 3.0;  // capture after walking resumes
  double event_len_s = 0.5;    // nominal length of stop/start segments
};

/// Combines the Radon timeline with PBC bursts into the ordered segment list
/// used for classification. `duration` clips capture windows.
[[nodiscard]] std::vector<MotionSegment> merge_events(const Timeline& radon, std::span<const MotionSegment> pbc,
                                                      double duration, const MergeParams& p = {});

void write_segments_csv(const std::filesystem::path& path, std::span<const MotionSegment> segs);
[[nodiscard]] std::vector<MotionSegment> read_segments_csv(const std::filesystem::path& path);

void write_pbc_csv(const std::filesystem::path& path, std::span<const double> pc, std::span<const double> pcf,
                   double frame_rate);

}  // namespace adlradar
