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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adlradar/common.hpp"

namespace adlradar {

/// FMCW sweep and sampling parameters. Defaults follow the 25 GHz / 2 GHz
/// K-band setup with 1 ms chirps.
struct RadarParams {
  double fc = 25.0e9;         // carrier (Hz)
  double bandwidth = 2.0e9;   // sweep bandwidth (Hz)
  double pri = 1.0e-3;        // pulse repetition interval (s)
  std::size_t fast_samples = 512;  // N, samples per PRI
  std::size_t num_pri = 12000;     // M

  // Radar-equation terms; only used when range_falloff is enabled.
  double antenna_gain = 1.0;
  double tx_power = 1.0;
  double system_loss = 1.0;
  double atmospheric_loss = 1.0;
  bool range_falloff = false;

  [[nodiscard]] double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }
  [[nodiscard]] double wavelength() const { return kSpeedOfLight / fc; }
  [[nodiscard]] double chirp_rate() const { return bandwidth / pri; }
  [[nodiscard]] double sample_period() const { return pri / static_cast<double>(fast_samples); }
  [[nodiscard]] double duration() const { return pri * static_cast<double>(num_pri); }
  /// Doppler shift (Hz) produced by a range rate (m/s); negative when closing.
  [[nodiscard]] double doppler_of(double range_rate) const { return 2.0 * range_rate * fc / kSpeedOfLight; }

  void validate() const;
};

struct RangePoint {
  double t;  // s
  double r;  // m
};

/// Sinusoidal range perturbation, active inside `windows` with a short
/// raised-cosine taper at each window edge.
struct MicroMotion {
  double amplitude = 0.15;  // m
  double frequency = 2.0;   // Hz
  double phase = 0.0;       // rad
  std::vector<std::pair<double, double>> windows;

  [[nodiscard]] double offset_at(double t) const;
};

/// One point scatterer following a piecewise-linear range profile.
struct ScattererTrack {
  std::vector<RangePoint> profile;  // sorted by t
  double rcs = 1.0;
  std::string label;
  std::optional<MicroMotion> micro_motion;

  [[nodiscard]] double base_range_at(double t) const;
  [[nodiscard]] double range_at(double t) const;
  [[nodiscard]] double start_time() const { return profile.empty() ? 0.0 : profile.front().t; }
  [[nodiscard]] double end_time() const { return profile.empty() ? 0.0 : profile.back().t; }
};

/// Ground-truth interval. Labels are roman motion-class ids ("I".."XV") or
/// "walk_toward" / "walk_away".
struct TruthInterval {
  std::string label;
  double onset = 0.0;
  double offset = 0.0;
};

[[nodiscard]] bool is_valid_truth_label(std::string_view label);

struct Scenario {
  RadarParams params;
  double duration = 0.0;  // s; must cover num_pri * pri
  std::vector<ScattererTrack> tracks;
  double noise_sigma = 0.0;  // std of the circular complex noise
  std::vector<TruthInterval> truth;

  void validate() const;
};

/// Dechirped samples s(n, m), stored column-major (one PRI per column).
class BasebandMatrix {
 public:
  BasebandMatrix() = default;
  explicit BasebandMatrix(const RadarParams& params);

  [[nodiscard]] const RadarParams& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t fast_samples() const noexcept { return params_.fast_samples; }
  [[nodiscard]] std::size_t num_pri() const noexcept { return params_.num_pri; }

  cplxf& at(std::size_t n, std::size_t m) noexcept { return data_[m * params_.fast_samples + n]; }
  const cplxf& at(std::size_t n, std::size_t m) const noexcept {
    return data_[m * params_.fast_samples + n];
  }
  std::span<cplxf> column(std::size_t m) noexcept {
    return {data_.data() + m * params_.fast_samples, params_.fast_samples};
  }
  std::span<const cplxf> column(std::size_t m) const noexcept {
    return {data_.data() + m * params_.fast_samples, params_.fast_samples};
  }
  std::vector<cplxf>& data() noexcept { return data_; }
  const std::vector<cplxf>& data() const noexcept { return data_; }

 private:
  RadarParams params_{};
  std::vector<cplxf> data_;
};

/// Synthesizes the beat signal of every track plus circular Gaussian noise.
/// Output is bit-identical for a fixed scenario and seed.
[[nodiscard]] BasebandMatrix synthesize_baseband(const Scenario& scenario, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Activity kinematics

enum class ActivityKind { Walk, Idle, SitDown, StandUp, Bend, BendSitting, Fall, Recover, StartWalk };
enum class Facing { Toward, Away };

[[nodiscard]] std::string_view to_string(ActivityKind kind);
[[nodiscard]] ActivityKind activity_kind_from_string(std::string_view name);
[[nodiscard]] std::string_view to_string(Facing facing);
[[nodiscard]] Facing facing_from_string(std::string_view name);

struct ActivityOptions {
  double walk_speed = 1.0;       // m/s
  double velocity_scale = 1.0;   // multiplies the template peak velocities
  MicroMotion gait{};            // limb swing used while walking
};

/// Velocity template of one activity, relative to its own start time.
/// In-place kinds are sums of Gaussian velocity lobes; a walk is constant.
class ActivityKinematics {
 public:
  ActivityKinematics(ActivityKind kind, double duration, Facing facing, const ActivityOptions& opts = {});

  /// Range rate (m/s) at time `t` after the activity start.
  [[nodiscard]] double velocity(double t) const;
  /// Range change accumulated from the start up to `t`.
  [[nodiscard]] double displacement(double t) const;
  /// Extra limb velocity gain over the torso for in-place kinds.
  [[nodiscard]] double limb_gain() const noexcept { return limb_gain_; }
  [[nodiscard]] ActivityKind kind() const noexcept { return kind_; }
  [[nodiscard]] double duration() const noexcept { return duration_; }
  [[nodiscard]] bool is_translation() const noexcept { return kind_ == ActivityKind::Walk; }

 private:
  struct Lobe {
    double center;  // s
    double sigma;   // s
    double peak;    // m/s
  };
  ActivityKind kind_;
  double duration_;
  double walk_velocity_ = 0.0;
  double limb_gain_ = 1.0;
  std::vector<Lobe> lobes_;
};

/// Torso track of a single activity sampled on a 10 ms grid. Walks carry the
/// gait micro-motion.
[[nodiscard]] ScattererTrack build_activity_profile(ActivityKind kind, double start, double duration,
                                                    double start_range, Facing direction,
                                                    const ActivityOptions& opts = {});

// ---------------------------------------------------------------------------
// Scripted person scenarios

struct ActivityStep {
  ActivityKind kind = ActivityKind::Idle;
  double duration = 1.0;
  Facing facing = Facing::Toward;
  double walk_speed = 1.0;
  double velocity_scale = 1.0;
  /// Start this step this many seconds before the previous step ends (merged motions).
  double overlap = 0.0;
  /// Truth label for the step ("" = none; walks are labeled automatically).
  std::string label;
};

struct PersonScript {
  double start_range = 3.0;
  double torso_rcs = 1.0;
  double back_rcs = 0.6;
  double back_offset = 0.11;  // m behind the torso
  double limb_rcs = 0.5;
  MicroMotion gait{};
  std::vector<ActivityStep> steps;
  double tail = 0.0;  // extra idle time after the last step
};

struct ScriptTiming {
  double start;
  double end;
};

/// Composes torso, back and limb scatterers from the script; walking and
/// labelled steps become truth intervals.
[[nodiscard]] Scenario build_person_scenario(const RadarParams& params, const PersonScript& script,
                                             double noise_sigma);
/// Start/end time of each step in `script`, same order.
[[nodiscard]] std::vector<ScriptTiming> script_timing(const PersonScript& script);

// ---------------------------------------------------------------------------
// Files

[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] Scenario parse_scenario_json(std::string_view text);
[[nodiscard]] std::string scenario_to_json(const Scenario& scenario);

/// IQF1: "IQF1", u32 N, u32 M, f64 fc, f64 B, f64 PRI, then N*M interleaved
/// little-endian f32 (I, Q), column-major by PRI.
void write_iqf(const std::filesystem::path& path, const BasebandMatrix& bb);
[[nodiscard]] BasebandMatrix read_iqf(const std::filesystem::path& path);

}  // namespace adlradar
