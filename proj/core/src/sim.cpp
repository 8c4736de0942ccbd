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

#include "adlradar/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include <json.hpp>

#include "binio.hpp"

namespace adlradar {

namespace {

using nlohmann::json;

constexpr double kTaper = 0.25;        // s, micro-motion fade in/out
constexpr double kProfileStep = 0.01;  // s, breakpoint spacing of synthesized tracks

double raised_cosine(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * x));
}

// Fractional part, kept in [0, 1).
double frac(double x) { return x - std::floor(x); }

}  // namespace

void RadarParams::validate() const {
  if (!(fc > 0.0) || !(bandwidth > 0.0) || !(pri > 0.0))
    throw InvalidArgument("radar params: fc, bandwidth and pri must be positive");
  if (fast_samples < 2) throw InvalidArgument("radar params: need at least 2 fast-time samples");
  if (num_pri < 1) throw InvalidArgument("radar params: need at least one PRI");
  if (range_falloff && (!(antenna_gain > 0.0) || !(tx_power > 0.0) || !(system_loss > 0.0) ||
                        !(atmospheric_loss > 0.0)))
    throw InvalidArgument("radar params: radar-equation terms must be positive");
}

double MicroMotion::offset_at(double t) const {
  double w = windows.empty() ? 1.0 : 0.0;
  for (const auto& [a, b] : windows) {
    if (t < a || t > b) continue;
    const double ramp = std::min({1.0, (t - a) / kTaper, (b - t) / kTaper});
    w = std::max(w, raised_cosine(ramp));
  }
  if (w == 0.0) return 0.0;
  return amplitude * w * std::sin(2.0 * kPi * frequency * t + phase);
}

double ScattererTrack::base_range_at(double t) const {
  if (profile.empty()) throw InvalidArgument("scatterer track '" + label + "' has an empty profile");
  if (t <= profile.front().t) return profile.front().r;
  if (t >= profile.back().t) return profile.back().r;
  auto it = std::upper_bound(profile.begin(), profile.end(), t,
                             [](double v, const RangePoint& p) { return v < p.t; });
  const RangePoint& b = *it;
  const RangePoint& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return a.r + u * (b.r - a.r);
}

double ScattererTrack::range_at(double t) const {
  double r = base_range_at(t);
  if (micro_motion) r += micro_motion->offset_at(t);
  return r;
}

bool is_valid_truth_label(std::string_view label) {
  static constexpr std::array<std::string_view, 17> kLabels = {
      "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX",
      "X", "XI", "XII", "XIII", "XIV", "XV", "walk_toward", "walk_away"};
  return std::find(kLabels.begin(), kLabels.end(), label) != kLabels.end();
}

void Scenario::validate() const {
  params.validate();
  if (duration + 1e-9 < params.duration())
    throw InvalidArgument("invalid scenario: duration " + std::to_string(duration) +
                          " s is shorter than num_pri * pri = " + std::to_string(params.duration()) + " s");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("invalid scenario: noise_sigma must be >= 0");
  for (const auto& tr : tracks) {
    if (tr.profile.empty()) throw InvalidArgument("invalid scenario: track '" + tr.label + "' has no profile");
    for (std::size_t i = 0; i < tr.profile.size(); ++i) {
      if (!(tr.profile[i].r > 0.0))
        throw InvalidArgument("invalid scenario: track '" + tr.label + "' has a non-positive range");
      if (i > 0 && !(tr.profile[i].t > tr.profile[i - 1].t))
        throw InvalidArgument("invalid scenario: track '" + tr.label + "' profile times must increase");
    }
    if (!(tr.rcs >= 0.0)) throw InvalidArgument("invalid scenario: negative rcs");
  }
  double prev_end = -1e300;
  for (const auto& ti : truth) {
    if (!is_valid_truth_label(ti.label)) throw InvalidArgument("invalid scenario: bad truth label '" + ti.label + "'");
    if (!(ti.offset > ti.onset)) throw InvalidArgument("invalid scenario: truth interval with offset <= onset");
    if (ti.onset < prev_end - 1e-9) throw InvalidArgument("invalid scenario: truth intervals overlap or are unsorted");
    prev_end = ti.offset;
  }
}

BasebandMatrix::BasebandMatrix(const RadarParams& params)
    : params_(params), data_(params.fast_samples * params.num_pri) {}

BasebandMatrix synthesize_baseband(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const RadarParams& p = scenario.params;
  BasebandMatrix bb(p);
  const std::size_t n_fast = p.fast_samples;
  const double ts = p.sample_period();
  const double alpha = p.chirp_rate();
  const double lambda = p.wavelength();

  std::mt19937_64 rng(seed);
  // Ziggurat sampler; noise dominates synthesis time.
  boost::random::normal_distribution<double> gauss(0.0, scenario.noise_sigma / std::sqrt(2.0));
  std::vector<cplx> acc(n_fast);

  for (std::size_t m = 0; m < p.num_pri; ++m) {
    const double t = static_cast<double>(m) * p.pri;
    std::fill(acc.begin(), acc.end(), cplx{});
    for (const auto& tr : scenario.tracks) {
      const double r = tr.range_at(t);
      if (!(r > 0.0)) throw ProcessingError("scatterer '" + tr.label + "' reached non-positive range");
      double amp = tr.rcs;
      if (p.range_falloff) {
        amp = p.antenna_gain * lambda * std::sqrt(p.tx_power * tr.rcs) /
              (std::pow(4.0 * kPi, 1.5) * r * r * std::sqrt(p.system_loss * p.atmospheric_loss));
      }
      // Beat frequency in cycles per sample and the carrier phase term.
      const double cyc = 2.0 * alpha * r / kSpeedOfLight * ts;
      const double phi0 = 2.0 * kPi * frac(2.0 * p.fc * r / kSpeedOfLight);
      const double sr = std::cos(2.0 * kPi * frac(cyc));
      const double si = std::sin(2.0 * kPi * frac(cyc));
      double zr = amp * std::cos(phi0);
      double zi = amp * std::sin(phi0);
      // Written out: std::complex multiplication carries NaN-recovery overhead.
      for (std::size_t n = 0; n < n_fast; ++n) {
        acc[n] += cplx(zr, zi);
        const double nr = zr * sr - zi * si;
        zi = zr * si + zi * sr;
        zr = nr;
      }
    }
    auto col = bb.column(m);
    if (scenario.noise_sigma > 0.0) {
      for (std::size_t n = 0; n < n_fast; ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        acc[n] += cplx(re, im);
      }
    }
    for (std::size_t n = 0; n < n_fast; ++n)
      col[n] = cplxf(static_cast<float>(acc[n].real()), static_cast<float>(acc[n].imag()));
  }
  return bb;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ActivityKind kind) {
  switch (kind) {
    case ActivityKind::Walk: return "walk";
    case ActivityKind::Idle: return "idle";
    case ActivityKind::SitDown: return "sit_down";
    case ActivityKind::StandUp: return "stand_up";
    case ActivityKind::Bend: return "bend";
    case ActivityKind::BendSitting: return "bend_sitting";
    case ActivityKind::Fall: return "fall";
    case ActivityKind::Recover: return "recover";
    case ActivityKind::StartWalk: return "start_walk";
  }
  return "idle";
}

ActivityKind activity_kind_from_string(std::string_view name) {
  for (auto k : {ActivityKind::Walk, ActivityKind::Idle, ActivityKind::SitDown, ActivityKind::StandUp,
                 ActivityKind::Bend, ActivityKind::BendSitting, ActivityKind::Fall, ActivityKind::Recover,
                 ActivityKind::StartWalk}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown activity kind '" + std::string(name) + "'");
}

std::string_view to_string(Facing facing) { return facing == Facing::Toward ? "toward" : "away"; }

Facing facing_from_string(std::string_view name) {
  if (name == "toward") return Facing::Toward;
  if (name == "away") return Facing::Away;
  throw InvalidArgument("unknown facing '" + std::string(name) + "'");
}

ActivityKinematics::ActivityKinematics(ActivityKind kind, double duration, Facing facing,
                                       const ActivityOptions& opts)
    : kind_(kind), duration_(duration) {
  if (!(duration > 0.0)) throw InvalidArgument("activity duration must be positive");
  const double sgn = facing == Facing::Toward ? 1.0 : -1.0;
  const double d = duration;
  const double k = opts.velocity_scale;
  // Lobes are written for a person facing the radar: negative = closing.
  auto lobe = [&](double c, double s, double v) { lobes_.push_back({c * d, s * d, sgn * k * v}); };
  switch (kind) {
    case ActivityKind::Walk:
      if (!(opts.walk_speed > 0.0)) throw InvalidArgument("walk speed must be positive");
      walk_velocity_ = -sgn * opts.walk_speed;
      break;
    case ActivityKind::Idle:
      break;
    case ActivityKind::SitDown:
      lobe(0.30, 0.10, -0.35);
      lobe(0.65, 0.12, 0.75);
      limb_gain_ = 1.3;
      break;
    case ActivityKind::StandUp:
      lobe(0.30, 0.10, -0.70);
      lobe(0.70, 0.10, 0.30);
      limb_gain_ = 1.4;
      break;
    case ActivityKind::Bend:
      lobe(0.30, 0.10, -0.45);
      lobe(0.70, 0.10, 0.45);
      limb_gain_ = 1.8;
      break;
    case ActivityKind::BendSitting:
      lobe(0.30, 0.10, -0.30);
      lobe(0.70, 0.10, 0.30);
      limb_gain_ = 2.2;
      break;
    case ActivityKind::Fall:
      lobe(0.45, 0.10, -1.80);
      lobe(0.75, 0.08, 0.60);
      limb_gain_ = 1.2;
      break;
    case ActivityKind::Recover:
      lobe(0.20, 0.07, 0.50);
      lobe(0.45, 0.07, -0.40);
      lobe(0.75, 0.10, 0.50);
      limb_gain_ = 1.5;
      break;
    case ActivityKind::StartWalk:
      lobe(0.55, 0.18, -0.45);
      limb_gain_ = 2.0;
      break;
  }
}

double ActivityKinematics::velocity(double t) const {
  if (t < 0.0 || t > duration_) return 0.0;
  double v = walk_velocity_;
  for (const auto& l : lobes_) {
    const double z = (t - l.center) / l.sigma;
    v += l.peak * std::exp(-0.5 * z * z);
  }
  return v;
}

double ActivityKinematics::displacement(double t) const {
  t = std::clamp(t, 0.0, duration_);
  double x = walk_velocity_ * t;
  for (const auto& l : lobes_) {
    const double s = l.sigma * std::sqrt(2.0);
    x += l.peak * l.sigma * std::sqrt(kPi / 2.0) * (std::erf((t - l.center) / s) - std::erf(-l.center / s));
  }
  return x;
}

namespace {

std::vector<double> time_grid(double start, double end) {
  const auto n = static_cast<std::size_t>(std::ceil((end - start) / kProfileStep - 1e-9));
  std::vector<double> ts;
  ts.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) ts.push_back(start + static_cast<double>(i) * kProfileStep);
  ts.push_back(end);
  return ts;
}

}  // namespace

ScattererTrack build_activity_profile(ActivityKind kind, double start, double duration, double start_range,
                                      Facing direction, const ActivityOptions& opts) {
  if (!(start_range > 0.0)) throw InvalidArgument("start range must be positive");
  const ActivityKinematics kin(kind, duration, direction, opts);
  ScattererTrack tr;
  tr.label = "torso";
  for (double t : time_grid(start, start + duration)) {
    const double r = start_range + kin.displacement(t - start);
    if (!(r > 0.0)) throw InvalidArgument("activity profile passes through the radar");
    tr.profile.push_back({t, r});
  }
  if (kind == ActivityKind::Walk) {
    MicroMotion mm = opts.gait;
    mm.windows = {{start, start + duration}};
    tr.micro_motion = mm;
  }
  return tr;
}

std::vector<ScriptTiming> script_timing(const PersonScript& script) {
  std::vector<ScriptTiming> out;
  double prev_end = 0.0;
  for (const auto& s : script.steps) {
    if (!(s.duration > 0.0)) throw InvalidArgument("script step duration must be positive");
    if (s.overlap < 0.0) throw InvalidArgument("script step overlap must be >= 0");
    const double start = std::max(0.0, prev_end - s.overlap);
    out.push_back({start, start + s.duration});
    prev_end = start + s.duration;
  }
  return out;
}

Scenario build_person_scenario(const RadarParams& params, const PersonScript& script, double noise_sigma) {
  if (script.steps.empty()) throw InvalidArgument("person script has no steps");
  const auto timing = script_timing(script);
  std::vector<ActivityKinematics> kin;
  kin.reserve(script.steps.size());
  double end = 0.0;
  MicroMotion gait = script.gait;
  gait.windows.clear();
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& s = script.steps[i];
    ActivityOptions o;
    o.walk_speed = s.walk_speed;
    o.velocity_scale = s.velocity_scale;
    kin.emplace_back(s.kind, s.duration, s.facing, o);
    end = std::max(end, timing[i].end);
    if (s.kind == ActivityKind::Walk) gait.windows.emplace_back(timing[i].start, timing[i].end);
  }
  end += script.tail;

  Scenario sc;
  sc.params = params;
  sc.params.num_pri = static_cast<std::size_t>(std::llround(end / params.pri));
  sc.duration = static_cast<double>(sc.params.num_pri) * params.pri;
  sc.noise_sigma = noise_sigma;

  ScattererTrack torso{{}, script.torso_rcs, "torso", std::nullopt};
  ScattererTrack back{{}, script.back_rcs, "torso_back", std::nullopt};
  ScattererTrack limb{{}, script.limb_rcs, "limb", std::nullopt};
  for (double t : time_grid(0.0, sc.duration)) {
    double r = script.start_range;
    double extra = 0.0;
    for (std::size_t i = 0; i < kin.size(); ++i) {
      const double dx = kin[i].displacement(t - timing[i].start);
      r += dx;
      if (!kin[i].is_translation()) extra += (kin[i].limb_gain() - 1.0) * dx;
    }
    if (!(r > 0.1)) throw InvalidArgument("person script walks through the radar");
    torso.profile.push_back({t, r});
    back.profile.push_back({t, r + script.back_offset});
    limb.profile.push_back({t, std::max(0.05, r + extra)});
  }
  if (!gait.windows.empty()) limb.micro_motion = gait;
  if (script.torso_rcs > 0.0) sc.tracks.push_back(std::move(torso));
  if (script.back_rcs > 0.0) sc.tracks.push_back(std::move(back));
  if (script.limb_rcs > 0.0) sc.tracks.push_back(std::move(limb));

  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& s = script.steps[i];
    std::string label = s.label;
    if (s.kind == ActivityKind::Walk && label.empty())
      label = s.facing == Facing::Toward ? "walk_toward" : "walk_away";
    if (label.empty()) continue;
    if (!is_valid_truth_label(label)) throw InvalidArgument("bad step label '" + label + "'");
    sc.truth.push_back({label, timing[i].start, std::min(timing[i].end, sc.duration)});
  }
  std::stable_sort(sc.truth.begin(), sc.truth.end(),
                   [](const TruthInterval& a, const TruthInterval& b) { return a.onset < b.onset; });
  // A merged start overlaps the walk it leads into; the walk keeps the overlap.
  for (std::size_t i = 0; i + 1 < sc.truth.size(); ++i)
    sc.truth[i].offset = std::min(sc.truth[i].offset, sc.truth[i + 1].onset);
  std::erase_if(sc.truth, [](const TruthInterval& ti) { return !(ti.offset > ti.onset); });
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

RadarParams params_from_json(const json& j) {
  RadarParams p;
  p.fc = get_or(j, "fc", p.fc);
  p.bandwidth = get_or(j, "bandwidth", p.bandwidth);
  p.pri = get_or(j, "pri", p.pri);
  p.fast_samples = get_or(j, "fast_samples", p.fast_samples);
  p.num_pri = get_or(j, "num_pri", std::size_t{0});
  p.antenna_gain = get_or(j, "antenna_gain", p.antenna_gain);
  p.tx_power = get_or(j, "tx_power", p.tx_power);
  p.system_loss = get_or(j, "system_loss", p.system_loss);
  p.atmospheric_loss = get_or(j, "atmospheric_loss", p.atmospheric_loss);
  p.range_falloff = get_or(j, "range_falloff", p.range_falloff);
  return p;
}

json params_to_json(const RadarParams& p) {
  return json{{"fc", p.fc},
              {"bandwidth", p.bandwidth},
              {"pri", p.pri},
              {"fast_samples", p.fast_samples},
              {"num_pri", p.num_pri},
              {"antenna_gain", p.antenna_gain},
              {"tx_power", p.tx_power},
              {"system_loss", p.system_loss},
              {"atmospheric_loss", p.atmospheric_loss},
              {"range_falloff", p.range_falloff}};
}

MicroMotion micro_from_json(const json& j) {
  MicroMotion mm;
  mm.amplitude = get_or(j, "amplitude", mm.amplitude);
  mm.frequency = get_or(j, "frequency", mm.frequency);
  mm.phase = get_or(j, "phase", mm.phase);
  if (j.contains("windows"))
    for (const auto& w : j.at("windows")) mm.windows.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
  return mm;
}

json micro_to_json(const MicroMotion& mm) {
  json w = json::array();
  for (const auto& [a, b] : mm.windows) w.push_back({a, b});
  return json{{"amplitude", mm.amplitude}, {"frequency", mm.frequency}, {"phase", mm.phase}, {"windows", w}};
}

PersonScript script_from_json(const json& j) {
  PersonScript s;
  s.start_range = get_or(j, "start_range", s.start_range);
  s.torso_rcs = get_or(j, "torso_rcs", s.torso_rcs);
  s.back_rcs = get_or(j, "back_rcs", s.back_rcs);
  s.back_offset = get_or(j, "back_offset", s.back_offset);
  s.limb_rcs = get_or(j, "limb_rcs", s.limb_rcs);
  s.tail = get_or(j, "tail", s.tail);
  if (j.contains("gait")) s.gait = micro_from_json(j.at("gait"));
  for (const auto& js : j.at("steps")) {
    ActivityStep st;
    st.kind = activity_kind_from_string(js.at("kind").get<std::string>());
    st.duration = js.at("duration").get<double>();
    st.facing = facing_from_string(get_or<std::string>(js, "facing", "toward"));
    st.walk_speed = get_or(js, "speed", st.walk_speed);
    st.velocity_scale = get_or(js, "velocity_scale", st.velocity_scale);
    st.overlap = get_or(js, "overlap", st.overlap);
    st.label = get_or<std::string>(js, "label", "");
    s.steps.push_back(st);
  }
  return s;
}

}  // namespace

Scenario parse_scenario_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario JSON: ") + e.what());
  }
  try {
    RadarParams p = params_from_json(j.value("params", json::object()));
    double noise = get_or(j, "noise_sigma", 0.0);
    if (j.contains("snr_db")) noise = std::pow(10.0, -j.at("snr_db").get<double>() / 20.0);
    if (j.contains("script")) {
      if (p.num_pri == 0) p.num_pri = 1;
      return build_person_scenario(p, script_from_json(j.at("script")), noise);
    }
    Scenario sc;
    sc.noise_sigma = noise;
    if (j.contains("duration")) {
      sc.duration = j.at("duration").get<double>();
      if (p.num_pri == 0) p.num_pri = static_cast<std::size_t>(std::llround(sc.duration / p.pri));
    } else {
      if (p.num_pri == 0) throw InvalidArgument("scenario needs either duration or params.num_pri");
      sc.duration = p.duration();
    }
    sc.params = p;
    for (const auto& jt : j.value("tracks", json::array())) {
      ScattererTrack tr;
      tr.label = get_or<std::string>(jt, "label", "");
      tr.rcs = get_or(jt, "rcs", 1.0);
      for (const auto& bp : jt.at("profile")) tr.profile.push_back({bp.at(0).get<double>(), bp.at(1).get<double>()});
      if (jt.contains("micro_motion")) tr.micro_motion = micro_from_json(jt.at("micro_motion"));
      sc.tracks.push_back(std::move(tr));
    }
    for (const auto& ti : j.value("truth", json::array()))
      sc.truth.push_back({ti.at("label").get<std::string>(), ti.at("onset").get<double>(), ti.at("offset").get<double>()});
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario JSON: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario_json(detail::read_text(path)); }

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["params"] = params_to_json(sc.params);
  j["duration"] = sc.duration;
  j["noise_sigma"] = sc.noise_sigma;
  j["tracks"] = json::array();
  for (const auto& tr : sc.tracks) {
    json jt{{"label", tr.label}, {"rcs", tr.rcs}};
    json prof = json::array();
    for (const auto& bp : tr.profile) prof.push_back({bp.t, bp.r});
    jt["profile"] = std::move(prof);
    if (tr.micro_motion) jt["micro_motion"] = micro_to_json(*tr.micro_motion);
    j["tracks"].push_back(std::move(jt));
  }
  j["truth"] = json::array();
  for (const auto& ti : sc.truth) j["truth"].push_back({{"label", ti.label}, {"onset", ti.onset}, {"offset", ti.offset}});
  return j.dump(1);
}

// ---------------------------------------------------------------------------
// IQF1

void write_iqf(const std::filesystem::path& path, const BasebandMatrix& bb) {
  const auto& p = bb.params();
  detail::BinWriter w(path);
  w.magic("IQF1");
  w.put(static_cast<std::uint32_t>(p.fast_samples));
  w.put(static_cast<std::uint32_t>(p.num_pri));
  w.put(p.fc);
  w.put(p.bandwidth);
  w.put(p.pri);
  // std::complex<float> is layout-compatible with float[2].
  w.put_array(reinterpret_cast<const float*>(bb.data().data()), bb.data().size() * 2);
  w.close();
}

BasebandMatrix read_iqf(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("IQF1");
  RadarParams p;
  p.fast_samples = r.get<std::uint32_t>();
  p.num_pri = r.get<std::uint32_t>();
  p.fc = r.get<double>();
  p.bandwidth = r.get<double>();
  p.pri = r.get<double>();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("IQF1 header: ") + e.what());
  }
  BasebandMatrix bb(p);
  r.get_array(reinterpret_cast<float*>(bb.data().data()), bb.data().size() * 2);
  r.expect_eof();
  return bb;
}

}  // namespace adlradar
