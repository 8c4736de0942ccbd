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

#include "adlradar/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace adlradar {

namespace {

using AK = ActivityKind;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ActivityStep step(AK kind, double duration, Facing facing, std::string label = {}, double speed = 1.0,
                  double scale = 1.0, double overlap = 0.0) {
  ActivityStep s;
  s.kind = kind;
  s.duration = duration;
  s.facing = facing;
  s.walk_speed = speed;
  s.velocity_scale = scale;
  s.overlap = overlap;
  s.label = std::move(label);
  return s;
}

std::string label_of(int cls) { return std::string(roman(cls)); }

bool is_merged_stop(int cls) { return cls >= 1 && cls <= 4; }
bool is_merged_start(int cls) { return cls == 14 || cls == 15; }

// Activity, duration and facing of each single-motion class.
struct InPlaceSpec {
  AK kind;
  double duration;
  Facing facing;
};

InPlaceSpec in_place_spec(int cls) {
  using F = Facing;
  switch (cls) {
    case 1: return {AK::Bend, 1.5, F::Toward};
    case 2: return {AK::Fall, 1.0, F::Toward};
    case 3: return {AK::Bend, 1.5, F::Away};
    case 4: return {AK::Fall, 1.0, F::Away};
    case 5: return {AK::SitDown, 2.2, F::Toward};
    case 6: return {AK::Bend, 1.8, F::Toward};
    case 7: return {AK::Bend, 1.8, F::Away};
    case 8: return {AK::Fall, 1.2, F::Toward};
    case 9: return {AK::Fall, 1.2, F::Away};
    case 10: return {AK::Recover, 2.0, F::Toward};
    case 11: return {AK::Recover, 2.0, F::Away};
    case 12: return {AK::StandUp, 1.8, F::Toward};
    case 13: return {AK::BendSitting, 2.0, F::Toward};
    case 14: return {AK::StandUp, 1.8, F::Toward};
    case 15: return {AK::StartWalk, 1.2, F::Toward};
    default: throw InvalidArgument("unknown motion class " + std::to_string(cls));
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

ClassTemplate class_template(int cls, std::mt19937_64& rng, const MergeParams& merge) {
  const InPlaceSpec spec = in_place_spec(cls);
  const double dur = spec.duration * uniform(rng, 0.85, 1.15);
  const double scale = uniform(rng, 0.85, 1.15);
  const double speed = uniform(rng, 0.8, 1.2);
  ClassTemplate out;
  PersonScript& s = out.script;
  s.gait.phase = uniform(rng, 0.0, 2.0 * kPi);
  s.gait.frequency = uniform(rng, 1.7, 2.3);

  if (is_merged_stop(cls)) {
    const double walk = 2.5;
    const double end_range = spec.facing == Facing::Toward ? uniform(rng, 2.5, 5.0) : uniform(rng, 4.5, 6.5);
    const double sign = spec.facing == Facing::Toward ? 1.0 : -1.0;
    s.start_range = end_range + sign * walk * speed;
    // A fall that ends a walk starts as a trip just before the last step.
    const double trip = spec.kind == AK::Fall ? 0.1 : 0.0;
    s.steps = {step(AK::Walk, walk, spec.facing, {}, speed),
               step(spec.kind, dur, spec.facing, label_of(cls), 1.0, scale, trip)};
    s.tail = 1.0;
    out.kind = SegmentKind::WalkStop;
    out.capture_start = walk - merge.stop_before_s;
    out.capture_end = walk + merge.stop_after_s;
  } else if (is_merged_start(cls)) {
    const double lead = uniform(rng, 1.5, 2.0);
    const double walk = 3.4;
    const double overlap = cls == 14 ? std::min(0.5, 0.3 * dur) : 0.5 * dur;
    s.start_range = uniform(rng, 5.0, 7.0);
    // Starting from a standstill is a slow walk-off; rising from a seat goes
    // straight into a normal pace.
    const double pace = cls == 15 ? 0.6 * speed : speed;
    s.steps = {step(AK::Idle, lead, Facing::Toward),
               step(spec.kind, dur, spec.facing, label_of(cls), 1.0, scale),
               step(AK::Walk, walk, Facing::Toward, {}, pace, 1.0, overlap)};
    s.tail = 0.2;
    const double t = lead + dur - overlap;
    out.kind = SegmentKind::WalkStart;
    out.capture_start = t;
    out.capture_end = t + merge.start_after_s;
  } else {
    const double lead = uniform(rng, 0.6, 1.0);
    s.start_range = uniform(rng, 2.5, 5.5);
    s.steps = {step(AK::Idle, lead, spec.facing), step(spec.kind, dur, spec.facing, label_of(cls), 1.0, scale)};
    s.tail = uniform(rng, 0.6, 1.0);
    out.kind = SegmentKind::InPlace;
    out.capture_start = lead;
    out.capture_end = lead + dur;
  }
  return out;
}

std::vector<Snippet> synth_corpus(const PipelineConfig& cfg, const CorpusOptions& opt, CorpusStats* stats) {
  std::vector<int> classes = opt.classes;
  if (classes.empty())
    for (int c = 1; c <= kNumClasses; ++c) classes.push_back(c);
  if (opt.snr_max_db < opt.snr_min_db) throw InvalidArgument("snr range is empty");

  std::vector<Snippet> out;
  out.reserve(classes.size() * opt.per_class);
  CorpusStats st;
  for (int cls : classes) {
    for (std::size_t k = 0; k < opt.per_class; ++k) {
      const std::uint64_t seed = mix_seed(opt.seed, static_cast<std::uint64_t>(cls), k);
      std::mt19937_64 rng(seed);
      const ClassTemplate tpl = class_template(cls, rng, cfg.merge);
      const double snr = uniform(rng, opt.snr_min_db, opt.snr_max_db);
      const Scenario sc = build_person_scenario(cfg.radar, tpl.script, std::pow(10.0, -snr / 20.0));
      const BasebandMatrix bb = synthesize_baseband(sc, seed);
      const PipelineResult res = run_pipeline(bb, cfg);

      const auto target = std::find_if(sc.truth.begin(), sc.truth.end(),
                                       [&](const TruthInterval& ti) { return class_from_roman(ti.label) == cls; });
      double t0 = tpl.capture_start;
      double t1 = tpl.capture_end;
      bool found = false;
      for (const auto& seg : res.segments) {
        if (seg.kind != tpl.kind) continue;
        const auto m = match_truth(seg, sc.truth);
        if (m && sc.truth.begin() + static_cast<std::ptrdiff_t>(*m) == target) {
          t0 = seg.capture_start;
          t1 = seg.capture_end;
          found = true;
          break;
        }
      }
      ++(found ? st.detected : st.fallback);
      Snippet s = capture_snippet(res.images, std::max(0.0, t0), std::min(res.images.duration, t1), cfg.snippet,
                                  cfg.clean);
      s.label = cls;
      out.push_back(std::move(s));
    }
  }
  if (stats) *stats = st;
  return out;
}

void write_dataset(const std::filesystem::path& dir, std::span<const Snippet> snippets) {
  std::map<int, std::size_t> next;
  for (const auto& s : snippets) {
    if (class_from_roman(roman(s.label)) == 0) throw InvalidArgument("snippet has no valid class label");
    const auto sub = dir / std::string(roman(s.label));
    std::filesystem::create_directories(sub);
    const std::size_t idx = next[s.label]++;
    char stem[32];
    std::snprintf(stem, sizeof stem, "%04zu", idx);
    write_rdm(sub / (std::string(stem) + "_md.rdm"), RadarImage{s.md, {}, {}, ImageKind::Generic});
    write_rdm(sub / (std::string(stem) + "_rm.rdm"), RadarImage{s.rm, {}, {}, ImageKind::Generic});
  }
}

std::vector<Snippet> read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
  std::vector<std::filesystem::path> subdirs;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory()) subdirs.push_back(e.path());
  std::ranges::sort(subdirs);
  std::vector<Snippet> out;
  for (const auto& sub : subdirs) {
    const int cls = class_from_roman(sub.filename().string());
    if (cls == 0) throw InvalidArgument("dataset subdirectory is not a class id: " + sub.filename().string());
    std::vector<std::filesystem::path> mds;
    for (const auto& e : std::filesystem::directory_iterator(sub)) {
      const std::string name = e.path().filename().string();
      if (name.size() > 7 && name.ends_with("_md.rdm")) mds.push_back(e.path());
    }
    std::ranges::sort(mds);
    for (const auto& md : mds) {
      std::string rm_name = md.filename().string();
      rm_name.replace(rm_name.size() - 7, 7, "_rm.rdm");
      const auto rm = sub / rm_name;
      if (!std::filesystem::exists(rm)) throw IoError("missing range-map snippet " + rm.string());
      Snippet s;
      s.md = read_rdm(md).pixels;
      s.rm = read_rdm(rm).pixels;
      s.label = cls;
      s.center_shifted = true;
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::optional<std::size_t> match_truth(const MotionSegment& seg, std::span<const TruthInterval> truth,
                                       double tolerance_s) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int cls = class_from_roman(truth[i].label);
    if (cls == 0) continue;
    double score = -1.0;
    // Merged events: distance from the detected boundary to the labelled interval.
    const double d = std::max({0.0, truth[i].onset - seg.onset, seg.onset - truth[i].offset});
    if ((seg.kind == SegmentKind::WalkStop && is_merged_stop(cls)) ||
        (seg.kind == SegmentKind::WalkStart && is_merged_start(cls))) {
      if (d <= tolerance_s) score = tolerance_s - d + 1e-9;
    } else if (seg.kind == SegmentKind::InPlace && !is_merged_stop(cls) && !is_merged_start(cls)) {
      score = std::min(seg.offset, truth[i].offset) - std::max(seg.onset, truth[i].onset);
      if (score <= 0.0) score = -1.0;
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::vector<MotionSegment> truth_segments(const Scenario& sc, const MergeParams& merge) {
  std::vector<MotionSegment> out;
  auto clip = [&](double t) { return std::clamp(t, 0.0, sc.duration); };
  for (const auto& ti : sc.truth) {
    MotionSegment s;
    if (ti.label == "walk_toward" || ti.label == "walk_away") {
      s.onset = ti.onset;
      s.offset = ti.offset;
      s.kind = SegmentKind::Translation;
      s.direction = ti.label == "walk_toward" ? Direction::Toward : Direction::Away;
      s.source = SegmentSource::Radon;
      s.capture_start = clip(ti.onset);
      s.capture_end = clip(ti.offset);
      out.push_back(s);
      continue;
    }
    const int cls = class_from_roman(ti.label);
    if (is_merged_stop(cls)) {
      s.onset = ti.onset;
      s.offset = ti.onset + merge.event_len_s;
      s.kind = SegmentKind::WalkStop;
      s.direction = cls <= 2 ? Direction::Toward : Direction::Away;
      s.source = SegmentSource::Merged;
      s.capture_start = clip(ti.onset - merge.stop_before_s);
      s.capture_end = clip(ti.onset + merge.stop_after_s);
    } else if (is_merged_start(cls)) {
      s.onset = ti.offset;
      s.offset = ti.offset + merge.event_len_s;
      s.kind = SegmentKind::WalkStart;
      s.direction = Direction::Toward;
      s.source = SegmentSource::Merged;
      s.capture_start = clip(ti.offset);
      s.capture_end = clip(ti.offset + merge.start_after_s);
    } else {
      s.onset = ti.onset;
      s.offset = ti.offset;
      s.kind = SegmentKind::InPlace;
      s.source = SegmentSource::Pbc;
      s.capture_start = clip(ti.onset);
      s.capture_end = clip(ti.offset);
    }
    out.push_back(s);
  }
  // A walk that directly follows a standing pause without a classed start is
  // still a start boundary for the decoder.
  std::vector<MotionSegment> extra;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].kind != SegmentKind::Translation) continue;
    const auto& prev = out[i - 1];
    if (prev.kind == SegmentKind::WalkStart || prev.kind == SegmentKind::Translation) continue;
    if (prev.kind == SegmentKind::WalkStop || prev.kind == SegmentKind::InPlace) {
      MotionSegment s;
      s.onset = out[i].onset;
      s.offset = out[i].onset + merge.event_len_s;
      s.kind = SegmentKind::WalkStart;
      s.direction = out[i].direction;
      s.source = SegmentSource::Merged;
      s.capture_start = clip(out[i].onset);
      s.capture_end = clip(out[i].onset + merge.start_after_s);
      extra.push_back(s);
    }
  }
  out.insert(out.end(), extra.begin(), extra.end());
  std::stable_sort(out.begin(), out.end(), [](const MotionSegment& a, const MotionSegment& b) {
    auto rank = [](SegmentKind k) {
      return k == SegmentKind::Translation ? 2 : (k == SegmentKind::InPlace ? 1 : 0);
    };
    if (a.onset != b.onset) return a.onset < b.onset;
    return rank(a.kind) < rank(b.kind);
  });
  return out;
}

PersonScript example_script(int which, std::mt19937_64* rng) {
  auto j = [&](double lo, double hi) { return rng ? uniform(*rng, lo, hi) : 0.5 * (lo + hi); };
  const double scale = j(0.9, 1.1);
  const double speed = j(0.9, 1.1);
  PersonScript s;
  if (rng) s.gait.phase = uniform(*rng, 0.0, 2.0 * kPi);
  using F = Facing;
  switch (which) {
    case 1:
      // Walk, fall, lie, get up, stand, start walking.
      s.start_range = 8.5 + j(-0.3, 0.3);
      s.steps = {step(AK::Walk, 5.0, F::Toward, {}, speed),
                 step(AK::Fall, 1.0, F::Toward, "II", 1.0, scale, 0.1),
                 step(AK::Idle, 6.3, F::Toward),
                 step(AK::Recover, 3.0, F::Toward, "X", 1.0, scale),
                 step(AK::Idle, 5.0, F::Toward),
                 step(AK::StartWalk, 1.2, F::Toward, "XV", 1.0, scale),
                 step(AK::Walk, 2.9, F::Toward, {}, 0.6 * speed, 1.0, 0.6)};
      s.tail = 0.1;
      break;
    case 2:
      // Walk, fall, get up, sit, stand, turn and walk away.
      s.start_range = 8.5 + j(-0.3, 0.3);
      s.steps = {step(AK::Walk, 5.0, F::Toward, {}, speed),
                 step(AK::Fall, 1.0, F::Toward, "II", 1.0, scale, 0.1),
                 step(AK::Idle, 6.3, F::Toward),
                 step(AK::Recover, 3.0, F::Toward, "X", 1.0, scale),
                 step(AK::Idle, 4.6, F::Toward),
                 step(AK::SitDown, 2.5, F::Toward, "V", 1.0, scale),
                 step(AK::Idle, 4.4, F::Toward),
                 step(AK::StandUp, 2.0, F::Toward, "XII", 1.0, scale),
                 step(AK::Idle, 3.1, F::Toward),
                 step(AK::Walk, 3.9, F::Away, {}, speed)};
      s.tail = 0.1;
      break;
    case 3:
      // Walk away, stop, pick up, turn and sit, lean while seated, stand up
      // and walk toward.
      s.start_range = 2.0 + j(-0.2, 0.2);
      s.steps = {step(AK::Walk, 2.8, F::Away, {}, speed),
                 step(AK::Bend, 0.9, F::Away, "III", 1.0, scale),
                 step(AK::Idle, 0.4, F::Away),
                 step(AK::Bend, 2.5, F::Away, "VII", 1.0, scale),
                 step(AK::Idle, 2.5, F::Toward),
                 step(AK::SitDown, 2.7, F::Toward, "V", 1.0, scale),
                 step(AK::Idle, 7.5, F::Toward),
                 step(AK::BendSitting, 3.1, F::Toward, "XIII", 1.0, scale),
                 step(AK::Idle, 7.8, F::Toward),
                 step(AK::StandUp, 2.0, F::Toward, "XIV", 1.0, scale),
                 step(AK::Walk, 3.3, F::Toward, {}, speed, 1.0, 0.5)};
      s.tail = 0.1;
      break;
    default:
      throw InvalidArgument("unknown example " + std::to_string(which));
  }
  return s;
}

std::vector<State> example_state_trace(int which) {
  using S = State;
  switch (which) {
    case 1: return {S::WS_T, S::LS_T, S::StS_T, S::WS_T};
    case 2: return {S::WS_T, S::LS_T, S::StS_T, S::SiS, S::StS_T, S::WS_A};
    case 3: return {S::WS_A, S::StS_A, S::StS_A, S::SiS, S::SiS, S::WS_T};
    default: throw InvalidArgument("unknown example " + std::to_string(which));
  }
}

std::vector<int> example_labels(int which) {
  using C = MotionClass;
  auto v = [](std::initializer_list<C> cs) {
    std::vector<int> out;
    for (C c : cs) out.push_back(static_cast<int>(c));
    return out;
  };
  switch (which) {
    case 1: return v({C::II, C::X, C::XV});
    case 2: return v({C::II, C::X, C::V, C::XII});
    case 3: return v({C::III, C::VII, C::V, C::XIII, C::XIV});
    default: throw InvalidArgument("unknown example " + std::to_string(which));
  }
}

}  // namespace adlradar
