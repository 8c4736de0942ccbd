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

#include "adlradar/pbc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "binio.hpp"

namespace adlradar {

void PbcParams::validate() const {
  if (!(pos_band.first < pos_band.second) || !(neg_band.first < neg_band.second))
    throw InvalidArgument("pbc params: band edges must increase");
  if (!(neg_band.second < 0.0) || !(pos_band.first > 0.0))
    throw InvalidArgument("pbc params: bands must exclude zero Doppler");
  if (w < 1) throw InvalidArgument("pbc params: w must be >= 1");
  if (!(threshold_frac > 0.0) || !(threshold_frac < 1.0))
    throw InvalidArgument("pbc params: threshold_frac must be in (0, 1)");
  if (!(min_duration_s >= 0.0) || !(join_gap_s >= 0.0))
    throw InvalidArgument("pbc params: durations must be nonnegative");
}

std::string_view to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Translation: return "translation";
    case SegmentKind::InPlace: return "inplace";
    case SegmentKind::WalkStop: return "walk_stop";
    case SegmentKind::WalkStart: return "walk_start";
  }
  return "inplace";
}

std::string_view to_string(SegmentSource s) {
  switch (s) {
    case SegmentSource::Radon: return "radon";
    case SegmentSource::Pbc: return "pbc";
    case SegmentSource::Merged: return "merged";
  }
  return "pbc";
}

SegmentKind segment_kind_from_string(std::string_view s) {
  for (auto k : {SegmentKind::Translation, SegmentKind::InPlace, SegmentKind::WalkStop, SegmentKind::WalkStart})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown segment kind '" + std::string(s) + "'");
}

SegmentSource segment_source_from_string(std::string_view s) {
  for (auto k : {SegmentSource::Radon, SegmentSource::Pbc, SegmentSource::Merged})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown segment source '" + std::string(s) + "'");
}

std::vector<double> power_burst(const RadarImage& md, const PbcParams& p) {
  p.validate();
  const Axis& ax = md.row_axis;
  if (!(ax.step > 0.0)) throw InvalidArgument("power_burst: bad Doppler axis");
  auto row_of = [&](double f) {
    const double r = std::round((f - ax.origin) / ax.step);
    if (r < 0.0 || r >= static_cast<double>(md.rows()))
      throw InvalidArgument("power_burst: band edge " + std::to_string(f) + " Hz outside the Doppler span");
    return static_cast<std::size_t>(r);
  };
  const std::size_t p1 = row_of(p.pos_band.first), p2 = row_of(p.pos_band.second);
  const std::size_t n1 = row_of(p.neg_band.first), n2 = row_of(p.neg_band.second);
  std::vector<double> pc(md.cols(), 0.0);
  for (std::size_t c = 0; c < md.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = p1; r <= p2; ++r) s += md.pixels(r, c) * md.pixels(r, c);
    for (std::size_t r = n1; r <= n2; ++r) s += md.pixels(r, c) * md.pixels(r, c);
    pc[c] = s;
  }
  return pc;
}

std::vector<double> smooth_pbc(std::span<const double> pc, std::size_t w) {
  if (w < 1) throw InvalidArgument("smooth_pbc: w must be >= 1");
  std::vector<double> out(pc.size());
  double run = 0.0;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    run += pc[i];
    if (i >= w) run -= pc[i - w];
    // Recompute exactly now and then so the running sum cannot drift.
    if (i % 4096 == 4095) {
      run = 0.0;
      for (std::size_t k = i + 1 - std::min(w, i + 1); k <= i; ++k) run += pc[k];
    }
    out[i] = run / static_cast<double>(std::min(w, i + 1));
  }
  return out;
}

std::vector<MotionSegment> threshold_segments(std::span<const double> pcf, double threshold_frac, double frame_rate,
                                              double min_duration_s, double join_gap_s) {
  if (pcf.empty()) throw InvalidArgument("threshold_segments: empty curve");
  if (!(frame_rate > 0.0)) throw InvalidArgument("threshold_segments: frame rate must be positive");
  const auto [lo, hi] = std::minmax_element(pcf.begin(), pcf.end());
  const double thr = *lo + threshold_frac * (*hi - *lo);
  std::vector<MotionSegment> out;
  std::size_t i = 0;
  while (i < pcf.size()) {
    if (!(pcf[i] >= thr)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < pcf.size() && pcf[j] >= thr) ++j;
    MotionSegment s;
    s.onset = static_cast<double>(i) / frame_rate;
    s.offset = static_cast<double>(j) / frame_rate;
    s.kind = SegmentKind::InPlace;
    s.source = SegmentSource::Pbc;
    s.capture_start = s.onset;
    s.capture_end = s.offset;
    if (!out.empty() && s.onset - out.back().offset <= join_gap_s + 1e-12) {
      out.back().offset = s.offset;
      out.back().capture_end = s.offset;
    } else {
      out.push_back(s);
    }
    i = j;
  }
  std::erase_if(out, [&](const MotionSegment& s) { return s.offset - s.onset < min_duration_s - 1e-12; });
  return out;
}

namespace {

int sort_rank(SegmentKind k) {
  switch (k) {
    case SegmentKind::WalkStop:
    case SegmentKind::WalkStart: return 0;
    case SegmentKind::InPlace: return 1;
    case SegmentKind::Translation: return 2;
  }
  return 2;
}

}  // namespace

std::vector<MotionSegment> merge_events(const Timeline& radon, std::span<const MotionSegment> pbc, double duration,
                                        const MergeParams& p) {
  std::vector<MotionSegment> out;
  auto clip = [&](double t) { return std::clamp(t, 0.0, duration); };
  const auto& iv = radon.intervals;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    const auto& cur = iv[i];
    if (cur.kind == MotionKind::Translation) {
      MotionSegment s;
      s.onset = cur.t0;
      s.offset = cur.t1;
      s.kind = SegmentKind::Translation;
      s.direction = cur.direction;
      s.source = SegmentSource::Radon;
      s.capture_start = clip(cur.t0);
      s.capture_end = clip(cur.t1);
      out.push_back(s);
    }
    if (i == 0) continue;
    const auto& prev = iv[i - 1];
    const double t = cur.t0;
    if (prev.kind == MotionKind::Translation && cur.kind == MotionKind::InPlace) {
      MotionSegment s;
      s.onset = t;
      s.offset = std::min(t + p.event_len_s, std::max(duration, t + 1e-6));
      s.kind = SegmentKind::WalkStop;
      s.direction = prev.direction;
      s.source = SegmentSource::Merged;
      s.capture_start = clip(t - p.stop_before_s);
      s.capture_end = clip(t + p.stop_after_s);
      out.push_back(s);
    } else if (prev.kind == MotionKind::InPlace && cur.kind == MotionKind::Translation) {
      MotionSegment s;
      s.onset = t;
      s.offset = std::min(t + p.event_len_s, std::max(duration, t + 1e-6));
      s.kind = SegmentKind::WalkStart;
      s.direction = cur.direction;
      s.source = SegmentSource::Merged;
      s.capture_start = clip(t);
      s.capture_end = clip(t + p.start_after_s);
      out.push_back(s);
    }
  }
  for (const auto& s : pbc) {
    const bool inside = std::any_of(iv.begin(), iv.end(), [&](const TimelineInterval& ti) {
      return ti.kind == MotionKind::InPlace && s.onset > ti.t0 && s.offset < ti.t1;
    });
    if (!inside) continue;
    MotionSegment q = s;
    q.kind = SegmentKind::InPlace;
    q.source = SegmentSource::Pbc;
    q.direction = Direction::None;
    q.capture_start = clip(s.onset);
    q.capture_end = clip(s.offset);
    out.push_back(q);
  }
  std::stable_sort(out.begin(), out.end(), [](const MotionSegment& a, const MotionSegment& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return sort_rank(a.kind) < sort_rank(b.kind);
  });
  return out;
}

void write_segments_csv(const std::filesystem::path& path, std::span<const MotionSegment> segs) {
  std::ostringstream os;
  os << "onset_s,offset_s,kind,direction,source,capture_start_s,capture_end_s\n";
  char buf[64];
  for (const auto& s : segs) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,", s.onset, s.offset);
    os << buf << to_string(s.kind) << ',' << to_string(s.direction) << ',' << to_string(s.source);
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", s.capture_start, s.capture_end);
    os << buf;
  }
  detail::write_text(path, os.str());
}

std::vector<MotionSegment> read_segments_csv(const std::filesystem::path& path) {
  std::istringstream in(detail::read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "onset_s,offset_s,kind,direction,source,capture_start_s,capture_end_s")
    throw IoError("segments CSV: bad header in " + path.string());
  std::vector<MotionSegment> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[7];
    for (auto& s : f)
      if (!std::getline(ls, s, ',')) throw IoError("segments CSV: short row in " + path.string());
    try {
      MotionSegment s;
      s.onset = std::stod(f[0]);
      s.offset = std::stod(f[1]);
      s.kind = segment_kind_from_string(f[2]);
      s.direction = direction_from_string(f[3]);
      s.source = segment_source_from_string(f[4]);
      s.capture_start = std::stod(f[5]);
      s.capture_end = std::stod(f[6]);
      out.push_back(s);
    } catch (const std::exception&) {
      throw IoError("segments CSV: malformed row in " + path.string());
    }
  }
  return out;
}

void write_pbc_csv(const std::filesystem::path& path, std::span<const double> pc, std::span<const double> pcf,
                   double frame_rate) {
  if (pc.size() != pcf.size()) throw InvalidArgument("write_pbc_csv: length mismatch");
  std::ostringstream os;
  os << "frame,t_s,pc,pc_smooth\n";
  char buf[128];
  for (std::size_t i = 0; i < pc.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.9g,%.9g\n", i, static_cast<double>(i) / frame_rate, pc[i], pcf[i]);
    os << buf;
  }
  detail::write_text(path, os.str());
}

}  // namespace adlradar
