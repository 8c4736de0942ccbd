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

#include "adlradar/radon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "binio.hpp"
#include "adlradar/rdmap.hpp"

namespace adlradar {

std::string_view to_string(MotionKind kind) { return kind == MotionKind::InPlace ? "inplace" : "translation"; }

std::string_view to_string(Direction dir) {
  switch (dir) {
    case Direction::Toward: return "toward";
    case Direction::Away: return "away";
    case Direction::None: break;
  }
  return "none";
}

MotionKind motion_kind_from_string(std::string_view s) {
  if (s == "inplace") return MotionKind::InPlace;
  if (s == "translation") return MotionKind::Translation;
  throw InvalidArgument("unknown motion kind '" + std::string(s) + "'");
}

Direction direction_from_string(std::string_view s) {
  if (s == "none") return Direction::None;
  if (s == "toward") return Direction::Toward;
  if (s == "away") return Direction::Away;
  throw InvalidArgument("unknown direction '" + std::string(s) + "'");
}

ImageCenter image_center(std::size_t rows, std::size_t cols) {
  return {static_cast<double>((rows + 1) / 2) - 1.0, static_cast<double>((cols + 1) / 2) - 1.0};
}

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

// cos/sin with exact zeros at multiples of 90 degrees.
void cos_sin_deg(double deg, double& c, double& s) {
  c = std::cos(deg2rad(deg));
  s = std::sin(deg2rad(deg));
  if (std::abs(c) < 1e-12) c = 0.0;
  if (std::abs(s) < 1e-12) s = 0.0;
}

}  // namespace

RadonImage radon_transform(const RealMatrix& img) {
  RadonImage ri;
  ri.image_rows = img.rows();
  ri.image_cols = img.cols();
  ri.center = image_center(img.rows(), img.cols());
  const double diag = std::hypot(static_cast<double>(img.rows()), static_cast<double>(img.cols()));
  const auto half = static_cast<std::size_t>(std::ceil(diag / 2.0)) + 1;
  const std::size_t nbins = 2 * half + 1;
  ri.xprime_origin = -static_cast<double>(half);
  ri.xprime_step = 1.0;
  for (int t = 0; t < 180; ++t) ri.theta_deg.push_back(static_cast<double>(t));
  ri.values = RealMatrix(nbins, ri.theta_deg.size());

  struct Px {
    double x, y, v;
  };
  std::vector<Px> pts;
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c)
      if (const double v = img(r, c); v != 0.0)
        pts.push_back({static_cast<double>(c) - ri.center.col, ri.center.row - static_cast<double>(r), v});

  for (std::size_t k = 0; k < ri.theta_deg.size(); ++k) {
    double cs = 0.0;
    double sn = 0.0;
    cos_sin_deg(ri.theta_deg[k], cs, sn);
    for (const Px& p : pts) {
      const double pos = p.x * cs + p.y * sn - ri.xprime_origin;
      const double fl = std::floor(pos);
      const auto i0 = static_cast<std::size_t>(fl);
      const double f = pos - fl;
      ri.values(i0, k) += p.v * (1.0 - f);
      if (f > 0.0) ri.values(i0 + 1, k) += p.v * f;
    }
  }
  return ri;
}

DetectedLine line_from_peak(double theta_deg, double xprime, double strength, double inplace_tolerance_deg) {
  double cs = 0.0;
  double sn = 0.0;
  cos_sin_deg(theta_deg, cs, sn);
  if (sn == 0.0) throw InvalidArgument("line_from_peak: vertical line has no slope");
  DetectedLine l;
  l.theta_deg = theta_deg;
  l.xprime = xprime;
  l.slope = cs / sn;
  l.intercept = -xprime / sn;
  l.kind = std::abs(theta_deg - 90.0) <= inplace_tolerance_deg ? MotionKind::InPlace : MotionKind::Translation;
  l.strength = strength;
  return l;
}

std::vector<DetectedLine> find_lines(const RadonImage& ri, std::size_t max_lines, const FindLinesParams& p) {
  if (max_lines < 1) throw InvalidArgument("find_lines: max_lines must be >= 1");
  std::vector<DetectedLine> out;
  const RealMatrix& v = ri.values;
  if (v.empty()) return out;
  const double gmax = *std::max_element(v.data().begin(), v.data().end());
  if (!(gmax > 0.0)) return out;
  std::vector<std::uint8_t> dead(v.size(), 0);
  while (out.size() < max_lines) {
    double best = -1.0;
    std::size_t bi = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!dead[i] && v.data()[i] > best) {
        best = v.data()[i];
        bi = i;
      }
    if (best < 0.0 || best < p.rel_threshold * gmax || !(best > 0.0)) break;
    const std::size_t br = bi / v.cols();
    const std::size_t bc = bi % v.cols();
    const double theta = ri.theta_deg[bc];
    const double xp = ri.xprime_at(br);
    for (std::size_t r = 0; r < v.rows(); ++r) {
      if (std::abs(ri.xprime_at(r) - xp) > p.suppress_xprime) continue;
      for (std::size_t c = 0; c < v.cols(); ++c)
        if (std::abs(ri.theta_deg[c] - theta) <= p.suppress_theta_deg) dead[r * v.cols() + c] = 1;
    }
    if (std::abs(std::sin(deg2rad(theta))) < 1e-9) continue;  // vertical: not a trajectory
    out.push_back(line_from_peak(theta, xp, best, p.inplace_tolerance_deg));
  }
  return out;
}

LinePoint intersect(const DetectedLine& a, const DetectedLine& b) {
  const double dm = a.slope - b.slope;
  if (std::abs(dm) < 1e-12) throw NoIntersection("intersect: lines are parallel");
  LinePoint p;
  p.x = (b.intercept - a.intercept) / dm;
  p.y = a.slope * p.x + a.intercept;
  return p;
}

std::vector<Pixel> bresenham(Pixel p0, Pixel p1) {
  std::vector<Pixel> out;
  std::ptrdiff_t x0 = p0.col;
  std::ptrdiff_t y0 = p0.row;
  const std::ptrdiff_t x1 = p1.col;
  const std::ptrdiff_t y1 = p1.row;
  const std::ptrdiff_t dx = std::abs(x1 - x0);
  const std::ptrdiff_t dy = -std::abs(y1 - y0);
  const std::ptrdiff_t sx = x0 < x1 ? 1 : -1;
  const std::ptrdiff_t sy = y0 < y1 ? 1 : -1;
  std::ptrdiff_t err = dx + dy;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy) + 1));
  for (;;) {
    out.push_back({y0, x0});
    if (x0 == x1 && y0 == y1) break;
    const std::ptrdiff_t e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return out;
}

namespace {

bool inside(const RealMatrix& img, Pixel p) {
  return p.row >= 0 && p.col >= 0 && p.row < static_cast<std::ptrdiff_t>(img.rows()) &&
         p.col < static_cast<std::ptrdiff_t>(img.cols());
}

// Mean along the line; pixels outside the image contribute zero.
double clipped_energy(const RealMatrix& img, Pixel p0, Pixel p1) {
  const auto px = bresenham(p0, p1);
  double s = 0.0;
  for (const Pixel& q : px)
    if (inside(img, q)) s += img(static_cast<std::size_t>(q.row), static_cast<std::size_t>(q.col));
  return s / static_cast<double>(px.size());
}

}  // namespace

double segment_energy(const RealMatrix& img, Pixel p0, Pixel p1) {
  if (!inside(img, p0) || !inside(img, p1)) throw InvalidArgument("segment_energy: endpoint outside the image");
  return clipped_energy(img, p0, p1);
}

Timeline normalize_timeline(std::vector<TimelineInterval> iv, double t_max, double min_interval_s) {
  auto same = [](const TimelineInterval& a, const TimelineInterval& b) {
    return a.kind == b.kind && a.direction == b.direction;
  };
  auto merge_equal = [&]() {
    std::vector<TimelineInterval> out;
    for (const auto& x : iv) {
      if (!out.empty() && same(out.back(), x)) {
        out.back().t1 = x.t1;
        out.back().energy = std::max(out.back().energy, x.energy);
      } else {
        out.push_back(x);
      }
    }
    iv = std::move(out);
  };
  merge_equal();
  while (iv.size() > 1) {
    std::size_t shortest = iv.size();
    double len = min_interval_s;
    for (std::size_t i = 0; i < iv.size(); ++i)
      if (iv[i].t1 - iv[i].t0 < len) {
        len = iv[i].t1 - iv[i].t0;
        shortest = i;
      }
    if (shortest == iv.size()) break;
    std::size_t into;
    if (shortest == 0) {
      into = 1;
    } else if (shortest + 1 == iv.size()) {
      into = shortest - 1;
    } else {
      const double lp = iv[shortest - 1].t1 - iv[shortest - 1].t0;
      const double ln = iv[shortest + 1].t1 - iv[shortest + 1].t0;
      into = lp >= ln ? shortest - 1 : shortest + 1;
    }
    if (into < shortest) {
      iv[into].t1 = iv[shortest].t1;
    } else {
      iv[into].t0 = iv[shortest].t0;
    }
    iv.erase(iv.begin() + static_cast<std::ptrdiff_t>(shortest));
    merge_equal();
  }
  Timeline tl;
  tl.t_max = t_max;
  tl.intervals = std::move(iv);
  for (std::size_t i = 1; i < tl.intervals.size(); ++i) {
    const auto& a = tl.intervals[i - 1];
    const auto& b = tl.intervals[i];
    tl.breakpoints.push_back({b.t0, a.kind, b.kind, b.energy});
  }
  return tl;
}

Timeline build_timeline(const RealMatrix& img, const std::vector<DetectedLine>& lines, const TimelineParams& p) {
  if (lines.empty()) throw InvalidArgument("build_timeline: need at least one line");
  if (img.empty()) throw InvalidArgument("build_timeline: empty image");
  const ImageCenter c = image_center(img.rows(), img.cols());
  const double w = static_cast<double>(img.cols() - 1);
  const double t_max = static_cast<double>(img.cols()) * p.col_step_s;
  auto to_time = [&](double col) { return w > 0.0 ? col * t_max / w : 0.0; };

  std::vector<double> cuts{0.0, w};
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (std::abs(lines[i].slope - lines[j].slope) < 1e-12) continue;
      const double col = intersect(lines[i], lines[j]).x + c.col;
      if (col > 0.0 && col < w) cuts.push_back(col);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             cuts.end());

  std::vector<TimelineInterval> iv;
  std::vector<double> swath;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const auto ca = static_cast<std::ptrdiff_t>(std::lround(a));
    const auto cb = static_cast<std::ptrdiff_t>(std::lround(b));
    std::size_t best = 0;
    double best_e = -1.0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const auto ra = static_cast<std::ptrdiff_t>(std::lround(lines[li].row_at(a, c)));
      const auto rb = static_cast<std::ptrdiff_t>(std::lround(lines[li].row_at(b, c)));
      double e = 0.0;
      for (int d = -p.energy_band_rows; d <= p.energy_band_rows; ++d)
        e = std::max(e, clipped_energy(img, {ra + d, ca}, {rb + d, cb}));
      if (e > best_e) {
        best_e = e;
        best = li;
      }
    }
    const DetectedLine& l = lines[best];
    TimelineInterval ti;
    ti.t0 = to_time(a);
    ti.t1 = to_time(b);
    ti.energy = best_e;
    ti.kind = l.kind;
    if (ti.kind == MotionKind::Translation) ti.direction = l.slope < 0.0 ? Direction::Toward : Direction::Away;
    const double sw = ti.kind == MotionKind::Translation ? std::abs(l.slope) * (b - a) * p.row_step_m : 0.0;
    if (!iv.empty() && iv.back().kind == ti.kind && iv.back().direction == ti.direction) {
      iv.back().t1 = ti.t1;
      iv.back().energy = std::max(iv.back().energy, ti.energy);
      swath.back() += sw;
    } else {
      iv.push_back(ti);
      swath.push_back(sw);
    }
  }
  // The swath rule applies to whole runs, not to pieces cut by spurious lines.
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (iv[i].kind == MotionKind::Translation && swath[i] < p.min_translation_swath_m) {
      iv[i].kind = MotionKind::InPlace;
      iv[i].direction = Direction::None;
    }
  }
  return normalize_timeline(std::move(iv), t_max, p.min_interval_s);
}

Timeline windowed_timeline(const RealMatrix& img, const WindowedRadonParams& p) {
  if (img.empty()) throw InvalidArgument("windowed_timeline: empty image");
  if (p.window_cols < 2 || p.hop_cols < 1 || p.hop_cols > p.window_cols)
    throw InvalidArgument("windowed_timeline: bad window/hop");
  const std::size_t cols = img.cols();
  const double dt = p.timeline.col_step_s;
  const double t_max = static_cast<double>(cols) * dt;

  std::vector<std::size_t> starts;
  if (cols <= p.window_cols) {
    starts.push_back(0);
  } else {
    for (std::size_t s = 0; s + p.window_cols < cols; s += p.hop_cols) starts.push_back(s);
    starts.push_back(cols - p.window_cols);
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  }

  RadarImage whole;
  whole.pixels = img;
  whole.col_axis = {0.0, dt};
  std::vector<TimelineInterval> all;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::size_t s = starts[k];
    const std::size_t e = std::min(cols, s + p.window_cols);
    const double own0 = k == 0 ? 0.0 : 0.5 * static_cast<double>(s + starts[k - 1] + p.window_cols) * dt;
    const double own1 =
        k + 1 == starts.size() ? t_max : 0.5 * static_cast<double>(starts[k + 1] + s + p.window_cols) * dt;
    if (!(own1 > own0)) continue;
    const RealMatrix win = crop_columns(whole, s, e).pixels;
    const auto lines = find_lines(radon_transform(win), p.max_lines, p.lines);
    std::vector<TimelineInterval> local;
    if (lines.empty()) {
      local.push_back({0.0, static_cast<double>(e - s) * dt, MotionKind::InPlace, Direction::None, 0.0});
    } else {
      local = build_timeline(win, lines, p.timeline).intervals;
    }
    const double off = static_cast<double>(s) * dt;
    for (auto ti : local) {
      ti.t0 = std::max(ti.t0 + off, own0);
      ti.t1 = std::min(ti.t1 + off, own1);
      if (ti.t1 > ti.t0) all.push_back(ti);
    }
  }
  return normalize_timeline(std::move(all), t_max, p.timeline.min_interval_s);
}

void write_timeline_csv(const std::filesystem::path& path, const Timeline& tl) {
  std::ostringstream os;
  os << "onset_s,offset_s,kind,direction,source\n";
  char buf[64];
  for (const auto& ti : tl.intervals) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,", ti.t0, ti.t1);
    os << buf << to_string(ti.kind) << ',' << to_string(ti.direction) << ",radon\n";
  }
  detail::write_text(path, os.str());
}

Timeline read_timeline_csv(const std::filesystem::path& path) {
  std::istringstream in(detail::read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("onset_s,offset_s,kind,direction", 0) != 0)
    throw IoError("timeline CSV: bad header in " + path.string());
  std::vector<TimelineInterval> iv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[5];
    for (auto& s : f)
      if (!std::getline(ls, s, ',')) throw IoError("timeline CSV: short row in " + path.string());
    try {
      iv.push_back({std::stod(f[0]), std::stod(f[1]), motion_kind_from_string(f[2]), direction_from_string(f[3]), 0.0});
    } catch (const std::exception&) {
      throw IoError("timeline CSV: malformed row in " + path.string());
    }
  }
  Timeline tl;
  tl.t_max = iv.empty() ? 0.0 : iv.back().t1;
  tl.intervals = iv;
  for (std::size_t i = 1; i < iv.size(); ++i) tl.breakpoints.push_back({iv[i].t0, iv[i - 1].kind, iv[i].kind, 0.0});
  return tl;
}

}  // namespace adlradar
