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

#include "adlradar/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "binio.hpp"

namespace adlradar {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

std::pair<double, double> band_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("band must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

WindowKind window_from_string(const std::string& s) {
  if (s == "hanning") return WindowKind::Hanning;
  if (s == "rectangular") return WindowKind::Rectangular;
  throw InvalidArgument("unknown window: " + s);
}

std::string_view window_name(WindowKind k) { return k == WindowKind::Hanning ? "hanning" : "rectangular"; }

std::size_t clamp_index(double x, std::size_t n) {
  if (!(x > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(x), n);
}

RealMatrix columns_of(const RealMatrix& src, std::size_t c0, std::size_t c1) {
  RealMatrix out(src.rows(), c1 - c0);
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = c0; c < c1; ++c) out(r, c - c0) = src(r, c);
  return out;
}

// Column range [c0, c1) covering [t0, t1) on an axis of `step` seconds, at
// least two columns wide.
std::pair<std::size_t, std::size_t> column_window(double t0, double t1, double step, std::size_t n) {
  if (n < 2) throw ProcessingError("image too short for a snippet");
  std::size_t c0 = clamp_index(std::floor(t0 / step), n);
  std::size_t c1 = clamp_index(std::ceil(t1 / step), n);
  if (c1 < c0 + 2) {
    c1 = std::min(n, c0 + 2);
    c0 = c1 - 2;
  }
  return {c0, c1};
}

// Runs one pipeline stage, prefixing failures with its name.
template <typename F>
void staged(const char* name, F&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("stage ") + name + ": " + e.what());
  } catch (const Error& e) {
    throw ProcessingError(std::string("stage ") + name + ": " + e.what());
  }
}

void scale_to_unit_max(RealMatrix& m) {
  double mx = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) mx = std::max(mx, m.data()[i]);
  if (mx <= 0.0) return;
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] /= mx;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  radon.lines.rel_threshold = 0.15;
  // The per-classifier registry dims underfit simulated data; every classifier
  // starts at the model default and the config may lower individual ids.
  for (const auto& spec : classifier_registry()) decode.dims_override[spec.id] = FeatureDims{14, 4};
}

void PipelineConfig::validate() const {
  radar.validate();
  clean.validate();
  stft.validate();
  pbc.validate();
  if (r1 > r2) throw InvalidArgument("r1 must not exceed r2");
  if (rangemap_bins == 0 || radon_rows == 0) throw InvalidArgument("image sizes must be positive");
  if (radon_rows > rangemap_bins) throw InvalidArgument("radon_rows must not exceed rangemap_bins");
  if (!(radon_cols_per_s > 0.0)) throw InvalidArgument("radon_cols_per_s must be positive");
  if (snippet.eta < 2 || snippet.rm_rows < 2) throw InvalidArgument("snippet sizes must be at least 2");
  if (radon.window_cols < 8 || radon.hop_cols == 0 || radon.hop_cols > radon.window_cols)
    throw InvalidArgument("invalid radon window/hop");
  if (knn_k == 0) throw InvalidArgument("knn_k must be positive");
  if (!(decode.margin_tau >= 0.0)) throw InvalidArgument("margin_tau must be nonnegative");
  const auto& reg = classifier_registry();
  for (const auto& [id, dims] : decode.dims_override) {
    if (std::none_of(reg.begin(), reg.end(), [id = id](const ClassifierSpec& s) { return s.id == id; }))
      throw InvalidArgument("unknown classifier id in dims override: " + std::to_string(id));
    if (dims.d_md == 0 || dims.d_rm == 0 || dims.d_md > snippet.eta || dims.d_rm > snippet.eta)
      throw InvalidArgument("dims override out of range for classifier " + std::to_string(id));
  }
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  PipelineConfig cfg;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    if (j.contains("radar")) {
      const json& r = j.at("radar");
      read_if(r, "fc", cfg.radar.fc);
      read_if(r, "bandwidth", cfg.radar.bandwidth);
      read_if(r, "pri", cfg.radar.pri);
      read_if(r, "fast_samples", cfg.radar.fast_samples);
      read_if(r, "num_pri", cfg.radar.num_pri);
    }
    if (j.contains("clean")) {
      const json& c = j.at("clean");
      read_if(c, "keep_bins", cfg.clean.keep_bins);
      read_if(c, "keep_fraction", cfg.clean.keep_fraction);
      read_if(c, "histogram_bins", cfg.clean.histogram_bins);
      read_if(c, "outlier_min_pixels_rm", cfg.clean.outlier_min_pixels_rm);
      read_if(c, "outlier_min_pixels_md", cfg.clean.outlier_min_pixels_md);
      read_if(c, "kernel_win", cfg.clean.kernel_win);
    }
    if (j.contains("stft")) {
      const json& s = j.at("stft");
      read_if(s, "L", cfg.stft.L);
      read_if(s, "hop", cfg.stft.hop);
      if (s.contains("window")) cfg.stft.window = window_from_string(s.at("window").get<std::string>());
    }
    if (j.contains("pbc")) {
      const json& p = j.at("pbc");
      if (p.contains("pos_band")) cfg.pbc.pos_band = band_from_json(p.at("pos_band"));
      if (p.contains("neg_band")) cfg.pbc.neg_band = band_from_json(p.at("neg_band"));
      read_if(p, "w", cfg.pbc.w);
      read_if(p, "threshold_frac", cfg.pbc.threshold_frac);
      read_if(p, "min_duration_s", cfg.pbc.min_duration_s);
      read_if(p, "join_gap_s", cfg.pbc.join_gap_s);
    }
    if (j.contains("merge")) {
      const json& m = j.at("merge");
      read_if(m, "stop_before_s", cfg.merge.stop_before_s);
      read_if(m, "stop_after_s", cfg.merge.stop_after_s);
      read_if(m, "start_after_s", cfg.merge.start_after_s);
      read_if(m, "event_len_s", cfg.merge.event_len_s);
    }
    if (j.contains("radon")) {
      const json& r = j.at("radon");
      read_if(r, "window_cols", cfg.radon.window_cols);
      read_if(r, "hop_cols", cfg.radon.hop_cols);
      read_if(r, "max_lines", cfg.radon.max_lines);
      read_if(r, "rel_threshold", cfg.radon.lines.rel_threshold);
      read_if(r, "suppress_theta_deg", cfg.radon.lines.suppress_theta_deg);
      read_if(r, "suppress_xprime", cfg.radon.lines.suppress_xprime);
      read_if(r, "inplace_tolerance_deg", cfg.radon.lines.inplace_tolerance_deg);
      read_if(r, "min_translation_swath_m", cfg.radon.timeline.min_translation_swath_m);
      read_if(r, "min_interval_s", cfg.radon.timeline.min_interval_s);
      read_if(r, "energy_band_rows", cfg.radon.timeline.energy_band_rows);
      read_if(r, "rows", cfg.radon_rows);
      read_if(r, "cols_per_s", cfg.radon_cols_per_s);
    }
    if (j.contains("snippet")) {
      const json& s = j.at("snippet");
      read_if(s, "eta", cfg.snippet.eta);
      read_if(s, "rm_rows", cfg.snippet.rm_rows);
    }
    if (j.contains("decode")) {
      const json& d = j.at("decode");
      read_if(d, "margin_tau", cfg.decode.margin_tau);
      if (d.contains("initial_states")) {
        cfg.decode.initial_states.clear();
        for (const auto& s : d.at("initial_states")) cfg.decode.initial_states.push_back(state_from_string(s.get<std::string>()));
        std::ranges::sort(cfg.decode.initial_states);
      }
      read_if(d, "knn_k", cfg.knn_k);
    }
    read_if(j, "r1", cfg.r1);
    read_if(j, "r2", cfg.r2);
    read_if(j, "rangemap_bins", cfg.rangemap_bins);
    if (j.contains("dims")) {
      for (const auto& [key, val] : j.at("dims").items()) {
        std::size_t pos = 0;
        int id = 0;
        try {
          id = std::stoi(key, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != key.size()) throw InvalidArgument("dims keys must be classifier ids, got '" + key + "'");
        FeatureDims fd;
        read_if(val, "d_md", fd.d_md);
        read_if(val, "d_rm", fd.d_rm);
        cfg.decode.dims_override[id] = fd;
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(detail::read_text(path));
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  json dims = json::object();
  for (const auto& [id, d] : cfg.decode.dims_override) dims[std::to_string(id)] = {{"d_md", d.d_md}, {"d_rm", d.d_rm}};
  json states = json::array();
  for (State s : cfg.decode.initial_states) states.push_back(std::string(to_string(s)));
  const json j = {
      {"radar",
       {{"fc", cfg.radar.fc},
        {"bandwidth", cfg.radar.bandwidth},
        {"pri", cfg.radar.pri},
        {"fast_samples", cfg.radar.fast_samples},
        {"num_pri", cfg.radar.num_pri}}},
      {"clean",
       {{"keep_bins", cfg.clean.keep_bins},
        {"keep_fraction", cfg.clean.keep_fraction},
        {"histogram_bins", cfg.clean.histogram_bins},
        {"outlier_min_pixels_rm", cfg.clean.outlier_min_pixels_rm},
        {"outlier_min_pixels_md", cfg.clean.outlier_min_pixels_md},
        {"kernel_win", cfg.clean.kernel_win}}},
      {"stft", {{"L", cfg.stft.L}, {"hop", cfg.stft.hop}, {"window", window_name(cfg.stft.window)}}},
      {"pbc",
       {{"pos_band", {cfg.pbc.pos_band.first, cfg.pbc.pos_band.second}},
        {"neg_band", {cfg.pbc.neg_band.first, cfg.pbc.neg_band.second}},
        {"w", cfg.pbc.w},
        {"threshold_frac", cfg.pbc.threshold_frac},
        {"min_duration_s", cfg.pbc.min_duration_s},
        {"join_gap_s", cfg.pbc.join_gap_s}}},
      {"merge",
       {{"stop_before_s", cfg.merge.stop_before_s},
        {"stop_after_s", cfg.merge.stop_after_s},
        {"start_after_s", cfg.merge.start_after_s},
        {"event_len_s", cfg.merge.event_len_s}}},
      {"radon",
       {{"window_cols", cfg.radon.window_cols},
        {"hop_cols", cfg.radon.hop_cols},
        {"max_lines", cfg.radon.max_lines},
        {"rel_threshold", cfg.radon.lines.rel_threshold},
        {"suppress_theta_deg", cfg.radon.lines.suppress_theta_deg},
        {"suppress_xprime", cfg.radon.lines.suppress_xprime},
        {"inplace_tolerance_deg", cfg.radon.lines.inplace_tolerance_deg},
        {"min_translation_swath_m", cfg.radon.timeline.min_translation_swath_m},
        {"min_interval_s", cfg.radon.timeline.min_interval_s},
        {"energy_band_rows", cfg.radon.timeline.energy_band_rows},
        {"rows", cfg.radon_rows},
        {"cols_per_s", cfg.radon_cols_per_s}}},
      {"snippet", {{"eta", cfg.snippet.eta}, {"rm_rows", cfg.snippet.rm_rows}}},
      {"decode", {{"margin_tau", cfg.decode.margin_tau}, {"initial_states", states}, {"knn_k", cfg.knn_k}}},
      {"r1", cfg.r1},
      {"r2", cfg.r2},
      {"rangemap_bins", cfg.rangemap_bins},
      {"dims", dims},
  };
  return j.dump(2) + "\n";
}

ClassifierSpec resolve_classifier(const PipelineConfig& cfg, const ClassifierSpec& spec) {
  ClassifierSpec out = spec;
  if (auto it = cfg.decode.dims_override.find(spec.id); it != cfg.decode.dims_override.end()) out.dims = it->second;
  return out;
}

PipelineImages compute_images(const BasebandMatrix& bb, const PipelineConfig& cfg) {
  if (bb.num_pri() == 0 || bb.fast_samples() == 0) throw InvalidArgument("empty baseband input");
  PipelineImages out;
  const ComplexRangeMap rm = range_map(bb);
  out.rangemap_db = rangemap_db(rm, std::min(cfg.rangemap_bins, rm.bins()));
  const std::vector<cplx> v = range_bin_sum(rm, cfg.r1, std::min(cfg.r2, rm.bins() - 1));
  out.md_db = spectrogram(v, cfg.stft, rm.pri());
  out.md_db.pixels = log_magnitude(out.md_db.pixels);
  out.md_clean = clean_spectrogram(out.md_db.pixels, cfg.clean);
  out.duration = bb.params().duration();
  return out;
}

RadarImage radon_input_image(const RadarImage& rangemap_db, const PipelineConfig& cfg) {
  const double duration = rangemap_db.col_axis.step * static_cast<double>(rangemap_db.cols());
  const auto cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(duration * cfg.radon_cols_per_s)));
  RadarImage img = resize(rangemap_db, std::min(cfg.radon_rows, rangemap_db.rows()), cols, ResizeMethod::Subsample);
  img.pixels = clean_rangemap(smooth3x3(img.pixels), cfg.clean);
  return img;
}

PipelineResult run_pipeline(const BasebandMatrix& bb, const PipelineConfig& cfg) {
  PipelineResult res;
  staged("images", [&] { res.images = compute_images(bb, cfg); });
  staged("radon", [&] {
    res.radon_input = radon_input_image(res.images.rangemap_db, cfg);
    WindowedRadonParams wp = cfg.radon;
    wp.timeline.col_step_s = res.radon_input.col_axis.step;
    wp.timeline.row_step_m = res.radon_input.row_axis.step;
    res.timeline = windowed_timeline(res.radon_input.pixels, wp);
    res.radon = radon_transform(res.radon_input.pixels);
  });
  staged("pbc", [&] {
    RadarImage md = res.images.md_db;
    md.pixels = res.images.md_clean;
    res.pc = power_burst(md, cfg.pbc);
    res.pcf = smooth_pbc(res.pc, cfg.pbc.w);
    res.frame_rate = 1.0 / md.col_axis.step;
    res.pbc_segments = threshold_segments(res.pcf, cfg.pbc.threshold_frac, res.frame_rate, cfg.pbc.min_duration_s,
                                          cfg.pbc.join_gap_s);
  });
  staged("merge", [&] { res.segments = merge_events(res.timeline, res.pbc_segments, res.images.duration, cfg.merge); });
  return res;
}

Snippet capture_snippet(const PipelineImages& img, double t0, double t1, const SnippetParams& p,
                        const CleanParams& clean) {
  if (!(t1 > t0)) throw InvalidArgument("snippet window must have positive length");
  Snippet s;

  // Both images are cleaned within the window so a snippet does not depend
  // on the rest of the recording.
  const auto [m0, m1] = column_window(t0, t1, img.md_db.col_axis.step, img.md_db.cols());
  s.md = resize(clean_spectrogram(columns_of(img.md_db.pixels, m0, m1), clean), p.eta, p.eta, ResizeMethod::Linear);
  scale_to_unit_max(s.md);

  const RealMatrix& rdb = img.rangemap_db.pixels;
  const auto [r0, r1] = column_window(t0, t1, img.rangemap_db.col_axis.step, rdb.cols());
  RealMatrix rm = resize(columns_of(rdb, r0, r1), rdb.rows(), p.eta, ResizeMethod::Linear);
  rm = eclean(column_normalize(floor_reference(rm)), clean, CleanMode::RangeMap);

  // Recentre on the mean strongest row.
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < rm.cols(); ++c) {
    std::size_t best = 0;
    double mx = 0.0;
    for (std::size_t r = 0; r < rm.rows(); ++r)
      if (rm(r, c) > mx) {
        mx = rm(r, c);
        best = r;
      }
    if (mx > 0.0) {
      acc += static_cast<double>(best);
      ++used;
    }
  }
  const auto centre = used ? static_cast<std::ptrdiff_t>(std::lround(acc / static_cast<double>(used)))
                           : static_cast<std::ptrdiff_t>(rm.rows() / 2);
  const auto half = static_cast<std::ptrdiff_t>(p.rm_rows / 2);
  RealMatrix win(p.rm_rows, rm.cols(), 0.0);
  for (std::size_t r = 0; r < p.rm_rows; ++r) {
    const std::ptrdiff_t src = centre - half + static_cast<std::ptrdiff_t>(r);
    if (src < 0 || src >= static_cast<std::ptrdiff_t>(rm.rows())) continue;
    for (std::size_t c = 0; c < rm.cols(); ++c) win(r, c) = rm(static_cast<std::size_t>(src), c);
  }
  s.rm = p.rm_rows == p.eta ? std::move(win) : resize(win, p.eta, p.eta, ResizeMethod::Linear);
  s.center_shifted = true;
  return s;
}

std::vector<Snippet> segment_snippets(const PipelineResult& res, const PipelineConfig& cfg) {
  std::vector<Snippet> out(res.segments.size());
  for (std::size_t i = 0; i < res.segments.size(); ++i) {
    const MotionSegment& seg = res.segments[i];
    if (!seg.classifiable()) continue;
    out[i] = capture_snippet(res.images, seg.capture_start, seg.capture_end, cfg.snippet, cfg.clean);
  }
  return out;
}

void write_pipeline_outputs(const PipelineResult& res, const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_pgm(out_dir / "rangemap.pgm", res.images.rangemap_db.pixels);
  write_pgm(out_dir / "spectrogram.pgm", res.images.md_db.pixels);
  write_pgm(out_dir / "radon.pgm", res.radon.values);
  write_pgm(out_dir / "rangemap_clean.pgm", res.radon_input.pixels);
  write_pbc_csv(out_dir / "pbc.csv", res.pc, res.pcf, res.frame_rate);
  write_timeline_csv(out_dir / "timeline.csv", res.timeline);
  write_segments_csv(out_dir / "segments.csv", res.segments);

  const std::vector<Snippet> snippets = segment_snippets(res, cfg);
  const auto dir = out_dir / "snippets";
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    if (snippets[i].md.empty()) continue;
    const std::string stem = "seg_" + std::to_string(i);
    write_rdm(dir / (stem + "_md.rdm"), RadarImage{snippets[i].md, {}, {}, ImageKind::Generic});
    write_rdm(dir / (stem + "_rm.rdm"), RadarImage{snippets[i].rm, {}, {}, ImageKind::Generic});
  }
}

SegmentClassifier snippet_classifier(const FeatureModel& model, std::span<const Snippet> snippets, std::size_t k) {
  std::vector<Eigen::VectorXd> feats(snippets.size());
  for (std::size_t i = 0; i < snippets.size(); ++i)
    if (!snippets[i].md.empty()) feats[i] = model.features(snippets[i]);
  return make_nn_classifier(model, std::move(feats), k);
}

std::vector<Snippet> read_segment_snippets(const std::filesystem::path& dir, std::size_t count) {
  std::vector<Snippet> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string stem = "seg_" + std::to_string(i);
    const auto md = dir / (stem + "_md.rdm");
    const auto rm = dir / (stem + "_rm.rdm");
    if (!std::filesystem::exists(md) || !std::filesystem::exists(rm)) continue;
    out[i].md = read_rdm(md).pixels;
    out[i].rm = read_rdm(rm).pixels;
    out[i].center_shifted = true;
  }
  return out;
}

}  // namespace adlradar
