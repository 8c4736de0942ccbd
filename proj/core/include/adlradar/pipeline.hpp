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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlradar/ethogram.hpp"
#include "adlradar/features.hpp"
#include "adlradar/pbc.hpp"
#include "adlradar/preprocess.hpp"
#include "adlradar/radon.hpp"
#include "adlradar/rdmap.hpp"
#include "adlradar/sim.hpp"

namespace adlradar {

struct SnippetParams {
  std::size_t eta = 128;
  std::size_t rm_rows = 128;  // range rows kept around the target
};

struct PipelineConfig {
  RadarParams radar;  // used by `simulate` when a scenario omits params
  CleanParams clean;
  StftParams stft;
  PbcParams pbc;
  MergeParams merge;
  WindowedRadonParams radon;
  SnippetParams snippet;
  DecodeOptions decode;
  std::size_t r1 = 10;               // first range bin summed for the spectrogram
  std::size_t r2 = 128;              // last range bin summed for the spectrogram
  std::size_t rangemap_bins = 256;   // range bins kept from the range-map
  std::size_t radon_rows = 128;
  double radon_cols_per_s = 32.0;
  std::size_t knn_k = 1;

  PipelineConfig();
  void validate() const;
};

[[nodiscard]] PipelineConfig parse_pipeline_config(std::string_view json_text);
[[nodiscard]] PipelineConfig load_pipeline_config(const std::filesystem::path& path);
[[nodiscard]] std::string pipeline_config_to_json(const PipelineConfig& cfg);

/// Classifier spec with any configured dimension override applied.
[[nodiscard]] ClassifierSpec resolve_classifier(const PipelineConfig& cfg, const ClassifierSpec& spec);

struct PipelineImages {
  RadarImage rangemap_db;  // rangemap_bins x M, 10 log10 |R|
  RadarImage md_db;        // L x frames, 10 log10 of the STFT power
  RealMatrix md_clean;     // cleaned spectrogram
  double duration = 0.0;
};

[[nodiscard]] PipelineImages compute_images(const BasebandMatrix& bb, const PipelineConfig& cfg);

struct PipelineResult {
  PipelineImages images;
  RadarImage radon_input;  // cleaned, subsampled range-map
  RadonImage radon;        // transform of the whole cleaned range-map
  Timeline timeline;
  std::vector<double> pc;
  std::vector<double> pcf;
  double frame_rate = 0.0;
  std::vector<MotionSegment> pbc_segments;
  std::vector<MotionSegment> segments;
};

[[nodiscard]] PipelineResult run_pipeline(const BasebandMatrix& bb, const PipelineConfig& cfg);

/// Cleaned range-map at radon_rows x (duration * radon_cols_per_s).
[[nodiscard]] RadarImage radon_input_image(const RadarImage& rangemap_db, const PipelineConfig& cfg);

/// Micro-Doppler and range-map images of the window [t0, t1).
[[nodiscard]] Snippet capture_snippet(const PipelineImages& img, double t0, double t1, const SnippetParams& p,
                                      const CleanParams& clean);

/// Writes rangemap.pgm, spectrogram.pgm, radon.pgm, pbc.csv, timeline.csv,
/// segments.csv and snippets/seg_<i>_{md,rm}.rdm for classifiable segments.
void write_pipeline_outputs(const PipelineResult& res, const PipelineConfig& cfg, const std::filesystem::path& out_dir);

/// Snippet of every classifiable segment (empty snippets elsewhere).
[[nodiscard]] std::vector<Snippet> segment_snippets(const PipelineResult& res, const PipelineConfig& cfg);

/// Nearest-neighbour classifier over per-segment snippets; empty snippets
/// have no features.
[[nodiscard]] SegmentClassifier snippet_classifier(const FeatureModel& model, std::span<const Snippet> snippets,
                                                   std::size_t k = 1);

/// Reads snippets/seg_<i>_{md,rm}.rdm for `count` segments; missing pairs
/// stay empty.
[[nodiscard]] std::vector<Snippet> read_segment_snippets(const std::filesystem::path& dir, std::size_t count);

}  // namespace adlradar
