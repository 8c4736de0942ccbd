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
#include <random>
#include <span>
#include <vector>

#include "adlradar/ethogram.hpp"
#include "adlradar/features.hpp"
#include "adlradar/pipeline.hpp"
#include "adlradar/sim.hpp"

namespace adlradar {

/// Deterministic 64-bit mixing of a base seed with stream indices.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Short recording of one motion class with randomized kinematics.
struct ClassTemplate {
  PersonScript script;
  SegmentKind kind = SegmentKind::InPlace;
  double capture_start = 0.0;  // nominal window, used when detection misses
  double capture_end = 0.0;
};

[[nodiscard]] ClassTemplate class_template(int cls, std::mt19937_64& rng, const MergeParams& merge = {});

struct CorpusOptions {
  std::size_t per_class = 30;
  double snr_min_db = 10.0;
  double snr_max_db = 20.0;
  std::uint64_t seed = 1;
  std::vector<int> classes;  // empty: all 15
};

struct CorpusStats {
  std::size_t detected = 0;   // windows taken from a matching pipeline segment
  std::size_t fallback = 0;   // windows taken from the nominal template
};

/// Synthesizes, processes and captures `per_class` snippets for every class.
/// Capture windows come from the pipeline segment matching the labelled
/// motion, so training data sees the same segmentation as test data.
[[nodiscard]] std::vector<Snippet> synth_corpus(const PipelineConfig& cfg, const CorpusOptions& opt,
                                                CorpusStats* stats = nullptr);

/// Dataset directory layout: <dir>/<roman>/<index>_{md,rm}.rdm.
void write_dataset(const std::filesystem::path& dir, std::span<const Snippet> snippets);
[[nodiscard]] std::vector<Snippet> read_dataset(const std::filesystem::path& dir);

/// Index of the truth interval a segment corresponds to: merged stops and
/// starts match an I..IV or XIV/XV interval within `tolerance_s` of their
/// boundary; in-place segments match the most-overlapping V..XIII interval.
[[nodiscard]] std::optional<std::size_t> match_truth(const MotionSegment& seg, std::span<const TruthInterval> truth,
                                                     double tolerance_s = 1.0);

/// Segments an ideal detector would produce for a scenario's truth.
[[nodiscard]] std::vector<MotionSegment> truth_segments(const Scenario& sc, const MergeParams& merge = {});

/// Scripted multi-motion recordings (1..3). A non-null rng jitters ranges,
/// speeds and motion amplitudes.
[[nodiscard]] PersonScript example_script(int which, std::mt19937_64* rng = nullptr);
/// Expected decoded state trace of an example.
[[nodiscard]] std::vector<State> example_state_trace(int which);
/// Expected labels of the classified events of an example, chronological.
[[nodiscard]] std::vector<int> example_labels(int which);

}  // namespace adlradar
