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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlradar/features.hpp"
#include "adlradar/pbc.hpp"

namespace adlradar {

/// Motion classes I..XV; the numeric value is the class id used as label.
enum class MotionClass : int {
  I = 1, II, III, IV, V, VI, VII, VIII, IX, X, XI, XII, XIII, XIV, XV
};

inline constexpr int kNumClasses = 15;

[[nodiscard]] std::string_view roman(int cls);
[[nodiscard]] int class_from_roman(std::string_view s);  // 0 if not a class id
[[nodiscard]] std::string_view class_name(int cls);

/// Walking, standing and laying come in toward/away groups; sitting is shared.
enum class State : std::uint8_t { WS_T, WS_A, StS_T, StS_A, SiS, LS_T, LS_A };
inline constexpr std::size_t kNumStates = 7;

[[nodiscard]] std::string_view to_string(State s);
[[nodiscard]] State state_from_string(std::string_view s);
[[nodiscard]] bool is_walking(State s);
[[nodiscard]] bool is_standing(State s);
[[nodiscard]] State walking_state(Direction d);

enum class EdgeContext { WalkStop, InPlace, WalkStart, Unclassified };
enum class TimeDirection { Forward, Backward };

[[nodiscard]] std::string_view to_string(EdgeContext c);

struct Edge {
  int cls = 0;  // 0 for unclassified transitions (turning, plain walking)
  State from;
  State to;
  EdgeContext ctx;
};

using StateSet = std::vector<State>;  // sorted, unique

class StateDiagram {
 public:
  /// The ethogram used throughout: 15 classed edges plus unclassified
  /// turn/walk links between standing and walking states.
  static const StateDiagram& standard();

  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::vector<Edge> edges_of_class(int cls) const;
  [[nodiscard]] std::vector<Edge> outgoing(State s, std::optional<EdgeContext> ctx = std::nullopt) const;
  [[nodiscard]] std::vector<Edge> incoming(State s, std::optional<EdgeContext> ctx = std::nullopt) const;
  [[nodiscard]] bool has_edge(int cls, State from, State to) const;
  [[nodiscard]] std::string to_json() const;

  explicit StateDiagram(std::vector<Edge> edges) : edges_(std::move(edges)) {}

 private:
  std::vector<Edge> edges_;
};

struct ClassifierSpec {
  int id = 0;
  std::vector<int> classes;  // sorted
  FeatureDims dims;
};

/// Classifiers 1..11 with their class sets and PCA dimensions.
[[nodiscard]] const std::vector<ClassifierSpec>& classifier_registry();
/// Exact match, else the smallest registered superset restricted to `classes`
/// (keeping its dims), else an ad hoc id-0 spec with default dims.
[[nodiscard]] ClassifierSpec lookup_classifier(std::vector<int> classes);

struct ClassQuery {
  std::vector<int> classes;  // sorted
  ClassifierSpec classifier;
};

/// Outgoing (forward) or incoming (backward) classed edges of the states in
/// `plausible`, optionally restricted to one context.
[[nodiscard]] ClassQuery class_set(const StateDiagram& g, std::span<const State> plausible, TimeDirection dir,
                                   std::optional<EdgeContext> ctx = std::nullopt);
[[nodiscard]] ClassQuery class_set(const StateDiagram& g, State s, TimeDirection dir,
                                   std::optional<EdgeContext> ctx = std::nullopt);

class DecodeInconsistency : public ProcessingError {
 public:
  DecodeInconsistency(std::size_t segment, const std::string& what)
      : ProcessingError("decode inconsistency at segment " + std::to_string(segment) + ": " + what),
        segment_(segment) {}
  [[nodiscard]] std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

/// Classifies segment `index` among `classes` using `dims`.
using SegmentClassifier = std::function<Classification(std::size_t index, std::span<const int> classes, FeatureDims dims)>;

/// Nearest-neighbour classifier over precomputed fused vectors (one per segment).
[[nodiscard]] SegmentClassifier make_nn_classifier(const FeatureModel& model, std::vector<Eigen::VectorXd> features,
                                                   std::size_t k = 1);

struct DecodeOptions {
  double margin_tau = 0.05;
  StateSet initial_states{State::StS_T};  // used when the first segment is not walking
  std::map<int, FeatureDims> dims_override;  // by classifier id; replaces the registry dims
};

struct DecodedEvent {
  std::size_t segment = 0;
  SegmentKind kind = SegmentKind::InPlace;
  int label = 0;  // 0: unclassified
  int classifier_id = 0;
  double margin = 1.0;
  std::vector<int> class_set;
  State state_before = State::StS_T;
  State state_after = State::StS_T;
};

struct DecodedTimeline {
  std::vector<DecodedEvent> events;  // chronological in both directions
  TimeDirection direction = TimeDirection::Forward;

  /// First state, then the state after every classified or transition event.
  [[nodiscard]] std::vector<State> state_trace() const;
  /// Labels of classified in-place and merged events, chronological.
  [[nodiscard]] std::vector<int> labels() const;
};

[[nodiscard]] DecodedTimeline decode_forward(const StateDiagram& g, std::span<const MotionSegment> segments,
                                             const SegmentClassifier& classify, const DecodeOptions& opts = {});
[[nodiscard]] DecodedTimeline decode_backward(const StateDiagram& g, std::span<const MotionSegment> segments,
                                              const SegmentClassifier& classify, const DecodeOptions& opts = {});

struct ReconcileRow {
  std::size_t segment = 0;
  int fwd_label = 0;
  int bwd_label = 0;
  double fwd_margin = 0.0;
  double bwd_margin = 0.0;
  bool agree = false;
};

struct ReconcileReport {
  std::vector<ReconcileRow> rows;
  [[nodiscard]] double agreement_rate() const;
};

[[nodiscard]] ReconcileReport reconcile(const DecodedTimeline& fwd, const DecodedTimeline& bwd);

/// onset_s, offset_s, fwd_label, bwd_label, state_after, margin. Either
/// timeline may be null; missing labels are written as "-".
void write_decoded_csv(const std::filesystem::path& path, std::span<const MotionSegment> segments,
                       const DecodedTimeline* fwd, const DecodedTimeline* bwd);
void write_reconcile_csv(const std::filesystem::path& path, const ReconcileReport& report);

}  // namespace adlradar
