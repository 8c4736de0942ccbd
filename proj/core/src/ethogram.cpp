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

#include "adlradar/ethogram.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binio.hpp"

namespace adlradar {

namespace {

constexpr std::array<std::string_view, kNumClasses> kRoman = {"I",  "II",  "III",  "IV",  "V",
                                                              "VI", "VII", "VIII", "IX",  "X",
                                                              "XI", "XII", "XIII", "XIV", "XV"};

constexpr std::array<std::string_view, kNumClasses> kNames = {
    "T-Walking-Stop/Bent",   "T-Walking-Fall",        "A-Walking-Stop/Bent",   "A-Walking-Fall",
    "Sitting down",          "T-Bending w. Standing", "A-Bending w. Standing", "T-Falling f. Standing",
    "A-Falling f. Standing", "T-Standing f. Falling", "A-Standing f. Falling", "Standing f. Sitting",
    "Bending w. Sitting",    "Standing up - Walking", "Start Walking"};

constexpr std::array<std::string_view, kNumStates> kStateNames = {"WS_T", "WS_A", "StS_T", "StS_A",
                                                                  "SiS",  "LS_T", "LS_A"};

int id(MotionClass c) { return static_cast<int>(c); }

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(StateSet& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool contains(const StateSet& s, State x) { return std::find(s.begin(), s.end(), x) != s.end(); }

}  // namespace

std::string_view roman(int cls) {
  if (cls < 1 || cls > kNumClasses) return "-";
  return kRoman[static_cast<std::size_t>(cls - 1)];
}

int class_from_roman(std::string_view s) {
  for (std::size_t i = 0; i < kRoman.size(); ++i)
    if (kRoman[i] == s) return static_cast<int>(i) + 1;
  return 0;
}

std::string_view class_name(int cls) {
  if (cls < 1 || cls > kNumClasses) return "unclassified";
  return kNames[static_cast<std::size_t>(cls - 1)];
}

std::string_view to_string(State s) { return kStateNames[static_cast<std::size_t>(s)]; }

State state_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i)
    if (kStateNames[i] == s) return static_cast<State>(i);
  throw InvalidArgument("unknown state '" + std::string(s) + "'");
}

bool is_walking(State s) { return s == State::WS_T || s == State::WS_A; }
bool is_standing(State s) { return s == State::StS_T || s == State::StS_A; }

State walking_state(Direction d) {
  if (d == Direction::None) throw InvalidArgument("walking state needs a direction");
  return d == Direction::Toward ? State::WS_T : State::WS_A;
}

std::string_view to_string(EdgeContext c) {
  switch (c) {
    case EdgeContext::WalkStop: return "walk_stop";
    case EdgeContext::InPlace: return "inplace";
    case EdgeContext::WalkStart: return "walk_start";
    case EdgeContext::Unclassified: return "unclassified";
  }
  return "unclassified";
}

const StateDiagram& StateDiagram::standard() {
  using S = State;
  using C = MotionClass;
  using E = EdgeContext;
  static const StateDiagram g({
      {id(C::I), S::WS_T, S::StS_T, E::WalkStop},
      {id(C::II), S::WS_T, S::LS_T, E::WalkStop},
      {id(C::III), S::WS_A, S::StS_A, E::WalkStop},
      {id(C::IV), S::WS_A, S::LS_A, E::WalkStop},
      {id(C::V), S::StS_T, S::SiS, E::InPlace},
      {id(C::V), S::StS_A, S::SiS, E::InPlace},
      {id(C::VI), S::StS_T, S::StS_T, E::InPlace},
      {id(C::VII), S::StS_A, S::StS_A, E::InPlace},
      {id(C::VIII), S::StS_T, S::LS_T, E::InPlace},
      {id(C::IX), S::StS_A, S::LS_A, E::InPlace},
      {id(C::X), S::LS_T, S::StS_T, E::InPlace},
      {id(C::XI), S::LS_A, S::StS_A, E::InPlace},
      {id(C::XII), S::SiS, S::StS_T, E::InPlace},
      {id(C::XIII), S::SiS, S::SiS, E::InPlace},
      {id(C::XIV), S::SiS, S::WS_T, E::WalkStart},
      {id(C::XV), S::StS_T, S::WS_T, E::WalkStart},
      // Turning while standing and walking without a classed transition.
      {0, S::StS_T, S::StS_A, E::Unclassified},
      {0, S::StS_A, S::StS_T, E::Unclassified},
      {0, S::StS_T, S::WS_A, E::Unclassified},
      {0, S::StS_A, S::WS_A, E::Unclassified},
      {0, S::StS_A, S::WS_T, E::Unclassified},
      {0, S::WS_T, S::StS_T, E::Unclassified},
      {0, S::WS_A, S::StS_A, E::Unclassified},
  });
  return g;
}

std::vector<Edge> StateDiagram::edges_of_class(int cls) const {
  std::vector<Edge> out;
  for (const auto& e : edges_)
    if (e.cls == cls) out.push_back(e);
  return out;
}

std::vector<Edge> StateDiagram::outgoing(State s, std::optional<EdgeContext> ctx) const {
  std::vector<Edge> out;
  for (const auto& e : edges_)
    if (e.from == s && (!ctx || e.ctx == *ctx)) out.push_back(e);
  return out;
}

std::vector<Edge> StateDiagram::incoming(State s, std::optional<EdgeContext> ctx) const {
  std::vector<Edge> out;
  for (const auto& e : edges_)
    if (e.to == s && (!ctx || e.ctx == *ctx)) out.push_back(e);
  return out;
}

bool StateDiagram::has_edge(int cls, State from, State to) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.cls == cls && e.from == from && e.to == to; });
}

std::string StateDiagram::to_json() const {
  nlohmann::json j;
  j["states"] = nlohmann::json::array();
  for (auto s : kStateNames) j["states"].push_back(s);
  j["classes"] = nlohmann::json::array();
  for (int c = 1; c <= kNumClasses; ++c) j["classes"].push_back({{"id", c}, {"roman", roman(c)}, {"name", class_name(c)}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges_)
    j["edges"].push_back({{"class", e.cls == 0 ? nlohmann::json(nullptr) : nlohmann::json(roman(e.cls))},
                          {"from", to_string(e.from)},
                          {"to", to_string(e.to)},
                          {"context", to_string(e.ctx)}});
  return j.dump(1);
}

const std::vector<ClassifierSpec>& classifier_registry() {
  using C = MotionClass;
  auto spec = [](int cid, std::vector<int> cls, std::size_t dmd, std::size_t drm) {
    sort_unique(cls);
    return ClassifierSpec{cid, std::move(cls), {dmd, drm}};
  };
  static const std::vector<ClassifierSpec> reg = {
      spec(1, {id(C::I), id(C::II)}, 2, 1),
      spec(2, {id(C::VI), id(C::V), id(C::VIII), id(C::X)}, 6, 2),
      spec(3, {id(C::XV), id(C::XIV)}, 14, 4),
      spec(4, {id(C::XII), id(C::VI), id(C::VII), id(C::X), id(C::XI)}, 7, 2),
      spec(5, {id(C::V), id(C::VI), id(C::VIII)}, 6, 2),
      spec(6, {id(C::XII), id(C::XIII)}, 14, 4),
      spec(7, {id(C::V), id(C::XIII)}, 14, 4),
      spec(8, {id(C::III), id(C::IV)}, 10, 2),
      spec(9, {id(C::V), id(C::VII), id(C::IX), id(C::XI)}, 10, 2),
      spec(10, {id(C::V), id(C::VII), id(C::IX), id(C::XI), id(C::XII), id(C::XIII)}, 10, 2),
      spec(11, {id(C::V), id(C::VII), id(C::IX), id(C::XI), id(C::XII), id(C::XIII), id(C::VI), id(C::VIII)}, 10, 2),
  };
  return reg;
}

ClassifierSpec lookup_classifier(std::vector<int> classes) {
  sort_unique(classes);
  if (classes.empty()) return {};
  const ClassifierSpec* best = nullptr;
  for (const auto& s : classifier_registry()) {
    if (s.classes == classes) return s;
    if (std::includes(s.classes.begin(), s.classes.end(), classes.begin(), classes.end()) &&
        (best == nullptr || s.classes.size() < best->classes.size()))
      best = &s;
  }
  ClassifierSpec out;
  if (best != nullptr) {
    out = *best;
  }
  out.classes = std::move(classes);
  return out;
}

ClassQuery class_set(const StateDiagram& g, std::span<const State> plausible, TimeDirection dir,
                     std::optional<EdgeContext> ctx) {
  std::vector<int> cls;
  for (State s : plausible) {
    const auto edges = dir == TimeDirection::Forward ? g.outgoing(s, ctx) : g.incoming(s, ctx);
    for (const auto& e : edges)
      if (e.cls != 0) cls.push_back(e.cls);
  }
  sort_unique(cls);
  ClassQuery q;
  q.classifier = lookup_classifier(cls);
  q.classes = std::move(cls);
  return q;
}

ClassQuery class_set(const StateDiagram& g, State s, TimeDirection dir, std::optional<EdgeContext> ctx) {
  const std::array<State, 1> one{s};
  return class_set(g, one, dir, ctx);
}

SegmentClassifier make_nn_classifier(const FeatureModel& model, std::vector<Eigen::VectorXd> features, std::size_t k) {
  return [&model, feats = std::move(features), k](std::size_t index, std::span<const int> classes, FeatureDims dims) {
    if (index >= feats.size() || feats[index].size() == 0)
      throw ProcessingError("no features for segment " + std::to_string(index));
    FeatureDims use{std::min(dims.d_md, model.dims.d_md), std::min(dims.d_rm, model.dims.d_rm)};
    return nn_classify(feats[index], model, classes, use, k);
  };
}

namespace {

StateSet with_turns(StateSet p) {
  if (contains(p, State::StS_T) || contains(p, State::StS_A)) {
    p.push_back(State::StS_T);
    p.push_back(State::StS_A);
  }
  sort_unique(p);
  return p;
}

// A walk that follows without a detected start was entered by an
// unclassified walk-off; walking states map to where such a walk-off leaves.
StateSet before_walk_off(const StateDiagram& g, const StateSet& p) {
  StateSet out;
  for (State s : p) {
    if (!is_walking(s)) out.push_back(s);
    else
      for (const auto& e : g.incoming(s, EdgeContext::Unclassified)) out.push_back(e.from);
  }
  sort_unique(out);
  return out;
}

// Runs the classifier; a singleton set needs no features.
Classification run_classifier(const SegmentClassifier& classify, std::size_t index, const ClassQuery& q,
                              const DecodeOptions& opts) {
  if (q.classes.size() == 1) return {q.classes.front(), 1.0, 0.0, 0.0};
  FeatureDims dims = q.classifier.dims;
  if (auto it = opts.dims_override.find(q.classifier.id); it != opts.dims_override.end()) dims = it->second;
  Classification c = classify(index, q.classes, dims);
  if (std::find(q.classes.begin(), q.classes.end(), c.label) == q.classes.end())
    throw DecodeInconsistency(index, "classifier returned class " + std::string(roman(c.label)) + " outside its set");
  return c;
}

// Picks the first edge of class `cls` whose source (forward) or target
// (backward) lies in `p`.
Edge pick_edge(const StateDiagram& g, int cls, const StateSet& p, TimeDirection dir, std::size_t index) {
  for (const auto& e : g.edges_of_class(cls))
    if (contains(p, dir == TimeDirection::Forward ? e.from : e.to)) return e;
  throw DecodeInconsistency(index, "class " + std::string(roman(cls)) + " has no edge from the current state");
}

int last_label(const std::vector<DecodedEvent>& ev) {
  for (auto it = ev.rbegin(); it != ev.rend(); ++it)
    if (it->label != 0) return it->label;
  return 0;
}

void drop_class(ClassQuery& q, int cls) {
  if (cls == 0) return;
  std::erase(q.classes, cls);
  q.classifier = lookup_classifier(q.classes);
}

}  // namespace

DecodedTimeline decode_forward(const StateDiagram& g, std::span<const MotionSegment> segments,
                               const SegmentClassifier& classify, const DecodeOptions& opts) {
  DecodedTimeline tl;
  tl.direction = TimeDirection::Forward;
  if (segments.empty()) return tl;
  StateSet p;
  State cur;
  if (segments.front().kind == SegmentKind::Translation) {
    cur = walking_state(segments.front().direction);
    p = {cur};
  } else {
    p = opts.initial_states;
    sort_unique(p);
    if (p.empty()) throw InvalidArgument("decode: empty initial state set");
    cur = p.front();
  }

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const MotionSegment& seg = segments[i];
    DecodedEvent ev;
    ev.segment = i;
    ev.kind = seg.kind;
    ev.state_before = cur;
    switch (seg.kind) {
      case SegmentKind::Translation: {
        cur = walking_state(seg.direction);
        p = {cur};
        break;
      }
      case SegmentKind::WalkStop: {
        const State ws = walking_state(seg.direction);
        ev.state_before = ws;
        const StateSet from{ws};
        const ClassQuery q = class_set(g, from, TimeDirection::Forward, EdgeContext::WalkStop);
        if (q.classes.empty()) throw DecodeInconsistency(i, "no stop class out of " + std::string(to_string(ws)));
        const Classification c = run_classifier(classify, i, q, opts);
        const Edge e = pick_edge(g, c.label, from, TimeDirection::Forward, i);
        ev.label = c.label;
        ev.margin = c.margin;
        ev.classifier_id = q.classifier.id;
        ev.class_set = q.classes;
        cur = e.to;
        p = {cur};
        if (c.margin < opts.margin_tau)
          for (int k : q.classes) p.push_back(pick_edge(g, k, from, TimeDirection::Forward, i).to);
        sort_unique(p);
        break;
      }
      case SegmentKind::InPlace: {
        ClassQuery q = class_set(g, p, TimeDirection::Forward, EdgeContext::InPlace);
        drop_class(q, last_label(tl.events));
        if (q.classes.empty()) throw DecodeInconsistency(i, "no in-place class out of the current state");
        const Classification c = run_classifier(classify, i, q, opts);
        // Prefer the decoded state when the class leaves it.
        const Edge e = contains(p, cur) &&
                               std::ranges::any_of(g.edges_of_class(c.label), [&](const Edge& x) { return x.from == cur; })
                           ? pick_edge(g, c.label, StateSet{cur}, TimeDirection::Forward, i)
                           : pick_edge(g, c.label, p, TimeDirection::Forward, i);
        ev.state_before = e.from;
        ev.label = c.label;
        ev.margin = c.margin;
        ev.classifier_id = q.classifier.id;
        ev.class_set = q.classes;
        cur = e.to;
        StateSet next{cur};
        if (c.margin < opts.margin_tau)
          for (int k : q.classes)
            for (const auto& ek : g.edges_of_class(k))
              if (contains(p, ek.from)) next.push_back(ek.to);
        sort_unique(next);
        p = std::move(next);
        break;
      }
      case SegmentKind::WalkStart: {
        const State ws = walking_state(seg.direction);
        const StateSet allowed = with_turns(p);
        ClassQuery q;
        for (const auto& e : g.incoming(ws, EdgeContext::WalkStart))
          if (contains(allowed, e.from)) q.classes.push_back(e.cls);
        sort_unique(q.classes);
        q.classifier = lookup_classifier(q.classes);
        if (q.classes.empty()) {
          const bool standing = std::any_of(allowed.begin(), allowed.end(), is_standing);
          if (!standing)
            throw DecodeInconsistency(i, "cannot start walking " + std::string(to_string(seg.direction)) +
                                             " from the current state");
          ev.state_before = is_standing(cur) ? cur : State::StS_T;
        } else {
          const Classification c = run_classifier(classify, i, q, opts);
          const Edge e = pick_edge(g, c.label, allowed, TimeDirection::Forward, i);
          ev.state_before = e.from;
          ev.label = c.label;
          ev.margin = c.margin;
          ev.classifier_id = q.classifier.id;
          ev.class_set = q.classes;
        }
        cur = ws;
        p = {cur};
        break;
      }
    }
    ev.state_after = cur;
    tl.events.push_back(std::move(ev));
  }
  return tl;
}

DecodedTimeline decode_backward(const StateDiagram& g, std::span<const MotionSegment> segments,
                                const SegmentClassifier& classify, const DecodeOptions& opts) {
  DecodedTimeline tl;
  tl.direction = TimeDirection::Backward;
  if (segments.empty()) return tl;
  StateSet p;
  State cur;  // state after the segment being decoded, chronologically
  if (segments.back().kind == SegmentKind::Translation) {
    cur = walking_state(segments.back().direction);
    p = {cur};
  } else {
    p = {State::StS_T, State::StS_A, State::SiS, State::LS_T, State::LS_A};
    cur = State::StS_T;
  }
  std::vector<DecodedEvent> rev;
  for (std::size_t i = segments.size(); i-- > 0;) {
    const MotionSegment& seg = segments[i];
    DecodedEvent ev;
    ev.segment = i;
    ev.kind = seg.kind;
    switch (seg.kind) {
      case SegmentKind::Translation: {
        cur = walking_state(seg.direction);
        ev.state_before = cur;
        ev.state_after = cur;
        p = {cur};
        break;
      }
      case SegmentKind::WalkStart: {
        const State ws = walking_state(seg.direction);
        ev.state_after = ws;
        const StateSet to{ws};
        const ClassQuery q = class_set(g, to, TimeDirection::Backward, EdgeContext::WalkStart);
        if (q.classes.empty()) {
          ev.state_before = State::StS_T;
          p = {State::StS_T, State::StS_A};
        } else {
          const Classification c = run_classifier(classify, i, q, opts);
          const Edge e = pick_edge(g, c.label, to, TimeDirection::Backward, i);
          ev.label = c.label;
          ev.margin = c.margin;
          ev.classifier_id = q.classifier.id;
          ev.class_set = q.classes;
          ev.state_before = e.from;
          p = {e.from};
          if (c.margin < opts.margin_tau)
            for (int k : q.classes) p.push_back(pick_edge(g, k, to, TimeDirection::Backward, i).from);
          p = with_turns(p);
        }
        cur = ev.state_before;
        break;
      }
      case SegmentKind::InPlace: {
        const StateSet into = with_turns(before_walk_off(g, p));
        ClassQuery q = class_set(g, into, TimeDirection::Backward, EdgeContext::InPlace);
        drop_class(q, last_label(rev));
        if (q.classes.empty()) throw DecodeInconsistency(i, "no in-place class into the current state");
        const Classification c = run_classifier(classify, i, q, opts);
        const Edge chosen =
            contains(into, cur) && std::ranges::any_of(g.edges_of_class(c.label), [&](const Edge& x) { return x.to == cur; })
                ? pick_edge(g, c.label, StateSet{cur}, TimeDirection::Backward, i)
                : pick_edge(g, c.label, into, TimeDirection::Backward, i);
        ev.label = c.label;
        ev.margin = c.margin;
        ev.classifier_id = q.classifier.id;
        ev.class_set = q.classes;
        ev.state_after = chosen.to;
        ev.state_before = chosen.from;
        StateSet prev{chosen.from};
        if (c.margin < opts.margin_tau)
          for (int k : q.classes)
            for (const auto& ek : g.edges_of_class(k))
              if (contains(into, ek.to)) prev.push_back(ek.from);
        p = with_turns(prev);
        cur = chosen.from;
        break;
      }
      case SegmentKind::WalkStop: {
        const State ws = walking_state(seg.direction);
        ClassQuery q;
        const StateSet into = with_turns(before_walk_off(g, p));
        for (const auto& e : g.outgoing(ws, EdgeContext::WalkStop))
          if (contains(into, e.to)) q.classes.push_back(e.cls);
        sort_unique(q.classes);
        q.classifier = lookup_classifier(q.classes);
        if (q.classes.empty())
          throw DecodeInconsistency(i, "no stop class from " + std::string(to_string(ws)) + " into the current state");
        const Classification c = run_classifier(classify, i, q, opts);
        const Edge e = pick_edge(g, c.label, StateSet{ws}, TimeDirection::Forward, i);
        ev.label = c.label;
        ev.margin = c.margin;
        ev.classifier_id = q.classifier.id;
        ev.class_set = q.classes;
        ev.state_before = ws;
        ev.state_after = e.to;
        cur = ws;
        p = {ws};
        break;
      }
    }
    rev.push_back(std::move(ev));
  }
  tl.events.assign(rev.rbegin(), rev.rend());
  return tl;
}

std::vector<State> DecodedTimeline::state_trace() const {
  std::vector<State> out;
  if (events.empty()) return out;
  out.push_back(events.front().state_before);
  for (const auto& e : events) {
    const bool transition = e.label != 0 || e.kind == SegmentKind::WalkStart || e.kind == SegmentKind::WalkStop;
    if (transition || e.state_after != out.back()) out.push_back(e.state_after);
  }
  return out;
}

std::vector<int> DecodedTimeline::labels() const {
  std::vector<int> out;
  for (const auto& e : events)
    if (e.label != 0) out.push_back(e.label);
  return out;
}

double ReconcileReport::agreement_rate() const {
  if (rows.empty()) return 1.0;
  const auto n = std::count_if(rows.begin(), rows.end(), [](const ReconcileRow& r) { return r.agree; });
  return static_cast<double>(n) / static_cast<double>(rows.size());
}

ReconcileReport reconcile(const DecodedTimeline& fwd, const DecodedTimeline& bwd) {
  ReconcileReport rep;
  auto find = [](const DecodedTimeline& tl, std::size_t seg) -> const DecodedEvent* {
    for (const auto& e : tl.events)
      if (e.segment == seg) return &e;
    return nullptr;
  };
  std::set<std::size_t> segs;
  for (const auto& e : fwd.events)
    if (e.kind != SegmentKind::Translation) segs.insert(e.segment);
  for (const auto& e : bwd.events)
    if (e.kind != SegmentKind::Translation) segs.insert(e.segment);
  for (std::size_t s : segs) {
    ReconcileRow row;
    row.segment = s;
    if (const auto* f = find(fwd, s)) {
      row.fwd_label = f->label;
      row.fwd_margin = f->margin;
    }
    if (const auto* b = find(bwd, s)) {
      row.bwd_label = b->label;
      row.bwd_margin = b->margin;
    }
    row.agree = row.fwd_label == row.bwd_label;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_decoded_csv(const std::filesystem::path& path, std::span<const MotionSegment> segments,
                       const DecodedTimeline* fwd, const DecodedTimeline* bwd) {
  auto find = [](const DecodedTimeline* tl, std::size_t seg) -> const DecodedEvent* {
    if (tl == nullptr) return nullptr;
    for (const auto& e : tl->events)
      if (e.segment == seg) return &e;
    return nullptr;
  };
  std::ostringstream os;
  os << "onset_s,offset_s,fwd_label,bwd_label,state_after,margin\n";
  char buf[64];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const DecodedEvent* f = find(fwd, i);
    const DecodedEvent* b = find(bwd, i);
    const DecodedEvent* main = f != nullptr ? f : b;
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,", segments[i].onset, segments[i].offset);
    os << buf << (f != nullptr ? roman(f->label) : "-") << ',' << (b != nullptr ? roman(b->label) : "-") << ','
       << (main != nullptr ? to_string(main->state_after) : "-");
    std::snprintf(buf, sizeof buf, ",%.6f\n", main != nullptr ? main->margin : 0.0);
    os << buf;
  }
  detail::write_text(path, os.str());
}

void write_reconcile_csv(const std::filesystem::path& path, const ReconcileReport& report) {
  std::ostringstream os;
  os << "segment,fwd_label,bwd_label,agree,fwd_margin,bwd_margin\n";
  char buf[64];
  for (const auto& r : report.rows) {
    os << r.segment << ',' << roman(r.fwd_label) << ',' << roman(r.bwd_label) << ',' << (r.agree ? 1 : 0);
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", r.fwd_margin, r.bwd_margin);
    os << buf;
  }
  detail::write_text(path, os.str());
}

}  // namespace adlradar
