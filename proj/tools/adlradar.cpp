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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adlradar/corpus.hpp"
#include "adlradar/ethogram.hpp"
#include "adlradar/features.hpp"
#include "adlradar/pipeline.hpp"
#include "adlradar/sim.hpp"

namespace fs = std::filesystem;
using namespace adlradar;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kProcessing = 3 };

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

PipelineConfig load_config(const Globals& g) {
  return g.config.empty() ? PipelineConfig{} : load_pipeline_config(g.config);
}

FeatureDims parse_dims(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("dims must be d_md,d_rm, got '" + text + "'");
  try {
    std::size_t p1 = 0, p2 = 0;
    const unsigned long md = std::stoul(text.substr(0, comma), &p1);
    const std::string rest = text.substr(comma + 1);
    const unsigned long rm = std::stoul(rest, &p2);
    if (p1 != comma || p2 != rest.size()) throw std::invalid_argument("trailing characters");
    return {md, rm};
  } catch (const std::logic_error&) {
    throw InvalidArgument("dims must be d_md,d_rm, got '" + text + "'");
  }
}

int cmd_simulate(const Globals& g, const std::string& scenario_path, const std::string& out_path) {
  const Scenario sc = load_scenario(scenario_path);
  const BasebandMatrix bb = synthesize_baseband(sc, g.seed);
  write_iqf(out_path, bb);
  std::printf("%-12s %9s %9s\n", "label", "onset_s", "offset_s");
  for (const auto& t : sc.truth) std::printf("%-12s %9.3f %9.3f\n", t.label.c_str(), t.onset, t.offset);
  return kOk;
}

int cmd_pipeline(const Globals& g, const std::string& in_path) {
  const PipelineConfig cfg = load_config(g);
  const BasebandMatrix bb = read_iqf(in_path);
  const PipelineResult res = run_pipeline(bb, cfg);
  write_pipeline_outputs(res, cfg, g.out_dir);
  std::printf("%zu segments, %zu breakpoints\n", res.segments.size(), res.timeline.breakpoints.size());
  for (std::size_t i = 0; i < res.segments.size(); ++i) {
    const auto& s = res.segments[i];
    std::printf("%3zu %-11s %-7s %8.3f %8.3f\n", i, std::string(to_string(s.kind)).c_str(),
                std::string(to_string(s.direction)).c_str(), s.onset, s.offset);
  }
  return kOk;
}

int cmd_dataset(const Globals& g, std::size_t per_class) {
  const PipelineConfig cfg = load_config(g);
  CorpusOptions opt;
  opt.per_class = per_class;
  opt.seed = g.seed;
  CorpusStats stats;
  const std::vector<Snippet> snippets = synth_corpus(cfg, opt, &stats);
  write_dataset(g.out_dir, snippets);
  std::printf("%zu snippets (%zu from detected segments, %zu from nominal windows)\n", snippets.size(),
              stats.detected, stats.fallback);
  return kOk;
}

int cmd_train(const std::string& dataset_dir, const std::string& dims_text, const std::string& out_path) {
  const FeatureDims dims = parse_dims(dims_text);
  std::map<int, std::size_t> counts;
  for (const auto& e : fs::directory_iterator(dataset_dir))
    if (e.is_directory()) counts[class_from_roman(e.path().filename().string())] = 0;
  const std::vector<Snippet> snippets = read_dataset(dataset_dir);
  for (const auto& s : snippets) ++counts[s.label];
  if (counts.empty()) throw ProcessingError("dataset has no classes");
  for (const auto& [cls, n] : counts) {
    std::printf("%-5s %zu\n", std::string(roman(cls)).c_str(), n);
    if (n == 0) throw ProcessingError("class " + std::string(roman(cls)) + " has no samples");
  }
  const std::size_t eta = snippets.front().md.rows();
  if (dims.d_md == 0 || dims.d_rm == 0 || dims.d_md > eta || dims.d_rm > eta)
    throw InvalidArgument("dims must lie in 1.." + std::to_string(eta));
  write_model(out_path, train_model(snippets, dims));
  return kOk;
}

int cmd_decode(const Globals& g, const std::string& segments_path, const std::string& snippet_dir,
               const std::string& model_path, const std::string& direction) {
  const PipelineConfig cfg = load_config(g);
  const std::vector<MotionSegment> segs = read_segments_csv(segments_path);
  const FeatureModel model = read_model(model_path);
  const std::vector<Snippet> snippets = read_segment_snippets(snippet_dir, segs.size());
  const SegmentClassifier clf = snippet_classifier(model, snippets, cfg.knn_k);
  const StateDiagram& diagram = StateDiagram::standard();

  std::optional<DecodedTimeline> fwd, bwd;
  if (direction != "backward") fwd = decode_forward(diagram, segs, clf, cfg.decode);
  if (direction != "forward") bwd = decode_backward(diagram, segs, clf, cfg.decode);

  fs::create_directories(g.out_dir);
  write_decoded_csv(fs::path(g.out_dir) / "decoded.csv", segs, fwd ? &*fwd : nullptr, bwd ? &*bwd : nullptr);
  const auto& shown = fwd ? *fwd : *bwd;
  std::printf("states:");
  for (State s : shown.state_trace()) std::printf(" %s", std::string(to_string(s)).c_str());
  std::printf("\nlabels:");
  for (int l : shown.labels()) std::printf(" %s", std::string(roman(l)).c_str());
  std::printf("\n");
  if (fwd && bwd) {
    const ReconcileReport rep = reconcile(*fwd, *bwd);
    write_reconcile_csv(fs::path(g.out_dir) / "reconcile.csv", rep);
    std::printf("forward/backward agreement: %.3f\n", rep.agreement_rate());
  }
  return kOk;
}

int cmd_evaluate(const Globals& g, const std::string& model_path, const std::string& dataset_dir) {
  const PipelineConfig cfg = load_config(g);
  const FeatureModel model = read_model(model_path);
  const std::vector<Snippet> all = read_dataset(dataset_dir);
  fs::create_directories(g.out_dir);

  auto run = [&](const std::string& name, const std::vector<int>& classes, FeatureDims dims) {
    std::vector<Snippet> test;
    for (const auto& s : all)
      if (std::ranges::find(classes, s.label) != classes.end()) test.push_back(s);
    const ConfusionMatrix cm = evaluate(model, test, classes, dims, cfg.knn_k);
    std::vector<std::string> names;
    for (int c : classes) names.emplace_back(roman(c));
    write_confusion_csv(fs::path(g.out_dir) / ("confusion_" + name + ".csv"), cm, names);
    std::printf("%-4s %3zu classes %5zu samples accuracy %.3f\n", name.c_str(), classes.size(), test.size(),
                cm.accuracy());
  };
  for (const auto& spec : classifier_registry()) {
    const ClassifierSpec s = resolve_classifier(cfg, spec);
    run(std::to_string(s.id), s.classes, s.dims);
  }
  std::vector<int> every(kNumClasses);
  for (int c = 1; c <= kNumClasses; ++c) every[static_cast<std::size_t>(c - 1)] = c;
  run("all", every, model.dims);
  return kOk;
}

int cmd_plot(const Globals& g, const std::string& in_path) {
  const fs::path in(in_path);
  const fs::path out(g.out_dir);
  fs::create_directories(out);
  if (in.extension() == ".iqf") {
    const PipelineImages img = compute_images(read_iqf(in), load_config(g));
    write_pgm(out / "rangemap.pgm", img.rangemap_db.pixels);
    write_pgm(out / "spectrogram.pgm", img.md_db.pixels);
    write_pgm(out / "spectrogram_clean.pgm", img.md_clean);
  } else if (in.extension() == ".rdm") {
    write_pgm(out / (in.stem().string() + ".pgm"), read_rdm(in).pixels);
  } else {
    throw InvalidArgument("plot expects an .iqf or .rdm file");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar activity recognition: simulation, segmentation, features and decoding"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");

  std::string a, b, c, direction;
  std::string dims = "14,4";
  std::size_t per_class = 30;

  auto* sim = app.add_subcommand("simulate", "Synthesize an IQF recording from a scenario JSON");
  sim->add_option("scenario", a, "Scenario JSON")->required();
  sim->add_option("output", b, "Output .iqf")->required();

  auto* pipe = app.add_subcommand("pipeline", "Process a recording into images, bursts and segments");
  pipe->add_option("input", a, "Input .iqf")->required();

  auto* data = app.add_subcommand("dataset", "Synthesize a labelled snippet dataset into --out-dir");
  data->add_option("--per-class", per_class, "Snippets per class")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Train the feature model on a dataset directory");
  train->add_option("dataset", a, "Dataset directory")->required();
  train->add_option("output", b, "Output model file")->required();
  train->add_option("--dims", dims, "d_md,d_rm");

  auto* dec = app.add_subcommand("decode", "Decode segments into a state timeline");
  dec->add_option("segments", a, "segments.csv")->required();
  dec->add_option("snippets", b, "Snippet directory")->required();
  dec->add_option("model", c, "Model file")->required();
  dec->add_option("direction", direction, "forward, backward or both")
      ->required()
      ->check(CLI::IsMember({"forward", "backward", "both"}));

  auto* eval = app.add_subcommand("evaluate", "Confusion matrices for every classifier");
  eval->add_option("model", a, "Model file")->required();
  eval->add_option("dataset", b, "Dataset directory")->required();

  auto* plot = app.add_subcommand("plot", "Write PGM images of an .iqf recording or an .rdm image");
  plot->add_option("input", a, "Input file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(g, a, b);
    if (*pipe) return cmd_pipeline(g, a);
    if (*data) return cmd_dataset(g, per_class);
    if (*train) return cmd_train(a, dims, b);
    if (*dec) return cmd_decode(g, a, b, c, direction);
    if (*eval) return cmd_evaluate(g, a, b);
    if (*plot) return cmd_plot(g, a);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kProcessing;
  }
  return kUsage;
}
