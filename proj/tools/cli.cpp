/*
 * Copyright 2026 The signpose Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "signpose/distance.hpp"
#include "signpose/error.hpp"
#include "signpose/eval.hpp"
#include "signpose/generation.hpp"
#include "signpose/io.hpp"
#include "signpose/preprocess.hpp"
#include "signpose/vocabulary.hpp"

namespace signpose::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  return out;
}

HamTokenSequence read_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  HamTokenSequence tokens;
  std::string word;
  while (in >> word) {
    try {
      std::size_t used = 0;
      const long v = std::stol(word, &used);
      if (used != word.size()) throw std::invalid_argument(word);
      tokens.token_ids.push_back(static_cast<std::int32_t>(v));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, "token file holds a non-integer: " + word);
    }
  }
  return tokens;
}

struct PreprocessArgs {
  std::string manifest;
  std::string out_dir;
  double c_min = kDefaultMinConfidence;
  bool no_flip = false;
};

void run_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const DatasetManifest manifest = DatasetManifest::load(a.manifest);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  PreprocessConfig config;
  config.c_min = a.c_min;
  config.flip_left_handed = !a.no_flip;

  DatasetManifest processed;
  auto log = open_out(dir / "preprocess_log.csv");
  log << "id,frames_in,frames_out,trimmed_leading,trimmed_trailing,flipped,scale\n";
  for (const ManifestRecord& rec : manifest.records) {
    PreprocessLog entry;
    const PoseSequenced seq = preprocess(load_pose(rec.pose_path), config, &entry);
    const fs::path file = rec.id + ".pose";
    save_pose(dir / file, seq);
    char scale[32];
    std::snprintf(scale, sizeof(scale), "%.9g", entry.scale);
    log << csv_escape(rec.id) << ',' << entry.frames_in << ',' << entry.frames_out << ','
        << entry.trimmed_leading << ',' << entry.trimmed_trailing << ','
        << (entry.flipped ? "true" : "false") << ',' << scale << '\n';
    ManifestRecord copy = rec;
    copy.pose_path = file;
    if (rec.prediction_path) copy.prediction_path = fs::absolute(*rec.prediction_path);
    processed.records.push_back(std::move(copy));
  }
  auto m = open_out(dir / "manifest.csv");
  processed.write(m);
  out << "preprocessed " << manifest.records.size() << " records into " << dir.string() << '\n';
}

struct DistanceArgs {
  std::string ref;
  std::string other;
  std::string metric = "ndtw";
  long radius = 1;
  bool exact = false;
};

DtwOptions dtw_options(long radius, bool exact) {
  DtwOptions o;
  o.radius = radius;
  o.method = exact ? DtwMethod::kExact : DtwMethod::kFast;
  return o;
}

void run_distance(const DistanceArgs& a, std::ostream& out) {
  const Metric metric = make_metric(parse_metric_kind(a.metric), dtw_options(a.radius, a.exact));
  const double d = metric(load_pose(a.ref), load_pose(a.other));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", d);
  out << buf << '\n';
}

struct MatrixArgs {
  std::string manifest;
  std::string out;
  std::string metric = "ndtw";
  long radius = 1;
  bool exact = false;
  unsigned threads = 1;
};

void run_matrix(const MatrixArgs& a, std::ostream& out) {
  const auto dataset = load_dataset(DatasetManifest::load(a.manifest), a.threads);
  std::vector<std::string> ids;
  std::vector<PoseSequenced> poses;
  for (const auto& s : dataset) {
    ids.push_back(s.id);
    poses.push_back(s.pose);
  }
  const Metric metric = make_metric(parse_metric_kind(a.metric), dtw_options(a.radius, a.exact));
  const DistanceMatrix matrix = distance_matrix(ids, poses, metric);
  auto file = open_out(a.out);
  write_csv(file, matrix);
  out << "wrote " << ids.size() << "x" << ids.size() << " matrix to " << a.out << '\n';
}

struct EvaluateArgs {
  std::string manifest;
  std::string protocol;
  std::uint64_t seed = 0;
  std::string json_out;
  std::string metric = "ndtw";
  long radius = 1;
  bool exact = false;
  std::vector<std::string> holdout;
  int negative_ratio = 4;
  std::size_t gallery = 20;
  unsigned threads = 1;
};

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto dataset = load_dataset(DatasetManifest::load(a.manifest), a.threads);
  const DtwOptions dtw = dtw_options(a.radius, a.exact);
  EvalReport report;
  if (a.protocol == "retrieval") {
    RetrievalOptions o;
    o.seed = a.seed;
    o.negative_ratio = a.negative_ratio;
    o.threads = a.threads;
    report = retrieval_validation(dataset, make_metric(parse_metric_kind(a.metric), dtw), o);
  } else {
    RankOptions o;
    o.seed = a.seed;
    o.threads = a.threads;
    o.gt_gallery = a.gallery;
    o.prediction_gallery = a.gallery;
    std::vector<LabeledSample> pairs;
    for (const auto& s : dataset) {
      if (s.prediction) pairs.push_back(s);
    }
    const Metric metric = make_metric(parse_metric_kind(a.metric), dtw);
    report = a.protocol == "ranks" ? distance_ranks(pairs, dataset, metric, o)
                                   : leave_one_out_ranks(dataset, metric, o, a.holdout);
  }

  std::vector<LengthPair> lengths;
  for (const auto& s : dataset) {
    if (s.prediction) {
      lengths.push_back({static_cast<double>(s.prediction->frames()),
                         static_cast<double>(s.pose.frames())});
    }
  }
  if (!lengths.empty()) report.seq_len = seq_len_error_stats(lengths);

  auto file = open_out(a.json_out);
  file << to_json(report).dump(2) << '\n';
  print_report(out, report);
}

struct GenerateArgs {
  std::string tokens;
  std::string ref_frame;
  long length = 0;
  int steps = 10;
  std::string refiner = "identity";
  std::string target;
  double rate = 0.5;
  bool noise = false;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void run_generate(const GenerateArgs& a, std::ostream& out) {
  const HamTokenSequence tokens = read_tokens(a.tokens);
  const PoseSequenced reference = load_pose(a.ref_frame);
  std::optional<PoseSequenced> target;
  if (!a.target.empty()) target = load_pose(a.target);
  if ((a.refiner == "oracle" || a.refiner == "nudge") && !target) {
    throw CLI::ValidationError("--target", "refiner '" + a.refiner + "' needs a target");
  }
  Index length = a.length;
  if (length == 0 && target) length = target->frames();
  if (length < 1) throw Error(ErrorCode::kInvalidLength, "--len must be >= 1");
  if (target && target->frames() != length) {
    throw Error(ErrorCode::kShapeMismatch, "target has " + std::to_string(target->frames()) +
                                               " frames, --len is " + std::to_string(length));
  }

  Refiner<double> refiner;
  if (a.refiner == "identity") {
    refiner = refiners::identity<double>();
  } else if (a.refiner == "oracle") {
    refiner = refiners::oracle(*target);
  } else {
    refiner = refiners::linear_nudge(*target, a.rate);
  }

  GenerationConfig config;
  config.steps = a.steps;
  config.seed = a.seed;
  config.inference_noise = a.noise;

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const int width = static_cast<int>(std::to_string(a.steps).size());
  text2pose<double>(tokens, reference, length, refiner, config,
                    [&](int step, const PoseSequenced& seq) {
                      std::string name = std::to_string(step);
                      name.insert(0, static_cast<std::size_t>(width) - name.size(), '0');
                      const fs::path file = dir / ("step_" + name + ".pose");
                      save_pose(file, seq);
                      out << file.string() << '\n';
                    });
}

struct VocabArgs {
  std::string corpus;
  std::string vocab;
  std::string input;
  std::string out;
  bool detokenize = false;
};

void run_vocab_build(const VocabArgs& a, std::ostream& out) {
  const Vocabulary v = Vocabulary::build(read_lines(a.corpus));
  auto file = open_out(a.out);
  v.write(file);
  out << "vocabulary of " << v.size() << " ids (" << Vocabulary::kReservedCount
      << " reserved) written to " << a.out << '\n';
}

void run_vocab_apply(const VocabArgs& a, std::ostream& out) {
  std::ifstream vin(a.vocab, std::ios::binary);
  if (!vin) throw Error(ErrorCode::kIoError, "cannot open " + a.vocab);
  const Vocabulary v = Vocabulary::read(vin);
  std::ostringstream result;
  for (const std::string& line : read_lines(a.input)) {
    if (a.detokenize) {
      HamTokenSequence t;
      std::istringstream words(line);
      long id;
      while (words >> id) t.token_ids.push_back(static_cast<std::int32_t>(id));
      result << v.detokenize(t) << '\n';
    } else {
      const HamTokenSequence t = v.tokenize(line);
      for (std::size_t i = 0; i < t.size(); ++i) result << (i ? " " : "") << t.token_ids[i];
      result << '\n';
    }
  }
  if (a.out.empty()) {
    out << result.str();
  } else {
    auto file = open_out(a.out);
    file << result.str();
  }
}

struct ConvertArgs {
  std::string input;
  std::string out;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"signpose: pose-sequence preprocessing, distances and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "preprocess every pose in a manifest");
  pre_cmd->add_option("--manifest", pre.manifest, "dataset manifest CSV")->required();
  pre_cmd->add_option("--out", pre.out_dir, "output directory")->required();
  pre_cmd->add_option("--cmin", pre.c_min, "minimum keypoint confidence")->check(CLI::Range(0.0, 1.0));
  pre_cmd->add_flag("--no-flip", pre.no_flip, "never mirror left-handed signers");

  DistanceArgs dist;
  auto* dist_cmd = app.add_subcommand("distance", "distance between two pose files");
  dist_cmd->add_option("--ref", dist.ref, "reference pose")->required();
  dist_cmd->add_option("--other", dist.other, "other pose")->required();
  dist_cmd->add_option("--metric", dist.metric)
      ->check(CLI::IsMember({"ndtw", "dtw", "ape", "nape", "mse", "nmse"}));
  dist_cmd->add_option("--radius", dist.radius, "fast DTW radius")->check(CLI::PositiveNumber);
  dist_cmd->add_flag("--exact", dist.exact, "use the exact DTW instead of the fast one");

  MatrixArgs mat;
  auto* mat_cmd = app.add_subcommand("matrix", "all-pairs distance matrix as CSV");
  mat_cmd->add_option("--manifest", mat.manifest)->required();
  mat_cmd->add_option("--out", mat.out)->required();
  mat_cmd->add_option("--metric", mat.metric)
      ->check(CLI::IsMember({"ndtw", "dtw", "ape", "nape", "mse", "nmse"}));
  mat_cmd->add_option("--radius", mat.radius)->check(CLI::PositiveNumber);
  mat_cmd->add_flag("--exact", mat.exact);
  mat_cmd->add_option("--threads", mat.threads);

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "run an evaluation protocol");
  ev_cmd->add_option("--manifest", ev.manifest)->required();
  ev_cmd->add_option("--protocol", ev.protocol)
      ->required()
      ->check(CLI::IsMember({"retrieval", "ranks", "loo"}));
  ev_cmd->add_option("--seed", ev.seed);
  ev_cmd->add_option("--json", ev.json_out, "report output path")->required();
  ev_cmd->add_option("--metric", ev.metric)
      ->check(CLI::IsMember({"ndtw", "dtw", "ape", "nape", "mse", "nmse"}));
  ev_cmd->add_option("--radius", ev.radius)->check(CLI::PositiveNumber);
  ev_cmd->add_flag("--exact", ev.exact);
  ev_cmd->add_option("--holdout", ev.holdout, "languages to hold out (loo)");
  ev_cmd->add_option("--negative-ratio", ev.negative_ratio)->check(CLI::NonNegativeNumber);
  ev_cmd->add_option("--gallery", ev.gallery, "distractors of each kind (ranks, loo)");
  ev_cmd->add_option("--threads", ev.threads);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate-demo", "run the generation loop with a test refiner");
  gen_cmd->add_option("--tokens", gen.tokens, "whitespace-separated token ids")->required();
  gen_cmd->add_option("--ref-frame", gen.ref_frame, "pose file; its first frame is used")->required();
  gen_cmd->add_option("--len", gen.length, "output frame count (default: target length)");
  gen_cmd->add_option("--steps", gen.steps)->check(CLI::Range(2, 100000));
  gen_cmd->add_option("--refiner", gen.refiner)
      ->check(CLI::IsMember({"oracle", "identity", "nudge"}));
  gen_cmd->add_option("--target", gen.target, "target pose for oracle / nudge");
  gen_cmd->add_option("--rate", gen.rate, "nudge rate");
  gen_cmd->add_flag("--noise", gen.noise, "add epsilon noise after every step");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out_dir, "directory for per-step pose files")->required();

  VocabArgs voc;
  auto* voc_cmd = app.add_subcommand("vocab", "HamNoSys vocabulary tools");
  voc_cmd->require_subcommand(1);
  auto* voc_build = voc_cmd->add_subcommand("build", "build a vocabulary from a corpus");
  voc_build->add_option("--corpus", voc.corpus, "one HamNoSys string per line")->required();
  voc_build->add_option("--out", voc.out)->required();
  auto* voc_apply = voc_cmd->add_subcommand("apply", "tokenize (or detokenize) lines of text");
  voc_apply->add_option("--vocab", voc.vocab)->required();
  voc_apply->add_option("--input", voc.input)->required();
  voc_apply->add_option("--out", voc.out);
  voc_apply->add_flag("--detokenize", voc.detokenize);

  ConvertArgs conv;
  auto* conv_cmd = app.add_subcommand("convert", "pose-estimator JSON to pose file");
  conv_cmd->add_option("--input", conv.input)->required();
  conv_cmd->add_option("--out", conv.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre_cmd->parsed()) {
      run_preprocess(pre, out);
    } else if (dist_cmd->parsed()) {
      run_distance(dist, out);
    } else if (mat_cmd->parsed()) {
      run_matrix(mat, out);
    } else if (ev_cmd->parsed()) {
      run_evaluate(ev, out);
    } else if (gen_cmd->parsed()) {
      run_generate(gen, out);
    } else if (voc_build->parsed()) {
      run_vocab_build(voc, out);
    } else if (voc_apply->parsed()) {
      run_vocab_apply(voc, out);
    } else if (conv_cmd->parsed()) {
      save_pose(conv.out, ingest_pose_json(conv.input));
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace signpose::cli
