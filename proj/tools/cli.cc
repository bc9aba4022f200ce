/*
 * Copyright 2026 The ddiadv Authors.
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

#include "cli.h"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ddiadv/advtrain.h"
#include "ddiadv/checkpoint.h"
#include "ddiadv/evalkit.h"
#include "ddiadv/kgstore.h"
#include "ddiadv/run_config.h"

namespace ddiadv {
namespace {

namespace fs = std::filesystem;

std::string Join(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

// Value of `key=` in a checkpoint sidecar, or "" when absent.
std::string SidecarValue(const std::string& checkpoint, const std::string& key) {
  std::error_code ec;
  if (!fs::exists(checkpoint + ".manifest", ec)) return "";
  std::istringstream in(ReadFile(checkpoint + ".manifest"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

std::string IngestReport(const Dataset& ds) {
  std::ostringstream out;
  out << "triplets=" << ds.triplets.size() << "\n"
      << "duplicates=" << ds.duplicates << "\n"
      << "entities=" << ds.vocab.num_entities() << "\n"
      << "relations=" << ds.vocab.num_relations() << "\n";
  return out.str();
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string tsv;
  std::string out_dir;
  bool has_header = false;
};

void CmdIngest(const IngestArgs& a, std::ostream& out) {
  const Dataset ds = LoadTsv(a.tsv, a.has_header);
  EnsureDir(a.out_dir);
  WriteVocab(a.out_dir, ds.vocab);
  SaveTsv(Join(a.out_dir, "triplets.tsv"), ds.vocab, ds.triplets);
  const std::string report = IngestReport(ds);
  WriteFileAtomic(Join(a.out_dir, "ingest_report.txt"), report);
  out << report;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_path;
  SynthParams params;
};

void CmdSynth(const SynthArgs& a, std::ostream& out) {
  const Dataset ds = SynthKg(a.params);
  const fs::path parent = fs::path(a.out_path).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
  WriteFileAtomic(a.out_path, FormatTsv(ds.vocab, ds.triplets));
  out << "triplets=" << ds.triplets.size() << "\n";
}

// ----------------------------------------------------------------- train

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::optional<size_t> workers;
};

KeyValues ParseOverrides(const std::vector<std::string>& sets) {
  KeyValues kv;
  for (const auto& s : sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + s + "'");
    }
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return kv;
}

// A data path is either a TSV file or an ingest directory.
Dataset LoadTrainingData(const RunConfig& cfg) {
  std::error_code ec;
  if (fs::is_directory(cfg.data, ec)) {
    Dataset ds;
    ds.vocab = ReadVocab(cfg.data);
    ds.triplets =
        LoadTsvWithVocab(Join(cfg.data, "triplets.tsv"), ds.vocab, false);
    return ds;
  }
  return LoadTsv(cfg.data, cfg.has_header);
}

void CmdTrain(const TrainArgs& a, std::ostream& out) {
  KeyValues overrides = ParseOverrides(a.sets);
  if (!a.out_dir.empty()) overrides.emplace_back("out_dir", a.out_dir);
  if (a.workers) overrides.emplace_back("workers", std::to_string(*a.workers));
  const RunConfig cfg = LoadRunConfig(a.config_path, overrides);
  if (cfg.data.empty()) throw ConfigError("config key 'data' is required");
  if (cfg.out_dir.empty()) throw ConfigError("config key 'out_dir' is required");

  const Dataset ds = LoadTrainingData(cfg);
  const DatasetSplit split = SplitDataset(ds.triplets, cfg.ratios,
                                          cfg.train.seed, cfg.split_by_pair);

  const fs::path dir(cfg.out_dir);
  EnsureDir(cfg.out_dir);
  WriteFileAtomic(Join(dir, "resolved_config.txt"), cfg.Resolved());
  WriteVocab(cfg.out_dir, ds.vocab);
  SaveTsv(Join(dir, "train.tsv"), ds.vocab, split.train);
  SaveTsv(Join(dir, "valid.tsv"), ds.vocab, split.valid);
  SaveTsv(Join(dir, "test.tsv"), ds.vocab, split.test);
  WriteSplitManifest(Join(dir, "split.manifest"),
                     {"entities.tsv", "relations.tsv", "train.tsv",
                      "valid.tsv", "test.tsv", split.seed});

  const CheckpointMeta meta{cfg.train.seed, cfg.Hash()};
  const std::string checkpoint = Join(dir, "model.ckpt");
  const std::string epochs_csv = Join(dir, "epochs.csv");
  std::string csv = EpochCsvHeader();
  std::optional<EmbeddingModel> last_good;

  auto on_epoch = [&](const EpochReport& report, const EmbeddingModel& model) {
    csv += EpochCsvRow(report);
    WriteFileAtomic(epochs_csv, csv);
    last_good = model;
    if (cfg.checkpoint_every > 0 && report.epoch % cfg.checkpoint_every == 0) {
      WriteCheckpoint(checkpoint, model, meta);
    }
  };

  TrainResult result = [&] {
    try {
      return TrainAny(cfg.train, split, ds.vocab.num_entities(),
                      ds.vocab.num_relations(), on_epoch);
    } catch (const TrainingError&) {
      if (last_good) WriteCheckpoint(checkpoint, *last_good, meta);
      throw;
    }
  }();

  if (result.reports.empty()) WriteFileAtomic(epochs_csv, csv);
  WriteCheckpoint(checkpoint, result.model, meta);
  out << "train=" << split.train.size() << " valid=" << split.valid.size()
      << " test=" << split.test.size() << "\n"
      << "checkpoint=" << checkpoint << "\n"
      << "config_hash=" << meta.config_hash << "\n";
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string task = "lp";
  std::string out_dir;
  bool plot = false;
  size_t workers = 1;
};

struct LoadedSplit {
  Vocab vocab;
  DatasetSplit split;
};

LoadedSplit LoadSplit(const std::string& manifest_path) {
  const SplitManifest m = ReadSplitManifest(manifest_path);
  LoadedSplit s;
  s.vocab = ReadVocabFiles(m.entities, m.relations);
  s.split.train = LoadTsvWithVocab(m.train, s.vocab, false);
  s.split.valid = LoadTsvWithVocab(m.valid, s.vocab, false);
  s.split.test = LoadTsvWithVocab(m.test, s.vocab, false);
  s.split.seed = m.seed;
  return s;
}

void CheckVocabMatches(const EmbeddingModel& model, const Vocab& vocab) {
  if (model.num_entities() != vocab.num_entities() ||
      model.num_relations() != vocab.num_relations()) {
    throw EvaluationError(
        "vocab mismatch: checkpoint has " +
        std::to_string(model.num_entities()) + " entities x " +
        std::to_string(model.num_relations()) + " relations, split vocab has " +
        std::to_string(vocab.num_entities()) + " entities x " +
        std::to_string(vocab.num_relations()) + " relations");
  }
}

void CmdEval(const EvalArgs& a, std::ostream& out) {
  if (a.task != "lp" && a.task != "clf") {
    throw ConfigError("--task must be lp or clf, got '" + a.task + "'");
  }
  const EmbeddingModel model = ReadCheckpoint(a.checkpoint);
  const LoadedSplit s = LoadSplit(a.manifest);
  CheckVocabMatches(model, s.vocab);

  const std::string out_dir =
      a.out_dir.empty() ? fs::path(a.checkpoint).parent_path().string()
                        : a.out_dir;
  if (!out_dir.empty()) EnsureDir(out_dir);
  const fs::path dir(out_dir);

  MetricsReport report;
  std::string plot_csv;
  if (a.task == "lp") {
    const FilterIndex index(s.split);
    LinkPredictionResult lp = LinkPrediction(model, s.split, index, a.workers);
    report = lp.report;
    if (a.plot) plot_csv = RankHistogramCsv(lp.ranks);
  } else {
    std::vector<RelationId> universe(s.vocab.num_relations());
    for (size_t r = 0; r < universe.size(); ++r) {
      universe[r] = static_cast<RelationId>(r);
    }
    ClassificationResult clf =
        DdiClassification(model, s.split, universe, a.workers);
    report = clf.report;
    if (a.plot) plot_csv = CurveCsv(clf.scores, clf.labels);
  }
  report.config_hash = SidecarValue(a.checkpoint, "config_hash");

  const std::string stem = "metrics_" + a.task;
  WriteFileAtomic(Join(dir, stem + ".txt"), report.ToTable());
  WriteFileAtomic(Join(dir, stem + ".csv"),
                  report.CsvHeader() + report.CsvRow());
  if (a.plot) {
    WriteFileAtomic(Join(dir, a.task == "lp" ? "plot_ranks.csv"
                                             : "plot_curves.csv"),
                    plot_csv);
  }
  out << report.ToTable();
}

// ---------------------------------------------------------------- export

struct ExportArgs {
  std::string checkpoint;
  std::string out_dir;
  std::string manifest;
  std::string format = "csv";
};

void CmdExport(const ExportArgs& a, std::ostream& out) {
  if (a.format != "csv") {
    throw ConfigError("--format must be csv, got '" + a.format + "'");
  }
  const EmbeddingModel model = ReadCheckpoint(a.checkpoint);
  std::vector<std::string> entity_names;
  std::vector<std::string> relation_names;
  if (!a.manifest.empty()) {
    const SplitManifest m = ReadSplitManifest(a.manifest);
    const Vocab vocab = ReadVocabFiles(m.entities, m.relations);
    CheckVocabMatches(model, vocab);
    entity_names = vocab.entity_names();
    relation_names = vocab.relation_names();
  } else {
    for (size_t i = 0; i < model.num_entities(); ++i) {
      entity_names.push_back(std::to_string(i));
    }
    for (size_t i = 0; i < model.num_relations(); ++i) {
      relation_names.push_back(std::to_string(i));
    }
  }
  EnsureDir(a.out_dir);
  WriteFileAtomic(Join(a.out_dir, "entities.csv"),
                  EmbeddingCsv(model.entities(), entity_names));
  WriteFileAtomic(Join(a.out_dir, "relations.csv"),
                  EmbeddingCsv(model.relations(), relation_names));
  out << "entities=" << model.num_entities()
      << " relations=" << model.num_relations() << "\n";
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kIo:
    case ErrorKind::kDomain:
      return kExitUsage;
    case ErrorKind::kParse:
    case ErrorKind::kData:
    case ErrorKind::kLookup:
    case ErrorKind::kEvaluation:
    case ErrorKind::kShape:
    case ErrorKind::kSampler:
      return kExitData;
    case ErrorKind::kTraining:
    case ErrorKind::kOracle:
      return kExitNumerical;
  }
  return kExitInternal;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Adversarial negative sampling for drug-drug interaction "
               "knowledge graph embeddings",
               "ddiadv"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load a TSV of triplets");
  c_ingest->add_option("tsv", ingest.tsv, "head<TAB>relation<TAB>tail file")
      ->required();
  c_ingest->add_option("out_dir", ingest.out_dir, "Output directory")
      ->required();
  c_ingest->add_flag("--header", ingest.has_header, "Skip the first line");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a clustered synthetic KG");
  c_synth->add_option("out", synth.out_path, "Output TSV")->required();
  c_synth->add_option("--entities", synth.params.num_entities)
      ->capture_default_str();
  c_synth->add_option("--relations", synth.params.num_relations)
      ->capture_default_str();
  c_synth->add_option("--clusters", synth.params.num_clusters)
      ->capture_default_str();
  c_synth->add_option("--density", synth.params.density)->capture_default_str();
  c_synth->add_option("--noise", synth.params.noise_rate)->capture_default_str();
  c_synth->add_option("--seed", synth.params.seed)->capture_default_str();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train from a run config");
  c_train->add_option("config", train.config_path, "Run config file")
      ->required();
  c_train->add_option("--set", train.sets, "Override a config key (key=value)");
  c_train->add_option("--out-dir", train.out_dir, "Override out_dir");
  std::optional<size_t> train_workers;
  c_train->add_option("--workers", train_workers, "Override workers");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  c_eval->add_option("checkpoint", eval.checkpoint)->required();
  c_eval->add_option("manifest", eval.manifest, "split.manifest from train")
      ->required();
  c_eval->add_option("--task", eval.task, "lp or clf")->capture_default_str();
  c_eval->add_option("--out-dir", eval.out_dir,
                     "Defaults to the checkpoint directory");
  c_eval->add_flag("--plot", eval.plot, "Also write plot-data CSV");
  c_eval->add_option("--workers", eval.workers)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  ExportArgs exp;
  auto* c_export = app.add_subcommand("export", "Export embeddings");
  c_export->add_option("checkpoint", exp.checkpoint)->required();
  c_export->add_option("out_dir", exp.out_dir)->required();
  c_export->add_option("--manifest", exp.manifest,
                       "split.manifest supplying names");
  c_export->add_option("--format", exp.format)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*c_ingest) CmdIngest(ingest, out);
    if (*c_synth) CmdSynth(synth, out);
    if (*c_train) {
      train.workers = train_workers;
      CmdTrain(train, out);
    }
    if (*c_eval) CmdEval(eval, out);
    if (*c_export) CmdExport(exp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

int RunCli(int argc, char** argv) {
  return RunCli(std::vector<std::string>(argv, argv + argc), std::cout,
                std::cerr);
}

}  // namespace ddiadv
