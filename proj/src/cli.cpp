// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ineube/config.hpp"
#include "ineube/metrics.hpp"
#include "ineube/pipeline.hpp"
#include "ineube/scene_io.hpp"
#include "ineube/wav.hpp"

namespace ineube {

namespace {

namespace fs = std::filesystem;

// Flags shared by every subcommand that runs the pipeline.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string ctx;
  std::optional<double> loading;
  std::optional<int> iterations;
  std::string out;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool pipeline) {
  cmd->add_option("--config", f.config, "key=value config file");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output directory or file")->required();
  if (!pipeline) return;
  cmd->add_option("--ctx", f.ctx, "beamformer context l,r");
  cmd->add_option("--loading", f.loading, "relative diagonal loading");
  cmd->add_option("--iterations", f.iterations, "mfMCWF + refiner iterations");
}

RunConfig LoadConfig(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) ApplyKeyValues(ReadKeyValues(f.config), cfg);
  if (f.seed) cfg.pipeline.seed = *f.seed;
  if (!f.ctx.empty()) cfg.pipeline.ctx = ParseContext(f.ctx);
  if (f.loading) cfg.pipeline.loading = *f.loading;
  if (f.iterations) cfg.pipeline.iterations = *f.iterations;
  return cfg;
}

void CheckSampleRate(const Scene& scene, const StftConfig& stft) {
  if (scene.mixture.sample_rate != stft.sample_rate)
    throw ConfigError(scene.id + ": sample rate " + std::to_string(scene.mixture.sample_rate) +
                      " does not match the configured " + std::to_string(stft.sample_rate));
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void MakeDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int Simulate(const CommonFlags& f, std::ostream& out) {
  RunConfig cfg = LoadConfig(f);
  ValidateConfig(cfg.pipeline.stft);
  const auto scenes = GenerateSceneSet(cfg.scenes, cfg.pipeline.seed, cfg.pipeline.stft);
  WriteSceneSet(scenes, f.out);
  out << "wrote " << scenes.size() << " scenes to " << f.out << '\n';
  return kExitOk;
}

const char* StageFile(Stage s) {
  switch (s) {
    case Stage::kEstimator1: return "estimator1";
    case Stage::kBeamformer: return "mfmcwf";
    case Stage::kRefiner: return "refiner2";
  }
  return "stage";
}

int Enhance(const std::string& scene_dir, const CommonFlags& f, bool dump, std::ostream& out) {
  RunConfig cfg = LoadConfig(f);
  ResolveEstimators(cfg);
  const fs::path out_dir = f.out;
  MakeDir(out_dir);
  std::ofstream trace = OpenOut(out_dir / "trace.csv");
  WriteCsvHeader(trace);
  const auto dirs = ListSceneDirs(scene_dir);
  for (const auto& d : dirs) {
    const Scene scene = ReadSceneDir(d);
    CheckSampleRate(scene, cfg.pipeline.stft);
    StageObserver observer;
    if (dump) {
      const fs::path stage_dir = out_dir / "stages" / scene.id;
      MakeDir(stage_dir);
      observer = [&, stage_dir](const StageEvent& ev) {
        std::string name = StageFile(ev.stage);
        if (ev.iteration >= 0) name += "_i" + std::to_string(ev.iteration);
        const Signal wav = SynthesizeSignal(ev.output, scene.dry.size());
        WriteWav(stage_dir / (name + ".wav"), MonoWaveform(wav, cfg.pipeline.stft.sample_rate));
      };
    }
    const auto result = RunIneube(scene, cfg.pipeline, observer);
    WriteWav(out_dir / (scene.id + "_enhanced.wav"),
             MonoWaveform(result.final, cfg.pipeline.stft.sample_rate));
    WriteTraceCsv(trace, scene.id, cfg.pipeline, result.trace, false);
  }
  if (!trace) throw IoError("failed writing trace.csv");
  out << "enhanced " << dirs.size() << " scenes into " << out_dir.string() << '\n';
  return kExitOk;
}

std::vector<ContextSpec> ParseGrid(const std::vector<std::string>& items) {
  std::vector<ContextSpec> grid;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (ss >> tok) grid.push_back(ParseContext(tok));
  }
  if (grid.empty()) throw ConfigError("--grid needs at least one l,r entry");
  return grid;
}

int Sweep(const std::string& scene_dir, const CommonFlags& f,
          const std::vector<std::string>& grid_items, std::ostream& out) {
  RunConfig cfg = LoadConfig(f);
  ResolveEstimators(cfg);
  const auto grid = ParseGrid(grid_items);
  const auto scenes = ReadSceneSet(scene_dir);
  for (const auto& s : scenes) CheckSampleRate(s, cfg.pipeline.stft);
  const auto rows = SweepContext(scenes, cfg.pipeline, grid);
  fs::path path = f.out;
  if (fs::is_directory(path)) path /= "sweep.csv";
  std::ofstream os = OpenOut(path);
  WriteCsvHeader(os);
  for (const auto& row : rows) WriteCsvRow(os, row);
  if (!os) throw IoError("failed writing " + path.string());
  out << "wrote " << rows.size() << " rows to " << path.string() << '\n';
  return kExitOk;
}

int EvaluateFiles(const std::string& ref_path, const std::string& est_path,
                  std::optional<double> wer, const std::string& out_path, std::ostream& out) {
  const auto ref = ReadWav(ref_path);
  const auto est = ReadWav(est_path);
  if (ref.num_channels() != 1 || est.num_channels() != 1)
    throw ParameterError("evaluate expects mono WAV files");
  if (ref.sample_rate != est.sample_rate) throw ParameterError("sample rates differ");
  if (ref.num_samples() != est.num_samples()) throw ParameterError("signal lengths differ");
  EvaluateOptions opts;
  opts.stft.sample_rate = ref.sample_rate;
  opts.wer = wer;
  ReportRow row;
  row.id = fs::path(est_path).stem().string();
  row.metrics = Evaluate(est.channels[0], ref.channels[0], opts);
  if (out_path.empty()) {
    WriteCsvHeader(out);
    WriteCsvRow(out, row);
  } else {
    std::ofstream os = OpenOut(out_path);
    WriteCsvHeader(os);
    WriteCsvRow(os, row);
    if (!os) throw IoError("failed writing " + out_path);
  }
  return kExitOk;
}

int FitRidgeCommand(const std::string& scene_dir, const CommonFlags& f, int stage,
                    const std::string& model1, std::ostream& out) {
  RunConfig cfg = LoadConfig(f);
  ValidatePipelineConfig(cfg.pipeline);
  const auto scenes = ReadSceneSet(scene_dir);
  for (const auto& s : scenes) CheckSampleRate(s, cfg.pipeline.stft);
  RidgeModel model;
  if (stage == 1) {
    model = FitRidge(scenes, cfg.ridge_ctx, cfg.ridge_lambda, cfg.pipeline.stft);
  } else {
    if (model1.empty()) throw ConfigError("--stage 2 needs --model1");
    model = FitRefinerRidge(scenes, cfg.pipeline, LoadRidgeModel(model1), cfg.ridge_ctx,
                            cfg.ridge_lambda);
  }
  const fs::path path = f.out;
  if (path.has_parent_path()) MakeDir(path.parent_path());
  SaveRidgeModel(model, path);
  out << "wrote stage-" << stage << " ridge model (" << model.in_channels << " channels, "
      << model.num_bins() << " bins) to " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterative neural/beamforming speech enhancement", "ineube"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "generate a seeded scene set");
  AddCommon(sim, sim_flags, false);

  CommonFlags enh_flags;
  std::string enh_dir;
  bool dump = false;
  auto* enh = app.add_subcommand("enhance", "run the iterative pipeline on scenes");
  enh->add_option("scenes", enh_dir, "scene directory or scene-set directory")->required();
  enh->add_flag("--dump-stages", dump, "write every stage output as WAV");
  AddCommon(enh, enh_flags, true);

  CommonFlags sweep_flags;
  std::string sweep_dir;
  std::vector<std::string> grid = {"4,3"};
  auto* sweep = app.add_subcommand("sweep", "estimator-1 + mfMCWF over a context grid");
  sweep->add_option("scenes", sweep_dir, "scene-set directory")->required();
  sweep->add_option("--grid", grid, "contexts, e.g. --grid 4,3 5,2 0,0");
  AddCommon(sweep, sweep_flags, true);

  std::string ref_path, est_path, eval_out;
  std::optional<double> wer;
  auto* eval = app.add_subcommand("evaluate", "metrics row for an estimate against a reference");
  eval->add_option("reference", ref_path, "reference WAV")->required();
  eval->add_option("estimate", est_path, "estimated WAV")->required();
  eval->add_option("--wer", wer, "word error rate for the task-1 metric")
      ->check(CLI::Range(0.0, 1e9));
  eval->add_option("--out", eval_out, "CSV file (default: stdout)");

  CommonFlags fit_flags;
  std::string fit_dir, model1;
  int stage = 1;
  auto* fit = app.add_subcommand("fit-ridge", "fit a ridge estimator stage");
  fit->add_option("scenes", fit_dir, "training scene-set directory")->required();
  fit->add_option("--stage", stage, "1 or 2")->check(CLI::IsMember({1, 2}));
  fit->add_option("--model1", model1, "frozen stage-1 model (stage 2 only)");
  AddCommon(fit, fit_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (*sim) return Simulate(sim_flags, out);
    if (*enh) return Enhance(enh_dir, enh_flags, dump, out);
    if (*sweep) return Sweep(sweep_dir, sweep_flags, grid, out);
    if (*eval) return EvaluateFiles(ref_path, est_path, wer, eval_out, out);
    if (*fit) return FitRidgeCommand(fit_dir, fit_flags, stage, model1, out);
  } catch (const ConfigError& e) {
    err << "ineube: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "ineube: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ineube: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "ineube: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ineube
