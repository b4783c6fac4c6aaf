// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/pipeline.hpp"

#include <array>

namespace ineube {

namespace {

const char* StageName(Stage s) {
  switch (s) {
    case Stage::kEstimator1: return "estimator1";
    case Stage::kBeamformer: return "mfMCWF";
    case Stage::kRefiner: return "refiner2";
  }
  return "?";
}

template <typename Fn>
auto Labeled(Stage stage, int iteration, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string(StageName(stage)) + " (iteration " + std::to_string(iteration) +
                "): " + e.what());
  }
}

MetricsReport Measure(const Spectrogram& est, const Scene& scene, const PipelineConfig& cfg) {
  const Signal wav = SynthesizeSignal(est, scene.dry.size());
  EvaluateOptions opts;
  opts.stft = cfg.stft;
  return Evaluate(wav, scene.dry, opts);
}

}  // namespace

void ValidatePipelineConfig(const PipelineConfig& cfg) {
  ValidateConfig(cfg.stft);
  ValidateContext(cfg.ctx);
  if (cfg.iterations < 0 || cfg.iterations > kMaxIterations)
    throw ConfigError("iterations must be in [0, 8]");
  if (!(cfg.loading >= 0.0)) throw ConfigError("loading must be non-negative");
}

MultichannelSpectrogram RefinerFeatures(const MultichannelSpectrogram& y,
                                        const Spectrogram& beamformed,
                                        const Spectrogram& previous) {
  const std::array<const MultichannelSpectrogram*, 3> parts = {&y, &beamformed, &previous};
  return ConcatChannels(parts);
}

PipelineResult RunIneube(const Scene& scene, const PipelineConfig& cfg,
                         const StageObserver& observer) {
  ValidatePipelineConfig(cfg);
  const auto y = Analyze(scene.mixture, cfg.stft);
  const std::size_t channels = y.num_channels();
  auto notify = [&](Stage stage, int i, const MultichannelSpectrogram& in,
                    const Spectrogram& out) {
    if (observer) observer(StageEvent{stage, i, in, out});
  };

  EstimatorInput first{&scene, &y, channels, false};
  Spectrogram previous = Labeled(Stage::kEstimator1, 0,
                                 [&] { return RunEstimator(cfg.estimator1, first, cfg.stft); });
  notify(Stage::kEstimator1, -1, y, previous);

  PipelineResult result;
  for (int i = 0; i <= cfg.iterations; ++i) {
    const Spectrogram beamformed = Labeled(
        Stage::kBeamformer, i, [&] { return Mfmcwf(y, previous, cfg.ctx, cfg.loading); });
    notify(Stage::kBeamformer, i, y, beamformed);
    const auto features = RefinerFeatures(y, beamformed, previous);
    EstimatorInput refine{&scene, &features, channels, true};
    Spectrogram refined = Labeled(Stage::kRefiner, i, [&] {
      return RunEstimator(cfg.refiner2, refine, cfg.stft);
    });
    notify(Stage::kRefiner, i, features, refined);

    IterationRecord rec;
    rec.iteration = i;
    rec.source = i == 0 ? 1 : 2;
    if (cfg.compute_metrics) rec.metrics = Measure(refined, scene, cfg);
    result.trace.records.push_back(rec);
    previous = std::move(refined);
  }
  result.final = SynthesizeSignal(previous, scene.mixture.num_samples());
  result.final_spectrum = std::move(previous);
  return result;
}

std::vector<ReportRow> SweepContext(std::span<const Scene> scenes, const PipelineConfig& base,
                                    std::span<const ContextSpec> grid) {
  if (scenes.empty()) throw ParameterError("sweep needs at least one scene");
  if (grid.empty()) throw ParameterError("sweep needs a nonempty grid");
  ValidatePipelineConfig(base);

  // Estimates do not depend on (l, r); compute them once per scene.
  std::vector<MultichannelSpectrogram> mixtures(scenes.size());
  std::vector<Spectrogram> estimates(scenes.size());
  ParallelFor(scenes.size(), [&](std::size_t k) {
    mixtures[k] = Analyze(scenes[k].mixture, base.stft);
    EstimatorInput in{&scenes[k], &mixtures[k], mixtures[k].num_channels(), false};
    estimates[k] = RunEstimator(base.estimator1, in, base.stft);
  });

  std::vector<ReportRow> rows;
  for (const auto& ctx : grid) {
    ValidateContext(ctx);
    std::vector<MetricsReport> per_scene(scenes.size());
    ParallelFor(scenes.size(), [&](std::size_t k) {
      const auto out = Mfmcwf(mixtures[k], estimates[k], ctx, base.loading);
      per_scene[k] = Measure(out, scenes[k], base);
    });
    ReportRow mean;
    mean.id = "mean";
    mean.l = ctx.past;
    mean.r = ctx.future;
    const double n = static_cast<double>(scenes.size());
    double lag = 0.0;
    for (std::size_t k = 0; k < scenes.size(); ++k) {
      const auto& m = per_scene[k];
      rows.push_back(ReportRow{scenes[k].id, ctx.past, ctx.future, 0, m});
      mean.metrics.si_sdr_db += m.si_sdr_db / n;
      mean.metrics.stoi += m.stoi / n;
      mean.metrics.wav_mag_loss += m.wav_mag_loss / n;
      mean.metrics.wav_mag_loss_per_sample += m.wav_mag_loss_per_sample / n;
      mean.metrics.alpha += m.alpha / n;
      lag += m.best_lag / n;
    }
    mean.metrics.best_lag = static_cast<int>(std::lround(lag));
    rows.push_back(mean);
  }
  return rows;
}

RidgeModel FitRefinerRidge(std::span<const Scene> scenes, const PipelineConfig& cfg,
                           const RidgeModel& stage1, const ContextSpec& ridge_ctx,
                           double lambda) {
  if (scenes.empty()) throw ParameterError("empty training set");
  std::vector<MultichannelSpectrogram> features(scenes.size());
  std::vector<Spectrogram> targets(scenes.size());
  ParallelFor(scenes.size(), [&](std::size_t k) {
    const auto y = Analyze(scenes[k].mixture, cfg.stft);
    const auto s1 = ApplyRidge(stage1, y);
    const auto mf = Mfmcwf(y, s1, cfg.ctx, cfg.loading);
    features[k] = RefinerFeatures(y, mf, s1);
    targets[k] = Analyze(scenes[k].dry, cfg.stft);
  });
  std::vector<TrainingPair> pairs;
  for (std::size_t k = 0; k < scenes.size(); ++k) pairs.push_back({&features[k], &targets[k]});
  return FitRidge(pairs, ridge_ctx, lambda);
}

RidgeStages FitSequentialRidge(std::span<const Scene> scenes, const PipelineConfig& cfg,
                               const ContextSpec& ridge_ctx, double lambda1, double lambda2) {
  if (scenes.empty()) throw ParameterError("empty training set");
  RidgeStages stages;
  stages.stage1 = FitRidge(scenes, ridge_ctx, lambda1, cfg.stft);
  stages.stage2 = FitRefinerRidge(scenes, cfg, stages.stage1, ridge_ctx, lambda2);
  return stages;
}

void WriteTraceCsv(std::ostream& os, const std::string& id, const PipelineConfig& cfg,
                   const IterationTrace& trace, bool header) {
  if (header) WriteCsvHeader(os);
  for (const auto& rec : trace.records) {
    ReportRow row;
    row.id = id;
    row.l = cfg.ctx.past;
    row.r = cfg.ctx.future;
    row.iteration = rec.iteration;
    row.metrics = rec.metrics;
    WriteCsvRow(os, row);
  }
}

}  // namespace ineube
