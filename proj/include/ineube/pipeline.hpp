// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Iterative neural/beamforming enhancement:
//
//   S1        = estimator1(Y)
//   Smf_0     = mfMCWF(Y, S1)
//   S2_0      = refiner([Y, Smf_0, S1])
//   Smf_i     = mfMCWF(Y, S2_{i-1})                 i = 1..iterations
//   S2_i      = refiner([Y, Smf_i, S2_{i-1}])
//
// The final output is iSTFT(S2_iterations).

#ifndef INEUBE_PIPELINE_HPP_
#define INEUBE_PIPELINE_HPP_

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "ineube/beamform.hpp"
#include "ineube/estimate.hpp"
#include "ineube/metrics.hpp"
#include "ineube/simulate.hpp"
#include "ineube/stft.hpp"

namespace ineube {

inline constexpr int kMaxIterations = 8;
inline constexpr int kDefaultIterations = 2;

struct PipelineConfig {
  StftConfig stft;
  ContextSpec ctx = kDefaultContext;
  double loading = kDefaultLoading;
  EstimatorKind estimator1 = DegradedOracleEstimator{};
  EstimatorKind refiner2 = BeamformedPassthrough{};
  int iterations = kDefaultIterations;
  std::uint64_t seed = 0;
  bool compute_metrics = true;
};

void ValidatePipelineConfig(const PipelineConfig& cfg);

struct IterationRecord {
  int iteration = 0;
  int source = 1;  // which stage produced the estimate driving the beamformer
  MetricsReport metrics;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
};

enum class Stage { kEstimator1, kBeamformer, kRefiner };

struct StageEvent {
  Stage stage;
  int iteration;  // -1 for the first estimator
  const MultichannelSpectrogram& input;
  const Spectrogram& output;
};

using StageObserver = std::function<void(const StageEvent&)>;

struct PipelineResult {
  Signal final;
  Spectrogram final_spectrum;
  IterationTrace trace;
};

PipelineResult RunIneube(const Scene& scene, const PipelineConfig& cfg,
                         const StageObserver& observer = {});

// Refiner features for one scene: [Y, Smf, S_prev] on the mixture grid.
MultichannelSpectrogram RefinerFeatures(const MultichannelSpectrogram& y,
                                        const Spectrogram& beamformed,
                                        const Spectrogram& previous);

// Estimator-1 + mfMCWF stage evaluated for each (l, r). For every grid entry,
// in grid order: one row per scene, then a row with id "mean".
std::vector<ReportRow> SweepContext(std::span<const Scene> scenes, const PipelineConfig& base,
                                    std::span<const ContextSpec> grid);

struct RidgeStages {
  RidgeModel stage1;
  RidgeModel stage2;
};

// Stage 2 alone: features [Y, mfMCWF(Y, S1), S1] from a frozen stage 1.
RidgeModel FitRefinerRidge(std::span<const Scene> scenes, const PipelineConfig& cfg,
                           const RidgeModel& stage1, const ContextSpec& ridge_ctx,
                           double lambda);

// Sequential training: fit stage 1 on (Y, S), run it plus mfMCWF over the
// training set, then fit stage 2 on ([Y, Smf, S1], S).
RidgeStages FitSequentialRidge(std::span<const Scene> scenes, const PipelineConfig& cfg,
                               const ContextSpec& ridge_ctx, double lambda1, double lambda2);

void WriteTraceCsv(std::ostream& os, const std::string& id, const PipelineConfig& cfg,
                   const IterationTrace& trace, bool header);

}  // namespace ineube

#endif  // INEUBE_PIPELINE_HPP_
