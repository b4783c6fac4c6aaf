// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Target estimators standing in for the two DNN stages. All of them return a
// single-channel spectrogram on the mixture's (T, F) grid.

#ifndef INEUBE_ESTIMATE_HPP_
#define INEUBE_ESTIMATE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ineube/common.hpp"
#include "ineube/simulate.hpp"
#include "ineube/stft.hpp"

namespace ineube {

inline constexpr double kDefaultMaxMask = 2.0;

// Per-frequency linear map from context-stacked input channels to the target:
// S(t,f) = M(f) Ytil(t,f), M(f) a 1 x in row with in = (l+1+r) * P.
struct RidgeModel {
  ContextSpec context;
  std::size_t in_channels = 0;
  double lambda = 0.0;
  std::vector<Eigen::RowVectorXcd> rows;  // one per frequency bin

  std::size_t num_bins() const { return rows.size(); }
  std::size_t in_dim() const { return context.stacked_dim(in_channels); }
};

struct TrainingPair {
  const MultichannelSpectrogram* features;
  const Spectrogram* target;
};

// Minimizes sum ||S - M Ytil||^2 + lambda ||M||_F^2 per frequency over every
// frame of every pair.
RidgeModel FitRidge(std::span<const TrainingPair> pairs, const ContextSpec& ctx,
                    double lambda);

// Stage-one training on scenes: features are the mixture STFT, the target is
// the dry-source STFT.
RidgeModel FitRidge(std::span<const Scene> scenes, const ContextSpec& ctx, double lambda,
                    const StftConfig& cfg);

Spectrogram ApplyRidge(const RidgeModel& model, const MultichannelSpectrogram& y);

// Data-fit term sum_t,f |S - M Ytil|^2 over all pairs.
double RidgeResidual(const RidgeModel& model, std::span<const TrainingPair> pairs);

// Binary model file ("NBRM", version 1, little-endian).
void SaveRidgeModel(const RidgeModel& model, const std::filesystem::path& path);
RidgeModel LoadRidgeModel(const std::filesystem::path& path);

Spectrogram EstimateOracle(const Scene& scene, const StftConfig& cfg);

// Dry source circularly shifted by shift_samples plus seeded white noise at
// noise_snr_db (kNoNoise disables the noise).
Spectrogram EstimateDegraded(const Scene& scene, int shift_samples, double noise_snr_db,
                             std::uint64_t seed, const StftConfig& cfg);

// min(|S| / (|Y_ref| + eps), max_mask) applied to Y_ref; keeps the mixture phase.
Spectrogram EstimateMagnitudeMask(const MultichannelSpectrogram& y, const Spectrogram& s,
                                  std::size_t ref_channel,
                                  double max_mask = kDefaultMaxMask);

struct OracleEstimator {};

// Through RunEstimator the noise seed is combined with the scene seed, so each
// scene gets its own noise realization.
struct DegradedOracleEstimator {
  int shift_samples = 0;
  double noise_snr_db = 10.0;
  std::uint64_t seed = 0;
};

struct MagnitudeMaskEstimator {
  std::size_t ref_channel = 0;
  double max_mask = kDefaultMaxMask;
};

struct RidgeEstimator {
  std::shared_ptr<const RidgeModel> model;
};

// Refiner-only: returns the beamformed channel of the refiner input unchanged.
struct BeamformedPassthrough {};

using EstimatorKind = std::variant<OracleEstimator, DegradedOracleEstimator,
                                   MagnitudeMaskEstimator, RidgeEstimator,
                                   BeamformedPassthrough>;

// What an estimator sees. `input` is the mixture STFT for the first stage and
// the concatenation [Y, S_mfMCWF, S_prev] for the refiner.
struct EstimatorInput {
  const Scene* scene = nullptr;
  const MultichannelSpectrogram* input = nullptr;
  std::size_t mixture_channels = 0;
  bool refiner = false;
};

Spectrogram RunEstimator(const EstimatorKind& kind, const EstimatorInput& in,
                         const StftConfig& cfg);

}  // namespace ineube

#endif  // INEUBE_ESTIMATE_HPP_
