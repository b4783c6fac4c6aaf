// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// key=value configuration files. One assignment per line, '#' starts a
// comment, surrounding whitespace is ignored. Unknown keys are errors.
//
//   sample_rate win_len hop fft_size        STFT
//   ctx = l,r  loading  iterations  seed    pipeline
//   estimator1 = oracle | degraded | mask | ridge
//   refiner2   = passthrough | oracle | degraded | mask | ridge
//   degraded_shift  degraded_snr_db  mask_ref_channel  mask_max
//   ridge1_model  ridge2_model               model files for ridge stages
//   ridge_ctx = l,r  ridge_lambda            fit-ridge settings
//   num_scenes duration_s n_channels delay_min delay_max channel_spread
//   rt60_s n_reflections reflection_level snr_lo snr_hi noiseless
//                                            scene generator

#ifndef INEUBE_CONFIG_HPP_
#define INEUBE_CONFIG_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "ineube/pipeline.hpp"
#include "ineube/simulate.hpp"

namespace ineube {

using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(std::istream& is);
KeyValues ReadKeyValues(const std::filesystem::path& path);

ContextSpec ParseContext(const std::string& text);

enum class EstimatorName { kOracle, kDegraded, kMask, kRidge, kPassthrough };

struct RunConfig {
  PipelineConfig pipeline;
  SceneSetConfig scenes;
  EstimatorName estimator1 = EstimatorName::kDegraded;
  EstimatorName refiner2 = EstimatorName::kPassthrough;
  DegradedOracleEstimator degraded;
  MagnitudeMaskEstimator mask;
  std::filesystem::path ridge1_model;
  std::filesystem::path ridge2_model;
  ContextSpec ridge_ctx = kDefaultContext;
  double ridge_lambda = 100.0;
};

// Applies the assignments in kv on top of cfg. The estimator variants in
// cfg.pipeline are only rebuilt by ResolveEstimators.
void ApplyKeyValues(const KeyValues& kv, RunConfig& cfg);

// Builds the two estimator variants from their names, loading ridge models
// from the configured paths. Degraded-oracle noise seeds derive from the
// pipeline seed.
void ResolveEstimators(RunConfig& cfg);

}  // namespace ineube

#endif  // INEUBE_CONFIG_HPP_
