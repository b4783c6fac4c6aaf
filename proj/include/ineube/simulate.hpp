// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Semi-synthetic scene generation: a dry source and a dry noise are convolved
// with per-channel impulse responses, mixed at a sampled SNR, and the
// mixture and the dry source are each normalized to unit sample variance.

#ifndef INEUBE_SIMULATE_HPP_
#define INEUBE_SIMULATE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ineube/common.hpp"
#include "ineube/stft.hpp"

namespace ineube {

// Noise gain 0: the mixture is the speech image alone.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct RirSpec {
  int n_channels = 8;
  std::vector<int> direct_delay_samples;  // one entry per channel
  double rt60_s = 0.25;
  int n_reflections = 16;
  // Peak amplitude of the earliest reflection relative to the direct path.
  double reflection_level = 0.5;
  std::uint64_t seed = 0;
};

struct Scene {
  std::string id;
  Signal dry;        // normalized to unit variance
  Signal noise_dry;
  MultichannelWaveform rir_speech;
  MultichannelWaveform rir_noise;
  MultichannelWaveform mixture;  // normalized to unit pooled variance
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double norm_gain = 1.0;      // applied to the mixture
  double dry_norm_gain = 1.0;  // applied to the dry source
  double noise_gain = 0.0;     // applied to the noise image before mixing
  std::vector<int> speech_delays;
  std::vector<int> noise_delays;
};

void ValidateRirSpec(const RirSpec& spec);

// Unit direct-path tap per channel plus seeded reflections whose energy decays
// as exp(-6.9 t / rt60) after the direct path. Reflections stop at rt60.
MultichannelWaveform SynthRir(const RirSpec& spec, const StftConfig& cfg);

// Channel p is (x * rirs_p) truncated to x.size().
MultichannelWaveform ConvolveMultichannel(std::span<const double> x,
                                          const MultichannelWaveform& rirs);

// Reference O(N K) convolution truncated to x.size().
Signal DirectConvolve(std::span<const double> x, std::span<const double> h);

double MeanPower(const MultichannelWaveform& x);

// Gain g such that MeanPower(speech) / MeanPower(g * noise) = 10^(snr/10).
// Returns 0 for snr_db = +inf.
double NoiseGainForSnr(const MultichannelWaveform& speech_img,
                       const MultichannelWaveform& noise_img, double snr_db);

MultichannelWaveform MixAtSnr(const MultichannelWaveform& speech_img,
                              const MultichannelWaveform& noise_img, double snr_db);

// Returns (x / sigma, 1 / sigma), sigma^2 the variance pooled over channels.
std::pair<MultichannelWaveform, double> NormalizeVariance(const MultichannelWaveform& x);
std::pair<Signal, double> NormalizeVariance(std::span<const double> x);

struct SnrRange {
  double lo = 6.0;
  double hi = 16.0;
};

Scene MakeScene(std::span<const double> dry, std::span<const double> noise,
                const RirSpec& speech_rir, const RirSpec& noise_rir,
                const SnrRange& snr_range, std::uint64_t seed, const StftConfig& cfg);

// Synthetic harmonic "vowel train" with formant glides, fricative bursts and
// leading/trailing silence.
Signal SpeechLikeSignal(std::size_t n, int sample_rate, std::uint64_t seed);

// First-order autoregressive Gaussian noise.
Signal ColoredNoise(std::size_t n, std::uint64_t seed, double pole = 0.7);

// Seeded generator for sets of misaligned noisy scenes.
struct SceneSetConfig {
  int num_scenes = 20;
  double duration_s = 3.0;
  int n_channels = 8;
  int delay_min = 50;
  int delay_max = 300;
  int channel_spread = 8;  // per-channel offsets in [0, spread]
  double rt60_s = 0.2;
  int n_reflections = 12;
  double reflection_level = 0.3;
  SnrRange snr{};
  bool noiseless = false;
};

Scene GenerateScene(const SceneSetConfig& config, std::uint64_t seed, int index,
                    const StftConfig& cfg);
std::vector<Scene> GenerateSceneSet(const SceneSetConfig& config, std::uint64_t seed,
                                    const StftConfig& cfg);

// Shifts x by k samples (positive delays), zero-filling.
Signal ShiftSignal(std::span<const double> x, int k);

}  // namespace ineube

#endif  // INEUBE_SIMULATE_HPP_
