// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>

#include "ineube/metrics.hpp"
#include "ineube/simulate.hpp"
#include "oracles.hpp"

namespace ineube {
namespace {

double Power(const MultichannelWaveform& x) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& c : x.channels)
    for (double v : c) {
      acc += v * v;
      ++n;
    }
  return acc / static_cast<double>(n);
}

MultichannelWaveform Scaled(const MultichannelWaveform& x, double g) {
  auto y = x;
  for (auto& c : y.channels)
    for (double& v : c) v *= g;
  return y;
}

MultichannelWaveform RandomImage(std::size_t p, std::size_t n, std::uint64_t seed) {
  MultichannelWaveform x;
  for (std::size_t c = 0; c < p; ++c) x.channels.push_back(oracle::RandomSignal(n, seed + c));
  return x;
}

TEST(Rir, DirectPathOnly) {
  RirSpec spec;
  spec.n_channels = 2;
  spec.n_reflections = 0;
  spec.direct_delay_samples = {37, 5};
  const auto h = SynthRir(spec, StftConfig{});
  ASSERT_EQ(h.num_channels(), 2u);
  for (std::size_t p = 0; p < 2; ++p) {
    const auto d = static_cast<std::size_t>(spec.direct_delay_samples[p]);
    for (std::size_t n = 0; n < h.channels[p].size(); ++n)
      EXPECT_EQ(h.channels[p][n], n == d ? 1.0 : 0.0) << p << "," << n;
  }
}

TEST(Rir, TailDecaysBy60DbWithinRt60) {
  RirSpec spec;
  spec.n_channels = 3;
  spec.direct_delay_samples = {10, 20, 30};
  spec.rt60_s = 0.1;
  spec.n_reflections = 200;
  spec.reflection_level = 1.0;
  spec.seed = 9;
  StftConfig cfg;
  const auto h = SynthRir(spec, cfg);
  const auto rt = static_cast<std::size_t>(spec.rt60_s * cfg.sample_rate);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto d = static_cast<std::size_t>(spec.direct_delay_samples[p]);
    double late = 0.0;
    for (std::size_t n = d + rt; n < h.channels[p].size(); ++n) late += h.channels[p][n] * h.channels[p][n];
    EXPECT_LE(late, 1e-3);
    // Sampled envelope: reflections near rt60 sit about 30 dB down in amplitude.
    double near = 0.0;
    for (std::size_t n = d + rt - rt / 10; n < d + rt; ++n)
      near = std::max(near, std::abs(h.channels[p][n]));
    EXPECT_LT(near, 1.0 * std::exp(-3.45 * 0.9) + 1e-12);
  }
}

TEST(Rir, SeededAndChannelsDiffer) {
  RirSpec spec;
  spec.n_channels = 2;
  spec.direct_delay_samples = {0, 0};
  spec.seed = 4;
  const auto a = SynthRir(spec, StftConfig{});
  const auto b = SynthRir(spec, StftConfig{});
  EXPECT_EQ(a.channels, b.channels);
  EXPECT_NE(a.channels[0], a.channels[1]);
  spec.seed = 5;
  EXPECT_NE(SynthRir(spec, StftConfig{}).channels, a.channels);
}

TEST(Rir, ValidatesSpec) {
  RirSpec spec;
  spec.n_channels = 2;
  spec.direct_delay_samples = {1};
  EXPECT_THROW(SynthRir(spec, StftConfig{}), ParameterError);
  spec.direct_delay_samples = {1, -1};
  EXPECT_THROW(SynthRir(spec, StftConfig{}), ParameterError);
}

TEST(Convolve, UnitImpulseAndDelay) {
  const auto x = oracle::RandomSignal(500, 1);
  MultichannelWaveform h;
  h.channels = {{1.0}, {0.0, 0.0, 0.0, 1.0}};
  const auto y = ConvolveMultichannel(x, h);
  ASSERT_EQ(y.num_samples(), x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    EXPECT_NEAR(y.channels[0][n], x[n], 1e-12);
    EXPECT_NEAR(y.channels[1][n], n < 3 ? 0.0 : x[n - 3], 1e-12);
  }
}

TEST(Convolve, MatchesDirectSum) {
  const auto x = oracle::RandomSignal(2000, 2);
  const auto h = oracle::RandomSignal(32, 3);
  const auto ref = oracle::Convolve(x, h);
  MultichannelWaveform rirs;
  rirs.channels = {h};
  const auto fast = ConvolveMultichannel(x, rirs);
  const auto direct = DirectConvolve(x, h);
  for (std::size_t n = 0; n < x.size(); ++n) {
    EXPECT_NEAR(fast.channels[0][n], ref[n], 1e-9);
    EXPECT_NEAR(direct[n], ref[n], 1e-12);
  }
}

TEST(Convolve, RejectsEmptyRir) {
  MultichannelWaveform rirs;
  rirs.channels = {Signal{}};
  EXPECT_THROW(ConvolveMultichannel(Signal(10, 1.0), rirs), ParameterError);
}

TEST(Mix, PowerRatioMatchesTarget) {
  const auto s = RandomImage(4, 3000, 10);
  const auto n = Scaled(RandomImage(4, 3000, 20), 0.3);
  for (double snr : {0.0, 6.0, 16.0, -3.5}) {
    const double g = NoiseGainForSnr(s, n, snr);
    EXPECT_NEAR(Power(s) / Power(Scaled(n, g)), std::pow(10.0, snr / 10.0),
                1e-9 * std::pow(10.0, snr / 10.0))
        << snr;
    const auto y = MixAtSnr(s, n, snr);
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t i = 0; i < 3000; i += 97)
        EXPECT_NEAR(y.channels[p][i], s.channels[p][i] + g * n.channels[p][i], 1e-12);
  }
}

TEST(Mix, InfiniteSnrIsSpeechOnly) {
  const auto s = RandomImage(2, 100, 30);
  const auto n = RandomImage(2, 100, 40);
  EXPECT_EQ(NoiseGainForSnr(s, n, kNoNoise), 0.0);
  EXPECT_EQ(MixAtSnr(s, n, kNoNoise).channels, s.channels);
}

TEST(Mix, ZeroNoiseRejected) {
  const auto s = RandomImage(2, 100, 50);
  MultichannelWaveform z;
  z.channels.assign(2, Signal(100, 0.0));
  EXPECT_THROW(MixAtSnr(s, z, 10.0), ParameterError);
}

TEST(Normalize, UnitVarianceAndGain) {
  const auto x = Scaled(RandomImage(3, 4000, 60), 2.5);
  const auto [y, g] = NormalizeVariance(x);
  double mean = 0.0, n = 0.0;
  for (const auto& c : y.channels)
    for (double v : c) {
      mean += v;
      n += 1.0;
    }
  mean /= n;
  double var = 0.0;
  for (const auto& c : y.channels)
    for (double v : c) var += (v - mean) * (v - mean);
  EXPECT_NEAR(var / n, 1.0, 1e-9);

  const auto [y2, g2] = NormalizeVariance(y);
  EXPECT_NEAR(g2, 1.0, 1e-9);

  const auto [y5, g5] = NormalizeVariance(Scaled(x, 5.0));
  EXPECT_NEAR(g5, g / 5.0, 1e-12 * g);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t i = 0; i < 4000; i += 101) EXPECT_NEAR(y5.channels[p][i], y.channels[p][i], 1e-12);
}

TEST(Normalize, ZeroVarianceRejected) {
  MultichannelWaveform z;
  z.channels = {Signal(10, 3.0)};
  EXPECT_THROW(NormalizeVariance(z), DegenerateInputError);
  EXPECT_THROW(NormalizeVariance(Signal(10, 0.0)), DegenerateInputError);
}

TEST(Scene, ReproducibleAndInRange) {
  SceneSetConfig cfg;
  cfg.num_scenes = 4;
  cfg.duration_s = 1.0;
  const auto a = GenerateSceneSet(cfg, 77, StftConfig{});
  const auto b = GenerateSceneSet(cfg, 77, StftConfig{});
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mixture.channels, b[i].mixture.channels);
    EXPECT_EQ(a[i].dry, b[i].dry);
    EXPECT_EQ(a[i].snr_db, b[i].snr_db);
    EXPECT_GE(a[i].snr_db, 6.0);
    EXPECT_LE(a[i].snr_db, 16.0);
    EXPECT_EQ(a[i].mixture.num_channels(), 8u);
    for (int d : a[i].speech_delays) {
      EXPECT_GE(d, cfg.delay_min);
      EXPECT_LE(d, cfg.delay_max + cfg.channel_spread);
    }
  }
  EXPECT_NE(a[0].dry, a[1].dry);
  EXPECT_EQ(a[2].id, "scene_002");
}

TEST(Scene, NoiselessDirectPathIsShiftedDry) {
  const auto dry = SpeechLikeSignal(8000, 16000, 3);
  RirSpec rir;
  rir.n_channels = 2;
  rir.n_reflections = 0;
  rir.direct_delay_samples = {40, 75};
  const auto scene = MakeScene(dry, ColoredNoise(dry.size(), 1), rir, rir,
                               {kNoNoise, kNoNoise}, 5, StftConfig{});
  EXPECT_EQ(scene.noise_gain, 0.0);
  for (std::size_t p = 0; p < 2; ++p) {
    const auto shifted = ShiftSignal(dry, rir.direct_delay_samples[p]);
    for (std::size_t n = 0; n < dry.size(); ++n)
      EXPECT_NEAR(scene.mixture.channels[p][n], scene.norm_gain * shifted[n], 1e-9);
  }
  // Alignment recovers the leading delay of the dry source.
  EXPECT_EQ(AlignByXcorr(scene.mixture.channels[0], scene.dry, 200).lag, 40);
}

TEST(Scene, DryAndMixtureNormalizedIndependently) {
  SceneSetConfig cfg;
  cfg.num_scenes = 1;
  cfg.duration_s = 1.0;
  const auto s = GenerateScene(cfg, 3, 0, StftConfig{});
  const auto [d, gd] = NormalizeVariance(s.dry);
  EXPECT_NEAR(gd, 1.0, 1e-9);
  const auto [m, gm] = NormalizeVariance(s.mixture);
  EXPECT_NEAR(gm, 1.0, 1e-9);
}

TEST(Signals, SpeechLikeHasSilenceAndIsSeeded) {
  const auto a = SpeechLikeSignal(32000, 16000, 1);
  EXPECT_EQ(a, SpeechLikeSignal(32000, 16000, 1));
  EXPECT_NE(a, SpeechLikeSignal(32000, 16000, 2));
  for (std::size_t i = 0; i < 1600; ++i) EXPECT_EQ(a[i], 0.0);
  double energy = 0.0;
  for (double v : a) energy += v * v;
  EXPECT_GT(energy, 0.0);
}

TEST(Signals, ShiftFillsWithZeros) {
  const Signal x = {1, 2, 3, 4};
  EXPECT_EQ(ShiftSignal(x, 1), (Signal{0, 1, 2, 3}));
  EXPECT_EQ(ShiftSignal(x, -2), (Signal{3, 4, 0, 0}));
}

}  // namespace
}  // namespace ineube
