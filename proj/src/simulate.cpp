// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

namespace ineube {

namespace {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Variance(const MultichannelWaveform& x) {
  double sum = 0.0;
  double count = 0.0;
  for (const auto& ch : x.channels) {
    for (double v : ch) sum += v;
    count += static_cast<double>(ch.size());
  }
  if (count == 0.0) return 0.0;
  const double mean = sum / count;
  double acc = 0.0;
  for (const auto& ch : x.channels)
    for (double v : ch) acc += (v - mean) * (v - mean);
  return acc / count;
}

MultichannelWaveform Scaled(const MultichannelWaveform& x, double g) {
  MultichannelWaveform out = x;
  for (auto& ch : out.channels)
    for (auto& v : ch) v *= g;
  return out;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void ValidateRirSpec(const RirSpec& spec) {
  if (spec.n_channels <= 0) throw ParameterError("RIR needs at least one channel");
  if (spec.direct_delay_samples.size() != static_cast<std::size_t>(spec.n_channels))
    throw ParameterError("one direct delay per channel required");
  for (int d : spec.direct_delay_samples)
    if (d < 0) throw ParameterError("direct delays must be non-negative");
  if (!(spec.rt60_s > 0.0)) throw ParameterError("rt60 must be positive");
  if (spec.n_reflections < 0) throw ParameterError("n_reflections must be non-negative");
}

MultichannelWaveform SynthRir(const RirSpec& spec, const StftConfig& cfg) {
  ValidateRirSpec(spec);
  const double decay_samples = spec.rt60_s * cfg.sample_rate;
  const int tail = std::max(1, static_cast<int>(std::floor(decay_samples)));
  const int max_delay =
      *std::max_element(spec.direct_delay_samples.begin(), spec.direct_delay_samples.end());
  const std::size_t len =
      static_cast<std::size_t>(max_delay) + (spec.n_reflections > 0 ? tail : 1);

  MultichannelWaveform out;
  out.sample_rate = cfg.sample_rate;
  out.channels.assign(spec.n_channels, Signal(len, 0.0));
  for (int p = 0; p < spec.n_channels; ++p) {
    auto& h = out.channels[p];
    const int d = spec.direct_delay_samples[p];
    h[d] = 1.0;
    std::mt19937_64 rng(MixSeed(spec.seed, static_cast<std::uint64_t>(p)));
    std::uniform_int_distribution<int> offset_dist(1, std::max(1, tail - 1));
    std::uniform_real_distribution<double> level_dist(0.2, 1.0);
    std::bernoulli_distribution sign_dist(0.5);
    for (int k = 0; k < spec.n_reflections; ++k) {
      const int offset = offset_dist(rng);
      // Amplitude envelope exp(-3.45 t / rt60) gives energy exp(-6.9 t / rt60).
      const double env = std::exp(-3.45 * offset / decay_samples);
      const double amp = spec.reflection_level * level_dist(rng) * env;
      h[d + offset] += sign_dist(rng) ? amp : -amp;
    }
  }
  return out;
}

Signal DirectConvolve(std::span<const double> x, std::span<const double> h) {
  Signal y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    const std::size_t kmax = std::min(h.size(), n + 1);
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

MultichannelWaveform ConvolveMultichannel(std::span<const double> x,
                                          const MultichannelWaveform& rirs) {
  if (x.empty()) throw ParameterError("cannot convolve an empty signal");
  if (rirs.channels.empty()) throw ParameterError("empty RIR set");
  for (const auto& h : rirs.channels)
    if (h.empty()) throw ParameterError("empty RIR");

  const std::size_t n = x.size();
  MultichannelWaveform out;
  out.sample_rate = rirs.sample_rate;
  out.channels.resize(rirs.num_channels());
  ParallelFor(rirs.num_channels(), [&](std::size_t p) {
    const auto& h = rirs.channels[p];
    const std::size_t k = std::min(h.size(), n);
    // Only the first n output samples are kept, so taps past n never matter.
    const std::size_t size = NextPow2(n + k - 1);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<double> xa(size, 0.0), ha(size, 0.0);
    std::copy(x.begin(), x.end(), xa.begin());
    std::copy(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(k), ha.begin());
    std::vector<Complex> xs, hs;
    fft.fwd(xs, xa);
    fft.fwd(hs, ha);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= hs[i];
    std::vector<double> y;
    fft.inv(y, xs, size);
    out.channels[p].assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  });
  return out;
}

double MeanPower(const MultichannelWaveform& x) {
  double acc = 0.0;
  double count = 0.0;
  for (const auto& ch : x.channels) {
    for (double v : ch) acc += v * v;
    count += static_cast<double>(ch.size());
  }
  return count > 0.0 ? acc / count : 0.0;
}

double NoiseGainForSnr(const MultichannelWaveform& speech_img,
                       const MultichannelWaveform& noise_img, double snr_db) {
  if (speech_img.num_channels() != noise_img.num_channels() ||
      speech_img.num_samples() != noise_img.num_samples())
    throw DimensionError("speech and noise images differ in shape");
  const double ps = MeanPower(speech_img);
  if (!(ps > 0.0)) throw ParameterError("speech image has zero power");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  if (!std::isfinite(snr_db)) throw ParameterError("snr_db must be finite or +inf");
  const double pn = MeanPower(noise_img);
  if (!(pn > 0.0)) throw ParameterError("noise image has zero power");
  return std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
}

MultichannelWaveform MixAtSnr(const MultichannelWaveform& speech_img,
                              const MultichannelWaveform& noise_img, double snr_db) {
  const double g = NoiseGainForSnr(speech_img, noise_img, snr_db);
  MultichannelWaveform out = speech_img;
  if (g == 0.0) return out;
  for (std::size_t p = 0; p < out.num_channels(); ++p)
    for (std::size_t i = 0; i < out.channels[p].size(); ++i)
      out.channels[p][i] += g * noise_img.channels[p][i];
  return out;
}

std::pair<MultichannelWaveform, double> NormalizeVariance(const MultichannelWaveform& x) {
  const double var = Variance(x);
  if (!(var > 0.0)) throw DegenerateInputError("cannot normalize zero-variance input");
  const double gain = 1.0 / std::sqrt(var);
  return {Scaled(x, gain), gain};
}

std::pair<Signal, double> NormalizeVariance(std::span<const double> x) {
  MultichannelWaveform w;
  w.channels.emplace_back(x.begin(), x.end());
  auto [out, gain] = NormalizeVariance(w);
  return {std::move(out.channels.front()), gain};
}

Scene MakeScene(std::span<const double> dry, std::span<const double> noise,
                const RirSpec& speech_rir, const RirSpec& noise_rir,
                const SnrRange& snr_range, std::uint64_t seed, const StftConfig& cfg) {
  if (dry.empty() || noise.empty()) throw ParameterError("scene inputs must be nonempty");
  if (noise.size() != dry.size()) throw DimensionError("dry source and noise differ in length");
  if (speech_rir.n_channels != noise_rir.n_channels)
    throw ParameterError("speech and noise RIRs differ in channel count");

  Scene scene;
  scene.seed = seed;
  scene.rir_speech = SynthRir(speech_rir, cfg);
  scene.rir_noise = SynthRir(noise_rir, cfg);
  scene.speech_delays = speech_rir.direct_delay_samples;
  scene.noise_delays = noise_rir.direct_delay_samples;

  std::mt19937_64 rng(MixSeed(seed, 0x5a5a));
  if (std::isinf(snr_range.lo) && std::isinf(snr_range.hi)) {
    scene.snr_db = kNoNoise;
  } else {
    if (snr_range.hi < snr_range.lo) throw ParameterError("empty SNR range");
    std::uniform_real_distribution<double> snr_dist(snr_range.lo, snr_range.hi);
    scene.snr_db = snr_range.lo == snr_range.hi ? snr_range.lo : snr_dist(rng);
  }

  const auto speech_img = ConvolveMultichannel(dry, scene.rir_speech);
  const auto noise_img = ConvolveMultichannel(noise, scene.rir_noise);
  scene.noise_gain = NoiseGainForSnr(speech_img, noise_img, scene.snr_db);
  auto mixture = MixAtSnr(speech_img, noise_img, scene.snr_db);
  mixture.sample_rate = cfg.sample_rate;

  auto [mix_norm, mix_gain] = NormalizeVariance(mixture);
  auto [dry_norm, dry_gain] = NormalizeVariance(dry);
  scene.mixture = std::move(mix_norm);
  scene.norm_gain = mix_gain;
  scene.dry = std::move(dry_norm);
  scene.dry_norm_gain = dry_gain;
  scene.noise_dry.assign(noise.begin(), noise.end());
  return scene;
}

Signal SpeechLikeSignal(std::size_t n, int sample_rate, std::uint64_t seed) {
  std::mt19937_64 rng(MixSeed(seed, 0x5eed));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  const double fs = sample_rate;
  const double nyquist = 0.5 * fs;
  Signal out(n, 0.0);

  // Silence margins shrink for clips shorter than about 1.8 s.
  const auto lead = std::min(static_cast<std::size_t>(range(0.12, 0.25) * fs), n / 6);
  const auto trail = std::min(static_cast<std::size_t>(0.3 * fs), n / 6);
  std::size_t pos = lead;
  const double speaker_f0 = range(95.0, 210.0);
  while (pos + static_cast<std::size_t>(0.08 * fs) + trail < n) {
    const auto len = std::min<std::size_t>(static_cast<std::size_t>(range(0.08, 0.26) * fs),
                                           n - trail - pos);
    const double level = std::pow(10.0, range(-10.0, 0.0) / 20.0);
    const double f0_start = speaker_f0 * range(0.85, 1.2);
    const double f0_end = f0_start * range(0.75, 1.3);
    const double formants_a[3] = {range(300, 850), range(900, 2300), range(2300, 3200)};
    const double formants_b[3] = {range(300, 850), range(900, 2300), range(2300, 3200)};
    const double bandwidth[3] = {range(60, 120), range(90, 160), range(120, 220)};
    const double attack = range(0.004, 0.015) * fs;
    const double release = range(0.03, 0.07) * fs;
    const double jitter_rate = range(3.0, 7.0);
    const double vib = 0.02;

    // Voiced part.
    const int max_harm = static_cast<int>(std::min(7000.0, nyquist - 100.0) / (f0_start * 0.7));
    std::vector<double> phase(max_harm + 1);
    for (auto& ph : phase) ph = range(0.0, 2.0 * std::numbers::pi);
    double f0_phase = 0.0;
    double aspiration = 0.0;
    const double breath = range(0.02, 0.07);
    for (std::size_t i = 0; i < len; ++i) {
      const double u = static_cast<double>(i) / len;
      const double f0 = (f0_start + (f0_end - f0_start) * u) *
                        (1.0 + vib * std::sin(2.0 * std::numbers::pi * jitter_rate * i / fs));
      f0_phase += 2.0 * std::numbers::pi * f0 / fs;
      double env = 1.0;
      if (i < attack) env = static_cast<double>(i) / attack;
      if (len - i < release) env = std::min(env, static_cast<double>(len - i) / release);
      double sample = 0.0;
      for (int k = 1; k <= max_harm; ++k) {
        const double fk = k * f0;
        if (fk >= std::min(7000.0, nyquist - 100.0)) break;
        double amp = 0.0;
        for (int m = 0; m < 3; ++m) {
          const double fm = formants_a[m] + (formants_b[m] - formants_a[m]) * u;
          const double x = (fk - fm) / bandwidth[m];
          amp += 1.0 / (1.0 + x * x) / (m + 1);
        }
        amp *= 1.0 / std::sqrt(static_cast<double>(k));
        sample += amp * std::sin(k * f0_phase + phase[k]);
      }
      aspiration = 0.5 * aspiration + gauss(rng);
      out[pos + i] += level * env * env * (sample + breath * aspiration);
    }

    // Fricative burst at the syllable onset or offset.
    if (uni(rng) < 0.8) {
      const auto blen = std::min<std::size_t>(static_cast<std::size_t>(range(0.03, 0.09) * fs), len);
      const bool at_onset = uni(rng) < 0.5;
      const std::size_t start = at_onset ? pos : pos + len - blen;
      const double blevel = level * range(0.3, 0.9);
      double prev = 0.0;
      for (std::size_t i = 0; i < blen; ++i) {
        const double w = std::sin(std::numbers::pi * static_cast<double>(i) / blen);
        const double g = gauss(rng);
        out[start + i] += blevel * w * (g - 0.9 * prev);  // high-pass tilt
        prev = g;
      }
    }
    pos += len + static_cast<std::size_t>(range(0.02, 0.12) * fs);
  }
  return out;
}

Signal ColoredNoise(std::size_t n, std::uint64_t seed, double pole) {
  std::mt19937_64 rng(MixSeed(seed, 0xc0105));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Signal out(n);
  double state = 0.0;
  for (auto& v : out) {
    state = pole * state + gauss(rng);
    v = state;
  }
  return out;
}

Scene GenerateScene(const SceneSetConfig& config, std::uint64_t seed, int index,
                    const StftConfig& cfg) {
  const std::uint64_t scene_seed = MixSeed(seed, static_cast<std::uint64_t>(index) + 1000);
  std::mt19937_64 rng(scene_seed);
  std::uniform_int_distribution<int> delay_dist(config.delay_min, config.delay_max);
  std::uniform_int_distribution<int> spread_dist(0, std::max(0, config.channel_spread));
  std::uniform_int_distribution<int> noise_delay_dist(0, 400);
  std::uniform_real_distribution<double> pole_dist(0.3, 0.95);

  const auto n = static_cast<std::size_t>(config.duration_s * cfg.sample_rate);
  const auto dry = SpeechLikeSignal(n, cfg.sample_rate, MixSeed(scene_seed, 1));
  const auto noise = ColoredNoise(n, MixSeed(scene_seed, 2), pole_dist(rng));

  RirSpec speech;
  speech.n_channels = config.n_channels;
  speech.rt60_s = config.rt60_s;
  speech.n_reflections = config.n_reflections;
  speech.reflection_level = config.reflection_level;
  speech.seed = MixSeed(scene_seed, 3);
  const int base = delay_dist(rng);
  for (int p = 0; p < config.n_channels; ++p)
    speech.direct_delay_samples.push_back(base + spread_dist(rng));

  RirSpec noise_rir = speech;
  noise_rir.seed = MixSeed(scene_seed, 4);
  noise_rir.direct_delay_samples.clear();
  const int noise_base = noise_delay_dist(rng);
  for (int p = 0; p < config.n_channels; ++p)
    noise_rir.direct_delay_samples.push_back(noise_base + spread_dist(rng));

  const SnrRange snr = config.noiseless ? SnrRange{kNoNoise, kNoNoise} : config.snr;
  Scene scene = MakeScene(dry, noise, speech, noise_rir, snr, scene_seed, cfg);
  char id[32];
  std::snprintf(id, sizeof(id), "scene_%03d", index);
  scene.id = id;
  return scene;
}

std::vector<Scene> GenerateSceneSet(const SceneSetConfig& config, std::uint64_t seed,
                                    const StftConfig& cfg) {
  if (config.num_scenes <= 0) throw ParameterError("num_scenes must be positive");
  std::vector<Scene> scenes(config.num_scenes);
  ParallelFor(scenes.size(), [&](std::size_t i) {
    scenes[i] = GenerateScene(config, seed, static_cast<int>(i), cfg);
  });
  return scenes;
}

Signal ShiftSignal(std::span<const double> x, int k) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  Signal out(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t src = i - k;
    if (src >= 0 && src < n) out[i] = x[src];
  }
  return out;
}

}  // namespace ineube
