// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/stft.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace ineube {

namespace {

// Below this the overlap-add denominator is treated as zero. Only the first
// and last few samples of the span can get there.
constexpr double kMinDenominator = 1e-10;

Eigen::FFT<double> MakeRealFft() {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  return fft;
}

}  // namespace

void ValidateConfig(const StftConfig& config) {
  if (config.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (config.win_len <= 0 || config.hop <= 0)
    throw ConfigError("win_len and hop must be positive");
  if (config.win_len % config.hop != 0)
    throw ConfigError("hop must divide win_len");
  if (config.fft_size < config.win_len)
    throw ConfigError("fft_size must be >= win_len");
}

MultichannelSpectrogram::MultichannelSpectrogram(std::size_t channels,
                                                 std::size_t frames,
                                                 const StftConfig& config,
                                                 std::size_t signal_length)
    : config_(config),
      channels_(channels),
      frames_(frames),
      bins_(config.num_bins()),
      signal_length_(signal_length),
      data_(channels * frames * config.num_bins()) {}

bool MultichannelSpectrogram::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

Spectrogram ExtractChannel(const MultichannelSpectrogram& x, std::size_t p) {
  if (p >= x.num_channels()) throw DimensionError("channel index out of range");
  Spectrogram out(1, x.num_frames(), x.config(), x.signal_length());
  auto src = x.channel(p);
  std::copy(src.begin(), src.end(), out.channel(0).begin());
  return out;
}

MultichannelSpectrogram ConcatChannels(
    std::span<const MultichannelSpectrogram* const> parts) {
  if (parts.empty()) throw DimensionError("nothing to concatenate");
  const auto& first = *parts.front();
  std::size_t total = 0;
  for (const auto* part : parts) {
    if (!part->same_grid(first))
      throw DimensionError("concatenated spectrograms must share (T, F)");
    total += part->num_channels();
  }
  MultichannelSpectrogram out(total, first.num_frames(), first.config(),
                              first.signal_length());
  std::size_t p = 0;
  for (const auto* part : parts) {
    for (std::size_t q = 0; q < part->num_channels(); ++q, ++p) {
      auto src = part->channel(q);
      std::copy(src.begin(), src.end(), out.channel(p).begin());
    }
  }
  return out;
}

std::vector<double> MakeWindow(const StftConfig& config) {
  ValidateConfig(config);
  const int n = config.win_len;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    w[i] = std::sqrt(std::max(0.0, hann));
  }
  return w;
}

std::size_t NumFrames(std::size_t n, const StftConfig& config) {
  const auto win = static_cast<std::size_t>(config.win_len);
  const auto hop = static_cast<std::size_t>(config.hop);
  if (n < win) throw InputTooShortError("signal shorter than one STFT window");
  return 1 + (n - win + hop - 1) / hop;
}

MultichannelSpectrogram Analyze(const MultichannelWaveform& x,
                                const StftConfig& config) {
  ValidateConfig(config);
  if (x.channels.empty()) throw DimensionError("no channels to analyze");
  const std::size_t n = x.num_samples();
  for (const auto& ch : x.channels)
    if (ch.size() != n) throw DimensionError("channels differ in length");
  const std::size_t frames = NumFrames(n, config);
  const auto window = MakeWindow(config);
  const std::size_t win = window.size();
  const std::size_t hop = config.hop;
  const std::size_t bins = config.num_bins();

  MultichannelSpectrogram out(x.num_channels(), frames, config, n);
  ParallelFor(x.num_channels(), [&](std::size_t p) {
    auto fft = MakeRealFft();
    std::vector<double> frame(config.fft_size);
    std::vector<Complex> spectrum;
    const auto& ch = x.channels[p];
    for (std::size_t t = 0; t < frames; ++t) {
      std::fill(frame.begin(), frame.end(), 0.0);
      const std::size_t start = t * hop;
      const std::size_t avail = std::min(win, n - start);
      for (std::size_t i = 0; i < avail; ++i) frame[i] = ch[start + i] * window[i];
      fft.fwd(spectrum, frame);
      for (std::size_t f = 0; f < bins; ++f) out(p, t, f) = spectrum[f];
    }
  });
  return out;
}

Spectrogram Analyze(std::span<const double> x, const StftConfig& config) {
  MultichannelWaveform w;
  w.sample_rate = config.sample_rate;
  w.channels.emplace_back(x.begin(), x.end());
  return Analyze(w, config);
}

MultichannelWaveform Synthesize(const MultichannelSpectrogram& X,
                                std::optional<std::size_t> length) {
  const auto& config = X.config();
  const auto window = MakeWindow(config);
  const std::size_t win = window.size();
  const std::size_t hop = config.hop;
  const std::size_t frames = X.num_frames();
  const std::size_t bins = X.num_bins();
  if (bins != config.num_bins()) throw DimensionError("bin count does not match fft_size");
  if (!X.all_finite()) throw ParameterError("spectrogram contains non-finite values");

  const std::size_t span = frames == 0 ? 0 : (frames - 1) * hop + win;
  std::size_t out_len = span;
  if (length) {
    out_len = *length;
  } else if (X.signal_length() > 0) {
    out_len = X.signal_length();
  }

  std::vector<double> denom(span, 0.0);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t i = 0; i < win; ++i) denom[t * hop + i] += window[i] * window[i];
  // Samples covered by a full set of win/hop frames.
  const std::size_t interior_begin = win - hop;
  const std::size_t interior_end = frames * hop;
  for (std::size_t n = interior_begin; n < interior_end && n < span; ++n)
    if (denom[n] < kMinDenominator)
      throw Error("internal error: zero overlap-add normalization at interior sample");

  MultichannelWaveform out;
  out.sample_rate = config.sample_rate;
  out.channels.assign(X.num_channels(), Signal(out_len, 0.0));
  ParallelFor(X.num_channels(), [&](std::size_t p) {
    auto fft = MakeRealFft();
    std::vector<Complex> spectrum(bins);
    std::vector<double> frame;
    std::vector<double> acc(span, 0.0);
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t f = 0; f < bins; ++f) spectrum[f] = X(p, t, f);
      fft.inv(frame, spectrum, config.fft_size);
      for (std::size_t i = 0; i < win; ++i) acc[t * hop + i] += frame[i] * window[i];
    }
    auto& dst = out.channels[p];
    const std::size_t m = std::min(out_len, span);
    for (std::size_t n = 0; n < m; ++n)
      dst[n] = denom[n] >= kMinDenominator ? acc[n] / denom[n] : 0.0;
  });
  return out;
}

Signal SynthesizeSignal(const Spectrogram& X, std::optional<std::size_t> length) {
  if (X.num_channels() == 0) throw DimensionError("empty spectrogram");
  if (X.num_channels() == 1) return std::move(Synthesize(X, length).channels.front());
  return std::move(Synthesize(ExtractChannel(X, 0), length).channels.front());
}

}  // namespace ineube
