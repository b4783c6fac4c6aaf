// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INEUBE_STFT_HPP_
#define INEUBE_STFT_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ineube/common.hpp"

namespace ineube {

enum class WindowType { kSqrtHann };

// Analysis configuration. The defaults are 32 ms windows with an 8 ms hop at
// 16 kHz.
struct StftConfig {
  int sample_rate = 16000;
  int win_len = 512;
  int hop = 128;
  int fft_size = 512;
  WindowType window = WindowType::kSqrtHann;

  std::size_t num_bins() const { return static_cast<std::size_t>(fft_size) / 2 + 1; }
  bool operator==(const StftConfig&) const = default;
};

// Throws ConfigError unless hop divides win_len and fft_size >= win_len.
void ValidateConfig(const StftConfig& config);

// Complex STFT tensor indexed (channel, frame, bin). Single-channel estimates
// (targets, DNN-stage outputs, beamformer outputs) use num_channels() == 1.
class MultichannelSpectrogram {
 public:
  MultichannelSpectrogram() = default;
  MultichannelSpectrogram(std::size_t channels, std::size_t frames,
                          const StftConfig& config, std::size_t signal_length = 0);

  std::size_t num_channels() const { return channels_; }
  std::size_t num_frames() const { return frames_; }
  std::size_t num_bins() const { return bins_; }
  const StftConfig& config() const { return config_; }

  // Length of the waveform the spectrogram was computed from, or 0 if
  // unknown. synthesize() truncates to this length.
  std::size_t signal_length() const { return signal_length_; }
  void set_signal_length(std::size_t n) { signal_length_ = n; }

  Complex& operator()(std::size_t p, std::size_t t, std::size_t f) {
    return data_[(p * frames_ + t) * bins_ + f];
  }
  const Complex& operator()(std::size_t p, std::size_t t, std::size_t f) const {
    return data_[(p * frames_ + t) * bins_ + f];
  }

  std::span<Complex> channel(std::size_t p) {
    return {data_.data() + p * frames_ * bins_, frames_ * bins_};
  }
  std::span<const Complex> channel(std::size_t p) const {
    return {data_.data() + p * frames_ * bins_, frames_ * bins_};
  }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  bool same_grid(const MultichannelSpectrogram& other) const {
    return frames_ == other.frames_ && bins_ == other.bins_;
  }

  bool all_finite() const;

 private:
  StftConfig config_;
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::size_t signal_length_ = 0;
  std::vector<Complex> data_;
};

using Spectrogram = MultichannelSpectrogram;

// Extracts channel p as a single-channel spectrogram.
Spectrogram ExtractChannel(const MultichannelSpectrogram& x, std::size_t p);

// Stacks channels of several spectrograms on the same grid, in order.
MultichannelSpectrogram ConcatChannels(
    std::span<const MultichannelSpectrogram* const> parts);

// Square root of the periodic Hann window.
std::vector<double> MakeWindow(const StftConfig& config);

// Number of frames produced for a signal of n samples.
std::size_t NumFrames(std::size_t n, const StftConfig& config);

MultichannelSpectrogram Analyze(const MultichannelWaveform& x,
                                const StftConfig& config);
Spectrogram Analyze(std::span<const double> x, const StftConfig& config);

// Weighted overlap-add with squared-window normalization. The output length
// is `length` when given, otherwise X.signal_length(), otherwise the full
// overlap-add span.
MultichannelWaveform Synthesize(const MultichannelSpectrogram& X,
                                std::optional<std::size_t> length = std::nullopt);

// Single-channel convenience: synthesizes channel 0.
Signal SynthesizeSignal(const Spectrogram& X,
                        std::optional<std::size_t> length = std::nullopt);

}  // namespace ineube

#endif  // INEUBE_STFT_HPP_
