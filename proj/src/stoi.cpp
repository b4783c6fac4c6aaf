// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// STOI. Signals are resampled to 10 kHz, silent frames (40 dB below the
// loudest reference frame) are dropped, and 15 one-third-octave band
// envelopes from 150 Hz are compared over 30-frame (384 ms) segments after
// clipping the estimate at -15 dB signal-to-distortion.

#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "ineube/metrics.hpp"

namespace ineube {

namespace {

constexpr int kStoiRate = 10000;
constexpr int kFrameLen = 256;
constexpr int kFftLen = 512;
constexpr int kNumBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegmentLen = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hann window without the zero endpoints (MATLAB hanning(n)).
std::vector<double> StoiWindow() {
  std::vector<double> w(kFrameLen);
  for (int i = 0; i < kFrameLen; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (kFrameLen + 1));
  return w;
}

double Norm(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

// Drops frames of x below max energy - dyn_range, applies the same mask to
// y, and overlap-adds the remaining windowed frames.
void RemoveSilentFrames(Signal& x, Signal& y) {
  const auto w = StoiWindow();
  const int hop = kFrameLen / 2;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<std::ptrdiff_t> starts;
  for (std::ptrdiff_t i = 0; i < n - kFrameLen; i += hop) starts.push_back(i);

  std::vector<double> energy(starts.size());
  Signal frame(kFrameLen);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    for (int i = 0; i < kFrameLen; ++i) frame[i] = w[i] * x[starts[k] + i];
    energy[k] = 20.0 * std::log10(Norm(frame) + kEps);
  }
  const double peak =
      energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());

  std::vector<std::ptrdiff_t> kept;
  for (std::size_t k = 0; k < starts.size(); ++k)
    if (peak - kDynRange - energy[k] < 0.0) kept.push_back(starts[k]);

  const std::size_t len =
      kept.empty() ? 0 : (kept.size() - 1) * hop + static_cast<std::size_t>(kFrameLen);
  Signal xs(len, 0.0), ys(len, 0.0);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    for (int i = 0; i < kFrameLen; ++i) {
      xs[k * hop + i] += w[i] * x[kept[k] + i];
      ys[k * hop + i] += w[i] * y[kept[k] + i];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

// Magnitude-squared spectra, one row per frame (frame starts 0, hop, ...
// strictly below n - frame_len).
std::vector<std::vector<double>> PowerFrames(const Signal& x) {
  const auto w = StoiWindow();
  const int hop = kFrameLen / 2;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::vector<double>> out;
  std::vector<double> frame(kFftLen);
  std::vector<Complex> spec;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::ptrdiff_t i = 0; i < n - kFrameLen; i += hop) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int k = 0; k < kFrameLen; ++k) frame[k] = w[k] * x[i + k];
    fft.fwd(spec, frame);
    std::vector<double> power(kFftLen / 2 + 1);
    for (int k = 0; k <= kFftLen / 2; ++k) power[k] = std::norm(spec[k]);
    out.push_back(std::move(power));
  }
  return out;
}

// [first, last) bin ranges of the one-third-octave bands.
std::vector<std::pair<int, int>> ThirdOctaveBands() {
  const int bins = kFftLen / 2 + 1;
  std::vector<double> freq(bins);
  for (int k = 0; k < bins; ++k)
    freq[k] = static_cast<double>(kStoiRate) * k / kFftLen;
  auto nearest = [&](double target) {
    int best = 0;
    for (int k = 1; k < bins; ++k)
      if ((freq[k] - target) * (freq[k] - target) <
          (freq[best] - target) * (freq[best] - target))
        best = k;
    return best;
  };
  std::vector<std::pair<int, int>> bands;
  for (int b = 0; b < kNumBands; ++b) {
    const double lo = kMinFreq * std::pow(2.0, (2.0 * b - 1.0) / 6.0);
    const double hi = kMinFreq * std::pow(2.0, (2.0 * b + 1.0) / 6.0);
    bands.emplace_back(nearest(lo), nearest(hi));
  }
  return bands;
}

// Band envelopes indexed [band][frame].
std::vector<std::vector<double>> BandEnvelopes(const Signal& x) {
  static const auto bands = ThirdOctaveBands();
  const auto power = PowerFrames(x);
  std::vector<std::vector<double>> env(kNumBands, std::vector<double>(power.size()));
  for (std::size_t t = 0; t < power.size(); ++t) {
    for (int b = 0; b < kNumBands; ++b) {
      double acc = 0.0;
      for (int k = bands[b].first; k < bands[b].second; ++k) acc += power[t][k];
      env[b][t] = std::sqrt(acc);
    }
  }
  return env;
}

// Kaiser-windowed sinc with 60 dB rejection and a 10% roll-off, normalised to
// unit DC gain before the up-sampling gain is applied (matches pystoi).
std::vector<double> KaiserLowpass(int up, int down) {
  constexpr double kRejectionDb = 60.0;
  const double stop = 1.0 / (2.0 * std::max(up, down));
  const double roll_off = stop / 10.0;
  const int half = static_cast<int>(std::ceil((kRejectionDb - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (kRejectionDb - 8.7);
  const double denom = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double x = 2.0 * stop * i;
    const double sinc = i == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double ratio = static_cast<double>(i) / half;
    const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - ratio * ratio)) / denom;
    h[i + half] = sinc * win;
    sum += h[i + half];
  }
  for (auto& v : h) v *= up / sum;
  return h;
}

}  // namespace

Signal ResamplePoly(std::span<const double> x, int up, int down) {
  if (up <= 0 || down <= 0) throw ParameterError("resampling factors must be positive");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return Signal(x.begin(), x.end());
  const auto h = KaiserLowpass(up, down);
  const auto half = static_cast<std::ptrdiff_t>(h.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::size_t out_len = (x.size() * up + down - 1) / down;
  Signal y(out_len, 0.0);
  // y[k] = sum_m x_up[m] h[k*down + half - m], x_up[m] = x[m/up] when up | m.
  for (std::size_t k = 0; k < out_len; ++k) {
    const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(k) * down + half;
    const std::ptrdiff_t m_lo = std::max<std::ptrdiff_t>(0, center - 2 * half);
    const std::ptrdiff_t m_hi = std::min<std::ptrdiff_t>(n * up - 1, center);
    std::ptrdiff_t m = m_lo + ((up - m_lo % up) % up);
    double acc = 0.0;
    for (; m <= m_hi; m += up) acc += x[m / up] * h[center - m];
    y[k] = acc;
  }
  return y;
}

double Stoi(std::span<const double> s_hat, std::span<const double> s, int sample_rate) {
  if (s_hat.size() != s.size()) throw DimensionError("signals differ in length");
  if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
  const double min_samples = 0.384 * sample_rate;
  if (static_cast<double>(s.size()) < min_samples)
    throw ParameterError("STOI needs at least 384 ms of audio");

  Signal x = ResamplePoly(s, kStoiRate, sample_rate);
  Signal y = ResamplePoly(s_hat, kStoiRate, sample_rate);
  RemoveSilentFrames(x, y);

  const auto x_env = BandEnvelopes(x);
  const auto y_env = BandEnvelopes(y);
  const auto frames = static_cast<int>(x_env.front().size());
  if (frames < kSegmentLen)
    throw ParameterError("STOI needs at least 30 non-silent frames");

  const double clip = std::pow(10.0, -kBeta / 20.0);
  double total = 0.0;
  int count = 0;
  std::vector<double> xs(kSegmentLen), ys(kSegmentLen);
  for (int m = kSegmentLen; m <= frames; ++m) {
    for (int b = 0; b < kNumBands; ++b) {
      for (int i = 0; i < kSegmentLen; ++i) {
        xs[i] = x_env[b][m - kSegmentLen + i];
        ys[i] = y_env[b][m - kSegmentLen + i];
      }
      const double scale = Norm(xs) / (Norm(ys) + kEps);
      for (int i = 0; i < kSegmentLen; ++i) ys[i] = std::min(ys[i] * scale, xs[i] * (1.0 + clip));
      const double xm = std::accumulate(xs.begin(), xs.end(), 0.0) / kSegmentLen;
      const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / kSegmentLen;
      for (int i = 0; i < kSegmentLen; ++i) {
        xs[i] -= xm;
        ys[i] -= ym;
      }
      const double xn = Norm(xs) + kEps;
      const double yn = Norm(ys) + kEps;
      double corr = 0.0;
      for (int i = 0; i < kSegmentLen; ++i) corr += (xs[i] / xn) * (ys[i] / yn);
      total += corr;
      ++count;
    }
  }
  const double d = total / count;
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace ineube
