// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INEUBE_METRICS_HPP_
#define INEUBE_METRICS_HPP_

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "ineube/common.hpp"
#include "ineube/stft.hpp"

namespace ineube {

inline constexpr double kSiSdrCapDb = 120.0;

struct MetricsReport {
  double si_sdr_db = 0.0;
  double stoi = 0.0;
  double wav_mag_loss = 0.0;
  double wav_mag_loss_per_sample = 0.0;
  double alpha = 0.0;
  int best_lag = 0;
  std::optional<double> task1;
};

// argmin_a ||a * s_hat - s||^2 = (s . s_hat) / (s_hat . s_hat).
double ScaleFactor(std::span<const double> s_hat, std::span<const double> s);

// ||a s_hat - s||_1 + || |STFT(a s_hat)| - |STFT(s)| ||_1 with a = ScaleFactor.
// Both norms are plain sums over samples and time-frequency bins.
double WavMagLoss(std::span<const double> s_hat, std::span<const double> s,
                  const StftConfig& config = {});

// Scale-invariant SDR in dB, capped at kSiSdrCapDb.
double SiSdr(std::span<const double> s_hat, std::span<const double> s);

// Short-time objective intelligibility of s_hat against the clean reference s.
double Stoi(std::span<const double> s_hat, std::span<const double> s, int sample_rate);

// Polyphase rational resampler (Kaiser-windowed sinc, beta = 14). Output length
// is ceil(n * up / down).
Signal ResamplePoly(std::span<const double> x, int up, int down);

struct Alignment {
  int lag = 0;
  Signal aligned;
};

// Lag in [-max_lag, max_lag] maximizing the normalized cross-correlation
// sum_n s_hat[n + lag] s[n]. `aligned` is s_hat advanced by lag, zero-filled.
Alignment AlignByXcorr(std::span<const double> s_hat, std::span<const double> s,
                       int max_lag);

// (stoi + 1 - min(wer, 1)) / 2.
double ComposeTask1(double stoi, double wer);

struct EvaluateOptions {
  StftConfig stft;
  int max_lag = 800;
  std::optional<double> wer;
};

MetricsReport Evaluate(std::span<const double> s_hat, std::span<const double> s,
                       const EvaluateOptions& options = {});

// CSV report with one row per evaluated utterance.
struct ReportRow {
  std::string id;
  int l = 0;
  int r = 0;
  int iteration = 0;
  MetricsReport metrics;
};

void WriteCsvHeader(std::ostream& os);
void WriteCsvRow(std::ostream& os, const ReportRow& row);

}  // namespace ineube

#endif  // INEUBE_METRICS_HPP_
