// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace ineube {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void RequireSameLength(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("signals differ in length");
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double ScaleFactor(std::span<const double> s_hat, std::span<const double> s) {
  RequireSameLength(s_hat, s);
  const double energy = Dot(s_hat, s_hat);
  if (!(energy > 0.0)) throw DegenerateInputError("estimate has zero energy");
  return Dot(s, s_hat) / energy;
}

double WavMagLoss(std::span<const double> s_hat, std::span<const double> s,
                  const StftConfig& config) {
  const double alpha = ScaleFactor(s_hat, s);
  Signal scaled(s_hat.size());
  double wav = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    scaled[i] = alpha * s_hat[i];
    wav += std::abs(scaled[i] - s[i]);
  }
  const auto est_spec = Analyze(scaled, config);
  const auto ref_spec = Analyze(s, config);
  double mag = 0.0;
  const auto& a = est_spec.data();
  const auto& b = ref_spec.data();
  for (std::size_t i = 0; i < a.size(); ++i) mag += std::abs(std::abs(a[i]) - std::abs(b[i]));
  return wav + mag;
}

double SiSdr(std::span<const double> s_hat, std::span<const double> s) {
  RequireSameLength(s_hat, s);
  const double ref_energy = Dot(s, s);
  const double est_energy = Dot(s_hat, s_hat);
  if (!(ref_energy > 0.0) || !(est_energy > 0.0))
    throw DegenerateInputError("SI-SDR needs nonzero reference and estimate");
  const double alpha = Dot(s_hat, s) / ref_energy;
  double target = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double proj = alpha * s[i];
    target += proj * proj;
    const double e = proj - s_hat[i];
    residual += e * e;
  }
  if (residual <= 0.0) return kSiSdrCapDb;
  const double db = 10.0 * std::log10(target / residual);
  return std::min(db, kSiSdrCapDb);
}

Alignment AlignByXcorr(std::span<const double> s_hat, std::span<const double> s,
                       int max_lag) {
  RequireSameLength(s_hat, s);
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  if (max_lag < 0 || max_lag >= n) throw ParameterError("max_lag must be in [0, length)");
  const double norm = std::sqrt(Dot(s_hat, s_hat) * Dot(s, s));
  Alignment out;
  double best = -std::numeric_limits<double>::infinity();
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -lag);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - lag);
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += s_hat[i + lag] * s[i];
    const double score = norm > 0.0 ? acc / norm : 0.0;
    // Ties resolve to the smallest |lag|.
    if (score > best || (score == best && std::abs(lag) < std::abs(out.lag))) {
      best = score;
      out.lag = lag;
    }
  }
  out.aligned.assign(s.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t src = i + out.lag;
    if (src >= 0 && src < n) out.aligned[i] = s_hat[src];
  }
  return out;
}

double ComposeTask1(double stoi, double wer) {
  if (!(stoi >= 0.0 && stoi <= 1.0)) throw ParameterError("stoi must be in [0, 1]");
  if (!(wer >= 0.0)) throw ParameterError("wer must be non-negative");
  return (stoi + (1.0 - std::min(wer, 1.0))) / 2.0;
}

MetricsReport Evaluate(std::span<const double> s_hat, std::span<const double> s,
                       const EvaluateOptions& options) {
  MetricsReport report;
  report.si_sdr_db = SiSdr(s_hat, s);
  report.stoi = Stoi(s_hat, s, options.stft.sample_rate);
  report.alpha = ScaleFactor(s_hat, s);
  report.wav_mag_loss = WavMagLoss(s_hat, s, options.stft);
  report.wav_mag_loss_per_sample = report.wav_mag_loss / static_cast<double>(s.size());
  const int max_lag =
      std::min<int>(options.max_lag, static_cast<int>(s.size()) - 1);
  report.best_lag = AlignByXcorr(s_hat, s, max_lag).lag;
  if (options.wer) report.task1 = ComposeTask1(report.stoi, *options.wer);
  return report;
}

void WriteCsvHeader(std::ostream& os) {
  os << "id,l,r,iteration,si_sdr_db,stoi,wav_mag_loss,best_lag,task1,"
        "wav_mag_loss_per_sample\n";
}

void WriteCsvRow(std::ostream& os, const ReportRow& row) {
  const auto& m = row.metrics;
  os << row.id << ',' << row.l << ',' << row.r << ',' << row.iteration << ','
     << FormatDouble(m.si_sdr_db) << ',' << FormatDouble(m.stoi) << ','
     << FormatDouble(m.wav_mag_loss) << ',' << m.best_lag << ','
     << (m.task1 ? FormatDouble(*m.task1) : std::string()) << ','
     << FormatDouble(m.wav_mag_loss_per_sample) << '\n';
}

}  // namespace ineube
