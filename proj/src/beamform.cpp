// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/beamform.hpp"

#include "ineube/linalg.hpp"

namespace ineube {

namespace {

// Loading floor for all-zero statistics.
constexpr double kLoadingFloor = 1e-12;

void CheckTargetGrid(std::size_t frames, std::size_t bins, const Spectrogram& s_hat) {
  if (s_hat.num_channels() != 1)
    throw DimensionError("target estimate must be single-channel");
  if (s_hat.num_frames() != frames || s_hat.num_bins() != bins)
    throw DimensionError("target estimate and mixture differ in (T, F)");
}

}  // namespace

namespace detail {

RowMajorMatrix StackFrequency(const MultichannelSpectrogram& y, const ContextSpec& ctx,
                              std::size_t f) {
  const std::size_t frames = y.num_frames();
  const std::size_t channels = y.num_channels();
  RowMajorMatrix a = RowMajorMatrix::Zero(static_cast<Eigen::Index>(frames),
                                          static_cast<Eigen::Index>(ctx.stacked_dim(channels)));
  for (std::size_t t = 0; t < frames; ++t) {
    for (int k = 0; k < ctx.num_frames(); ++k) {
      const auto src = static_cast<std::ptrdiff_t>(t) - ctx.past + k;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(frames)) continue;
      for (std::size_t p = 0; p < channels; ++p)
        a(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k * channels + p)) =
            y(p, static_cast<std::size_t>(src), f);
    }
  }
  return a;
}

void FrequencyStats(const MatrixRef& a, const Spectrogram& s_hat, std::size_t f,
                    Eigen::MatrixXcd& phi, Eigen::VectorXcd& z) {
  const auto frames = a.rows();
  Eigen::VectorXcd target(frames);
  for (Eigen::Index t = 0; t < frames; ++t)
    target(t) = s_hat(0, static_cast<std::size_t>(t), f);
  Eigen::MatrixXcd raw = a.transpose() * a.conjugate();
  phi = 0.5 * (raw + raw.adjoint());
  z = a.transpose() * target.conjugate();
}

Eigen::VectorXcd SolveLoaded(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& z,
                             double loading, std::size_t f, double* delta) {
  const auto dim = phi.rows();
  if (dim != z.size()) throw DimensionError("statistics size mismatch");
  const double trace = phi.diagonal().real().sum();
  double d = loading * trace / static_cast<double>(dim);
  if (!(trace > 0.0)) d = kLoadingFloor;
  Eigen::MatrixXcd loaded = phi;
  loaded.diagonal().array() += d;
  if (delta) *delta = d;
  return SolveHermitian(loaded, z, f);
}

void ApplyFrequency(const MatrixRef& a, const Eigen::VectorXcd& w, Spectrogram& out,
                    std::size_t f) {
  if (a.cols() != w.size())
    throw DimensionError("filter dimension does not match stacked mixture");
  // w^H ytil(t) = conj(conj(ytil(t))^T w).
  Eigen::VectorXcd y = a.conjugate() * w;
  for (Eigen::Index t = 0; t < a.rows(); ++t)
    out(0, static_cast<std::size_t>(t), f) = std::conj(y(t));
}

}  // namespace detail

StackedSpectrogram::StackedSpectrogram(std::size_t frames, std::size_t bins,
                                       std::size_t channels, const ContextSpec& context)
    : frames_(frames),
      bins_(bins),
      channels_(channels),
      dim_(context.stacked_dim(channels)),
      context_(context),
      data_(frames * bins * context.stacked_dim(channels)) {}

StackedSpectrogram StackContext(const MultichannelSpectrogram& y, const ContextSpec& ctx) {
  ValidateContext(ctx);
  if (!y.all_finite()) throw ParameterError("mixture spectrogram contains non-finite values");
  StackedSpectrogram out(y.num_frames(), y.num_bins(), y.num_channels(), ctx);
  ParallelFor(y.num_bins(), [&](std::size_t f) {
    const auto a = detail::StackFrequency(y, ctx, f);
    std::copy(a.data(), a.data() + a.size(), &out(0, f, 0));
  });
  return out;
}

BeamformStats AccumulateStats(const StackedSpectrogram& ytil, const Spectrogram& s_hat) {
  CheckTargetGrid(ytil.num_frames(), ytil.num_bins(), s_hat);
  const std::size_t bins = ytil.num_bins();
  BeamformStats stats;
  stats.phi.resize(bins);
  stats.z.resize(bins);
  stats.frames_accumulated = ytil.num_frames();
  ParallelFor(bins, [&](std::size_t f) {
    detail::FrequencyStats(ytil.frequency(f), s_hat, f, stats.phi[f], stats.z[f]);
  });
  return stats;
}

FilterBank SolveFilter(const BeamformStats& stats, double loading,
                       const ContextSpec& context) {
  if (!(loading >= 0.0)) throw ParameterError("loading must be non-negative");
  if (stats.phi.size() != stats.z.size()) throw DimensionError("statistics size mismatch");
  const std::size_t bins = stats.phi.size();
  FilterBank fb;
  fb.context = context;
  fb.weights.resize(bins);
  fb.loading_used.resize(bins);
  ParallelFor(bins, [&](std::size_t f) {
    fb.weights[f] = detail::SolveLoaded(stats.phi[f], stats.z[f], loading, f,
                                        &fb.loading_used[f]);
  });
  return fb;
}

Spectrogram ApplyFilter(const FilterBank& fb, const StackedSpectrogram& ytil,
                        const StftConfig& config, std::size_t signal_length) {
  if (fb.weights.size() != ytil.num_bins())
    throw DimensionError("filter bank and stacked mixture differ in bin count");
  if (config.num_bins() != ytil.num_bins())
    throw DimensionError("STFT config does not match stacked mixture");
  Spectrogram out(1, ytil.num_frames(), config, signal_length);
  ParallelFor(ytil.num_bins(), [&](std::size_t f) {
    detail::ApplyFrequency(ytil.frequency(f), fb.weights[f], out, f);
  });
  return out;
}

Spectrogram Mfmcwf(const MultichannelSpectrogram& y, const Spectrogram& s_hat,
                   const ContextSpec& ctx, double loading) {
  ValidateContext(ctx);
  if (!(loading >= 0.0)) throw ParameterError("loading must be non-negative");
  if (!y.all_finite()) throw ParameterError("mixture spectrogram contains non-finite values");
  CheckTargetGrid(y.num_frames(), y.num_bins(), s_hat);
  // Fused per-frequency route: avoids materializing the full stacked tensor.
  Spectrogram out(1, y.num_frames(), y.config(), y.signal_length());
  ParallelFor(y.num_bins(), [&](std::size_t f) {
    const auto a = detail::StackFrequency(y, ctx, f);
    Eigen::MatrixXcd phi;
    Eigen::VectorXcd z;
    detail::FrequencyStats(a, s_hat, f, phi, z);
    const auto w = detail::SolveLoaded(phi, z, loading, f, nullptr);
    detail::ApplyFrequency(a, w, out, f);
  });
  return out;
}

}  // namespace ineube
