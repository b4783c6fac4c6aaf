// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/estimate.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "ineube/beamform.hpp"
#include "ineube/linalg.hpp"

namespace ineube {

namespace {

constexpr std::array<char, 4> kModelMagic = {'N', 'B', 'R', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void PutU32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint64_t GetBytes(std::istream& is, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw IoError("truncated ridge model file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::uint32_t GetU32(std::istream& is) { return static_cast<std::uint32_t>(GetBytes(is, 4)); }
double GetF64(std::istream& is) { return std::bit_cast<double>(GetBytes(is, 8)); }

void CheckPair(const TrainingPair& pair, std::size_t channels, std::size_t bins) {
  if (!pair.features || !pair.target) throw ParameterError("null training pair");
  if (pair.features->num_channels() != channels || pair.features->num_bins() != bins)
    throw DimensionError("training features differ in shape");
  if (pair.target->num_channels() != 1 || !pair.target->same_grid(*pair.features))
    throw DimensionError("training target does not match its features");
}

}  // namespace

RidgeModel FitRidge(std::span<const TrainingPair> pairs, const ContextSpec& ctx,
                    double lambda) {
  if (pairs.empty()) throw ParameterError("empty training set");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  ValidateContext(ctx);
  const std::size_t channels = pairs.front().features->num_channels();
  const std::size_t bins = pairs.front().features->num_bins();
  for (const auto& pair : pairs) CheckPair(pair, channels, bins);

  RidgeModel model;
  model.context = ctx;
  model.in_channels = channels;
  model.lambda = lambda;
  model.rows.resize(bins);
  const auto dim = static_cast<Eigen::Index>(ctx.stacked_dim(channels));
  ParallelFor(bins, [&](std::size_t f) {
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(dim);
    Eigen::MatrixXcd phi_k;
    Eigen::VectorXcd z_k;
    for (const auto& pair : pairs) {
      const auto a = detail::StackFrequency(*pair.features, ctx, f);
      detail::FrequencyStats(a, *pair.target, f, phi_k, z_k);
      phi += phi_k;
      z += z_k;
    }
    phi.diagonal().array() += lambda;
    // M = w^H with w solving (Phi + lambda I) w = z.
    model.rows[f] = SolveHermitian(phi, z, f).adjoint();
  });
  return model;
}

RidgeModel FitRidge(std::span<const Scene> scenes, const ContextSpec& ctx, double lambda,
                    const StftConfig& cfg) {
  if (scenes.empty()) throw ParameterError("empty training set");
  std::vector<MultichannelSpectrogram> features(scenes.size());
  std::vector<Spectrogram> targets(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    features[i] = Analyze(scenes[i].mixture, cfg);
    targets[i] = Analyze(scenes[i].dry, cfg);
  }
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < scenes.size(); ++i) pairs.push_back({&features[i], &targets[i]});
  return FitRidge(pairs, ctx, lambda);
}

Spectrogram ApplyRidge(const RidgeModel& model, const MultichannelSpectrogram& y) {
  if (y.num_channels() != model.in_channels)
    throw DimensionError("ridge model expects " + std::to_string(model.in_channels) +
                         " input channels, got " + std::to_string(y.num_channels()));
  if (y.num_bins() != model.num_bins())
    throw DimensionError("ridge model bin count does not match input");
  Spectrogram out(1, y.num_frames(), y.config(), y.signal_length());
  ParallelFor(y.num_bins(), [&](std::size_t f) {
    const auto a = detail::StackFrequency(y, model.context, f);
    detail::ApplyFrequency(a, model.rows[f].adjoint(), out, f);
  });
  return out;
}

double RidgeResidual(const RidgeModel& model, std::span<const TrainingPair> pairs) {
  double total = 0.0;
  for (const auto& pair : pairs) {
    CheckPair(pair, model.in_channels, model.num_bins());
    const auto est = ApplyRidge(model, *pair.features);
    const auto& a = est.data();
    const auto& b = pair.target->data();
    for (std::size_t i = 0; i < a.size(); ++i) total += std::norm(a[i] - b[i]);
  }
  return total;
}

void SaveRidgeModel(const RidgeModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kModelMagic.data(), kModelMagic.size());
  PutU32(os, kModelVersion);
  PutU32(os, static_cast<std::uint32_t>(model.in_channels));
  PutU32(os, static_cast<std::uint32_t>(model.context.past));
  PutU32(os, static_cast<std::uint32_t>(model.context.future));
  PutU32(os, static_cast<std::uint32_t>(model.num_bins()));
  PutF64(os, model.lambda);
  for (const auto& row : model.rows) {
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      PutF64(os, row(i).real());
      PutF64(os, row(i).imag());
    }
  }
  if (!os) throw IoError("failed writing " + path.string());
}

RidgeModel LoadRidgeModel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kModelMagic) throw IoError(path.string() + " is not a ridge model file");
  const auto version = GetU32(is);
  if (version != kModelVersion)
    throw IoError("unsupported ridge model version " + std::to_string(version));
  RidgeModel model;
  model.in_channels = GetU32(is);
  model.context.past = static_cast<int>(GetU32(is));
  model.context.future = static_cast<int>(GetU32(is));
  const auto bins = GetU32(is);
  model.lambda = GetF64(is);
  const auto dim = static_cast<Eigen::Index>(model.in_dim());
  model.rows.assign(bins, Eigen::RowVectorXcd(dim));
  for (auto& row : model.rows) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = GetF64(is);
      const double im = GetF64(is);
      row(i) = Complex(re, im);
    }
  }
  return model;
}

Spectrogram EstimateOracle(const Scene& scene, const StftConfig& cfg) {
  if (scene.dry.empty()) throw ParameterError("scene has no dry source");
  return Analyze(scene.dry, cfg);
}

Spectrogram EstimateDegraded(const Scene& scene, int shift_samples, double noise_snr_db,
                             std::uint64_t seed, const StftConfig& cfg) {
  const auto n = static_cast<std::ptrdiff_t>(scene.dry.size());
  if (n == 0) throw ParameterError("scene has no dry source");
  if (std::abs(static_cast<std::ptrdiff_t>(shift_samples)) >= n)
    throw ParameterError("shift must be smaller than the signal length");
  if (std::isnan(noise_snr_db) || noise_snr_db == -std::numeric_limits<double>::infinity())
    throw ParameterError("noise_snr_db must be finite or +inf");

  Signal x(scene.dry.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t src = ((i - shift_samples) % n + n) % n;
    x[i] = scene.dry[src];
  }
  if (std::isfinite(noise_snr_db)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Signal noise(x.size());
    for (auto& v : noise) v = gauss(rng);
    double ps = 0.0, pn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ps += x[i] * x[i];
      pn += noise[i] * noise[i];
    }
    const double g = std::sqrt(ps / (pn * std::pow(10.0, noise_snr_db / 10.0)));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += g * noise[i];
  }
  return Analyze(x, cfg);
}

Spectrogram EstimateMagnitudeMask(const MultichannelSpectrogram& y, const Spectrogram& s,
                                  std::size_t ref_channel, double max_mask) {
  if (ref_channel >= y.num_channels()) throw ParameterError("ref_channel out of range");
  if (s.num_channels() != 1 || !s.same_grid(y))
    throw DimensionError("target and mixture differ in (T, F)");
  if (!(max_mask > 0.0)) throw ParameterError("max_mask must be positive");
  const auto ref = y.channel(ref_channel);
  double peak = 0.0;
  for (const auto& v : ref) peak = std::max(peak, std::abs(v));
  const double eps = 1e-8 * peak;
  Spectrogram out(1, y.num_frames(), y.config(), y.signal_length());
  auto dst = out.channel(0);
  const auto target = s.channel(0);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double mag = std::abs(ref[i]);
    if (mag == 0.0 && eps == 0.0) continue;
    const double mask = std::min(std::abs(target[i]) / (mag + eps), max_mask);
    dst[i] = mask * ref[i];
  }
  return out;
}

Spectrogram RunEstimator(const EstimatorKind& kind, const EstimatorInput& in,
                         const StftConfig& cfg) {
  if (!in.input) throw ParameterError("estimator input missing");
  const auto need_scene = [&]() -> const Scene& {
    if (!in.scene) throw ParameterError("oracle estimators need the scene's dry source");
    return *in.scene;
  };
  Spectrogram out = std::visit(
      [&](const auto& est) -> Spectrogram {
        using T = std::decay_t<decltype(est)>;
        if constexpr (std::is_same_v<T, OracleEstimator>) {
          return EstimateOracle(need_scene(), cfg);
        } else if constexpr (std::is_same_v<T, DegradedOracleEstimator>) {
          const Scene& scene = need_scene();
          const std::uint64_t seed = est.seed + 0x9e3779b97f4a7c15ULL * scene.seed;
          return EstimateDegraded(scene, est.shift_samples, est.noise_snr_db, seed, cfg);
        } else if constexpr (std::is_same_v<T, MagnitudeMaskEstimator>) {
          return EstimateMagnitudeMask(*in.input, EstimateOracle(need_scene(), cfg),
                                       est.ref_channel, est.max_mask);
        } else if constexpr (std::is_same_v<T, RidgeEstimator>) {
          if (!est.model) throw ParameterError("ridge estimator has no model");
          return ApplyRidge(*est.model, *in.input);
        } else {
          if (!in.refiner) throw ParameterError("passthrough is only valid as a refiner");
          return ExtractChannel(*in.input, in.mixture_channels);
        }
      },
      kind);
  if (!out.same_grid(*in.input))
    throw DimensionError("estimate does not match the mixture frame grid");
  out.set_signal_length(in.input->signal_length());
  return out;
}

}  // namespace ineube
