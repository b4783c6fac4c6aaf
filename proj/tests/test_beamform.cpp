// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <random>

#include "ineube/beamform.hpp"
#include "ineube/linalg.hpp"
#include "ineube/metrics.hpp"
#include "ineube/simulate.hpp"
#include "oracles.hpp"

namespace ineube {
namespace {

MultichannelSpectrogram RandomSpec(std::size_t p, std::size_t t, std::size_t f,
                                   std::uint64_t seed) {
  StftConfig cfg{16000, 2 * (static_cast<int>(f) - 1), static_cast<int>(f) - 1,
                 2 * (static_cast<int>(f) - 1)};
  MultichannelSpectrogram x(p, t, cfg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : x.data()) v = Complex(g(rng), g(rng));
  return x;
}

// Objective plus ridge term, evaluated directly from Y and S.
double Objective(const MultichannelSpectrogram& y, const Spectrogram& s, const ContextSpec& ctx,
                 std::size_t f, const Eigen::VectorXcd& w, double delta) {
  const std::size_t p = y.num_channels();
  double j = 0.0;
  for (std::size_t t = 0; t < y.num_frames(); ++t) {
    Complex est = 0.0;
    for (int k = 0; k < ctx.num_frames(); ++k) {
      const auto src = static_cast<std::ptrdiff_t>(t) - ctx.past + k;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(y.num_frames())) continue;
      for (std::size_t c = 0; c < p; ++c)
        est += std::conj(w(k * p + c)) * y(c, static_cast<std::size_t>(src), f);
    }
    j += std::norm(s(0, t, f) - est);
  }
  return j + delta * w.squaredNorm();
}

TEST(Stack, ZeroContextIsReshape) {
  const auto y = RandomSpec(3, 6, 5, 1);
  const auto st = StackContext(y, {0, 0});
  ASSERT_EQ(st.dim(), 3u);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t f = 0; f < 5; ++f)
      for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(st(t, f, p), y(p, t, f));
}

TEST(Stack, EdgeFramesAreZeroPadded) {
  const auto y = RandomSpec(1, 3, 3, 2);
  const auto st = StackContext(y, {1, 1});
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_EQ(st(0, f, 0), Complex(0.0));
    EXPECT_EQ(st(0, f, 1), y(0, 0, f));
    EXPECT_EQ(st(0, f, 2), y(0, 1, f));
    EXPECT_EQ(st(2, f, 2), Complex(0.0));
  }
}

TEST(Stack, BlockOrderIsOldestFirst) {
  const auto y = RandomSpec(2, 9, 4, 3);
  const auto st = StackContext(y, {2, 1});
  ASSERT_EQ(st.dim(), 8u);
  for (std::size_t t = 2; t + 1 < 9; ++t)
    for (std::size_t f = 0; f < 4; ++f)
      for (std::size_t p = 0; p < 2; ++p) {
        EXPECT_EQ(st(t, f, p), y(p, t - 2, f));
        EXPECT_EQ(st(t, f, 2 * 2 + p), y(p, t, f));
        EXPECT_EQ(st(t, f, 3 * 2 + p), y(p, t + 1, f));
      }
}

TEST(Stack, EqualTotalFramesGiveEqualDimension) {
  const auto y = RandomSpec(4, 10, 3, 4);
  EXPECT_EQ(StackContext(y, {7, 0}).dim(), StackContext(y, {4, 3}).dim());
  EXPECT_EQ(StackContext(y, {4, 3}).dim(), 32u);
  EXPECT_THROW(StackContext(y, {-1, 0}), ParameterError);
}

TEST(Stats, HandComputedTwoFrameCase) {
  StftConfig cfg{16000, 2, 1, 2};
  MultichannelSpectrogram y(1, 2, cfg);
  Spectrogram s(1, 2, cfg);
  for (std::size_t f = 0; f < 2; ++f) {
    y(0, 0, f) = 1.0;
    y(0, 1, f) = Complex(0.0, 1.0);
    s(0, 0, f) = 1.0;
    s(0, 1, f) = 1.0;
  }
  const auto stats = AccumulateStats(StackContext(y, {0, 0}), s);
  EXPECT_NEAR(std::abs(stats.phi[0](0, 0) - Complex(2.0, 0.0)), 0.0, 1e-15);
  // z = sum_t Y(t) conj(S(t)) = 1 + j.
  EXPECT_NEAR(std::abs(stats.z[0](0) - Complex(1.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(stats.frames_accumulated, 2u);
}

TEST(Stats, ZeroTargetGivesZeroCrossTerm) {
  const auto y = RandomSpec(2, 8, 4, 5);
  Spectrogram s(1, 8, y.config());
  const auto stats = AccumulateStats(StackContext(y, {1, 1}), s);
  for (const auto& z : stats.z) EXPECT_EQ(z.norm(), 0.0);
}

TEST(Stats, CovarianceIsPositiveSemidefinite) {
  const auto y = RandomSpec(3, 5, 4, 6);  // T < D: singular Gram matrices
  const auto s = RandomSpec(1, 5, 4, 7);
  const auto stats = AccumulateStats(StackContext(y, {2, 1}), s);
  for (const auto& phi : stats.phi) {
    EXPECT_LT((phi - phi.adjoint()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
  }
}

TEST(Stats, RejectsMismatchedTarget) {
  const auto y = RandomSpec(2, 8, 4, 8);
  const auto s = RandomSpec(1, 7, 4, 9);
  EXPECT_THROW(AccumulateStats(StackContext(y, {0, 0}), s), DimensionError);
  const auto two = RandomSpec(2, 8, 4, 9);
  EXPECT_THROW(AccumulateStats(StackContext(y, {0, 0}), two), DimensionError);
}

TEST(Solve, TargetEqualToMixtureGivesUnitFilter) {
  const auto y = RandomSpec(1, 20, 6, 10);
  const auto fb = SolveFilter(AccumulateStats(StackContext(y, {0, 0}), y), 0.0);
  for (const auto& w : fb.weights) EXPECT_NEAR(std::abs(w(0) - 1.0), 0.0, 1e-12);
}

TEST(Solve, ZeroCrossTermGivesZeroFilter) {
  BeamformStats stats;
  stats.phi = {Eigen::MatrixXcd::Identity(3, 3)};
  stats.z = {Eigen::VectorXcd::Zero(3)};
  EXPECT_EQ(SolveFilter(stats, 1e-4).weights[0].norm(), 0.0);
}

TEST(Solve, ResidualOfLoadedSystem) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd b(4, 6);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = Complex(g(rng), g(rng));
    BeamformStats stats;
    stats.phi = {b * b.adjoint()};
    Eigen::VectorXcd z(4);
    for (Eigen::Index i = 0; i < 4; ++i) z(i) = Complex(g(rng), g(rng));
    stats.z = {z};
    const auto fb = SolveFilter(stats, 1e-4);
    const double delta = fb.loading_used[0];
    EXPECT_NEAR(delta, 1e-4 * stats.phi[0].trace().real() / 4.0, 1e-15);
    const Eigen::MatrixXcd loaded = stats.phi[0] + delta * Eigen::MatrixXcd::Identity(4, 4);
    EXPECT_LT((loaded * fb.weights[0] - z).norm() / z.norm(), 1e-10);
  }
}

TEST(Solve, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + rng() % 4;
    const int past = static_cast<int>(rng() % 2), future = static_cast<int>(rng() % 2);
    const ContextSpec ctx{past, future};
    const std::size_t frames = 4 + rng() % 13;
    const auto y = RandomSpec(p, frames, 3, rng());
    const auto s = RandomSpec(1, frames, 3, rng());
    const auto fb = SolveFilter(AccumulateStats(StackContext(y, ctx), s), 1e-3);
    const std::size_t d = ctx.stacked_dim(p);
    for (std::size_t f = 0; f < 3; ++f) {
      // Oracle: build stacked vectors by hand and solve the loaded system.
      oracle::CMatrix phi(d, std::vector<oracle::cd>(d, 0.0));
      std::vector<oracle::cd> z(d, 0.0);
      for (std::size_t t = 0; t < frames; ++t) {
        std::vector<oracle::cd> v(d, 0.0);
        for (int k = 0; k < ctx.num_frames(); ++k) {
          const long src = static_cast<long>(t) - past + k;
          if (src < 0 || src >= static_cast<long>(frames)) continue;
          for (std::size_t c = 0; c < p; ++c) v[k * p + c] = y(c, src, f);
        }
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) phi[i][j] += v[i] * std::conj(v[j]);
          z[i] += v[i] * std::conj(s(0, t, f));
        }
      }
      double tr = 0.0;
      for (std::size_t i = 0; i < d; ++i) tr += phi[i][i].real();
      for (std::size_t i = 0; i < d; ++i) phi[i][i] += 1e-3 * tr / static_cast<double>(d);
      const auto ref = oracle::Solve(phi, z);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        num += std::norm(fb.weights[f](i) - ref[i]);
        den += std::norm(ref[i]);
      }
      EXPECT_LT(std::sqrt(num / den), 1e-8) << "trial " << trial;
    }
  }
}

TEST(Solve, PerturbationNeverImprovesObjective) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ContextSpec ctx{1, 1};
    const auto y = RandomSpec(2, 12, 3, rng());
    const auto s = RandomSpec(1, 12, 3, rng());
    const auto fb = SolveFilter(AccumulateStats(StackContext(y, ctx), s), 1e-4);
    for (std::size_t f = 0; f < 3; ++f) {
      const double base = Objective(y, s, ctx, f, fb.weights[f], fb.loading_used[f]);
      for (int k = 0; k < 50; ++k) {
        Eigen::VectorXcd dw(fb.weights[f].size());
        for (Eigen::Index i = 0; i < dw.size(); ++i) dw(i) = Complex(g(rng), g(rng));
        dw *= 1e-3 * std::pow(10.0, -static_cast<double>(k % 4));
        const double j = Objective(y, s, ctx, f, fb.weights[f] + dw, fb.loading_used[f]);
        EXPECT_GE(j, base * (1.0 - 1e-12));
      }
    }
  }
}

TEST(Solve, NanStatisticsReportFrequency) {
  BeamformStats stats;
  stats.phi = {Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Identity(2, 2)};
  stats.phi[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
  stats.z = {Eigen::VectorXcd::Ones(2), Eigen::VectorXcd::Ones(2)};
  try {
    SolveFilter(stats, 1e-4);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.frequency(), 1u);
  }
}

TEST(Solve, SingularStatisticsWithoutLoadingStillSolve) {
  const auto y = RandomSpec(4, 3, 3, 14);  // T = 3 < D = 4
  const auto s = RandomSpec(1, 3, 3, 15);
  const auto fb = SolveFilter(AccumulateStats(StackContext(y, {0, 0}), s), 0.0);
  for (const auto& w : fb.weights) EXPECT_TRUE(w.allFinite());
}

TEST(Apply, ZeroWeightsGiveZeroOutput) {
  const auto y = RandomSpec(2, 6, 4, 16);
  const auto st = StackContext(y, {1, 0});
  FilterBank fb;
  fb.weights.assign(4, Eigen::VectorXcd::Zero(4));
  const auto out = ApplyFilter(fb, st, y.config());
  for (const auto& v : out.data()) EXPECT_EQ(v, Complex(0.0));
}

TEST(Apply, UnitWeightPassesChannelThrough) {
  const auto y = RandomSpec(1, 6, 4, 17);
  FilterBank fb;
  fb.weights.assign(4, Eigen::VectorXcd::Ones(1));
  const auto out = ApplyFilter(fb, StackContext(y, {0, 0}), y.config());
  for (std::size_t i = 0; i < out.data().size(); ++i) EXPECT_EQ(out.data()[i], y.data()[i]);
}

TEST(Apply, ScalingTargetScalesOutput) {
  const auto y = RandomSpec(3, 20, 4, 18);
  auto s = RandomSpec(1, 20, 4, 19);
  const auto st = StackContext(y, {2, 1});
  const auto base = ApplyFilter(SolveFilter(AccumulateStats(st, s), 1e-4), st, y.config());
  const Complex beta(-1.7, 0.4);
  for (auto& v : s.data()) v *= beta;
  const auto scaled = ApplyFilter(SolveFilter(AccumulateStats(st, s), 1e-4), st, y.config());
  for (std::size_t i = 0; i < base.data().size(); ++i)
    EXPECT_LT(std::abs(scaled.data()[i] - beta * base.data()[i]),
              1e-10 * std::abs(beta * base.data()[i]) + 1e-14);
}

TEST(Apply, RejectsWrongDimension) {
  const auto y = RandomSpec(2, 6, 4, 20);
  FilterBank fb;
  fb.weights.assign(4, Eigen::VectorXcd::Ones(3));
  EXPECT_THROW(ApplyFilter(fb, StackContext(y, {0, 0}), y.config()), DimensionError);
  fb.weights.assign(3, Eigen::VectorXcd::Ones(2));
  EXPECT_THROW(ApplyFilter(fb, StackContext(y, {0, 0}), y.config()), DimensionError);
}

TEST(Mfmcwf, FusedRouteMatchesStagedRouteBitForBit) {
  const auto y = RandomSpec(3, 25, 9, 21);
  const auto s = RandomSpec(1, 25, 9, 22);
  for (ContextSpec ctx : {ContextSpec{0, 0}, ContextSpec{4, 3}, ContextSpec{5, 2}}) {
    const auto st = StackContext(y, ctx);
    const auto staged = ApplyFilter(SolveFilter(AccumulateStats(st, s), 1e-4), st, y.config());
    const auto fused = Mfmcwf(y, s, ctx, 1e-4);
    EXPECT_EQ(fused.data(), staged.data());
  }
}

TEST(Mfmcwf, RejectsNonFiniteMixture) {
  auto y = RandomSpec(2, 6, 4, 23);
  const auto s = RandomSpec(1, 6, 4, 24);
  y(1, 2, 3) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_THROW(Mfmcwf(y, s), ParameterError);
}

// A noiseless single-source scene whose target is the reference channel
// shifted by k frames.
class FrameShift : public ::testing::Test {
 protected:
  void SetUp() override {
    dry_ = SpeechLikeSignal(32000, 16000, 5);
    RirSpec rir;
    rir.n_channels = 4;
    rir.n_reflections = 0;
    rir.direct_delay_samples = {20, 23, 27, 31};
    MultichannelWaveform sources;
    y_wave_ = ConvolveMultichannel(dry_, SynthRir(rir, cfg_));
    y_ = Analyze(y_wave_, cfg_);
  }

  double Run(int k, const ContextSpec& ctx) const {
    Spectrogram target(1, y_.num_frames(), cfg_, y_.signal_length());
    for (std::size_t t = static_cast<std::size_t>(k); t < y_.num_frames(); ++t)
      for (std::size_t f = 0; f < y_.num_bins(); ++f) target(0, t, f) = y_(0, t - k, f);
    const Signal want = SynthesizeSignal(target);
    return SiSdr(SynthesizeSignal(Mfmcwf(y_, target, ctx)), want);
  }

  StftConfig cfg_;
  Signal dry_;
  MultichannelWaveform y_wave_;
  MultichannelSpectrogram y_;
};

TEST_F(FrameShift, MultiFrameFilterCompensatesShiftsWithinContext) {
  for (int k = 0; k <= 4; ++k) EXPECT_GT(Run(k, {4, 3}), 40.0) << "k=" << k;
}

TEST_F(FrameShift, SingleFrameFilterCannotCompensateMultiHopShifts) {
  // A one-hop shift is partly recoverable by a single frame because
  // consecutive frames overlap by 75%; from two hops on it is not.
  for (int k = 2; k <= 4; ++k) EXPECT_LT(Run(k, {0, 0}), 10.0) << "k=" << k;
}

}  // namespace
}  // namespace ineube
