// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Multi-frame multi-channel Wiener filter (mfMCWF).
//
// For every frequency f the filter w(f) minimizes
//     sum_t | S_hat(t,f) - w(f)^H Ytil(t,f) |^2
// where Ytil(t,f) stacks the P-channel mixture frames t-l .. t+r. The closed
// form is w = Phi^-1 z with Phi = sum_t Ytil Ytil^H and z = sum_t Ytil S_hat^*.
// Statistics are sums over the whole utterance, so the filter is
// time-invariant.

#ifndef INEUBE_BEAMFORM_HPP_
#define INEUBE_BEAMFORM_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ineube/common.hpp"
#include "ineube/stft.hpp"

namespace ineube {

inline constexpr double kDefaultLoading = 1e-4;
inline constexpr ContextSpec kDefaultContext{4, 3};

// Context-stacked mixture. Row (t, f) is
// [Y(t-l,f)^T, ..., Y(t,f)^T, ..., Y(t+r,f)^T]^T with zero blocks for frames
// outside [0, T).
class StackedSpectrogram {
 public:
  StackedSpectrogram(std::size_t frames, std::size_t bins, std::size_t channels,
                     const ContextSpec& context);

  std::size_t num_frames() const { return frames_; }
  std::size_t num_bins() const { return bins_; }
  std::size_t num_channels() const { return channels_; }
  std::size_t dim() const { return dim_; }
  const ContextSpec& context() const { return context_; }

  Complex& operator()(std::size_t t, std::size_t f, std::size_t d) {
    return data_[(f * frames_ + t) * dim_ + d];
  }
  const Complex& operator()(std::size_t t, std::size_t f, std::size_t d) const {
    return data_[(f * frames_ + t) * dim_ + d];
  }

  // The T x D matrix of stacked rows at frequency f.
  using RowMajorMatrix =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajorMatrix> frequency(std::size_t f) const {
    return {data_.data() + f * frames_ * dim_, static_cast<Eigen::Index>(frames_),
            static_cast<Eigen::Index>(dim_)};
  }

 private:
  std::size_t frames_;
  std::size_t bins_;
  std::size_t channels_;
  std::size_t dim_;
  ContextSpec context_;
  std::vector<Complex> data_;
};

struct BeamformStats {
  std::vector<Eigen::MatrixXcd> phi;
  std::vector<Eigen::VectorXcd> z;
  std::size_t frames_accumulated = 0;
};

struct FilterBank {
  std::vector<Eigen::VectorXcd> weights;
  ContextSpec context;
  std::vector<double> loading_used;

  std::size_t dim() const { return weights.empty() ? 0 : weights.front().size(); }
};

// Per-frequency kernels shared by the staged API above, the fused Mfmcwf path
// and the ridge mapper. Using the same kernels keeps the routes bit-identical.
namespace detail {

using RowMajorMatrix = StackedSpectrogram::RowMajorMatrix;
using MatrixRef = Eigen::Ref<const RowMajorMatrix>;

// T x D stacked rows of y at frequency f.
RowMajorMatrix StackFrequency(const MultichannelSpectrogram& y, const ContextSpec& ctx,
                              std::size_t f);
// Phi = A^T conj(A) (Hermitian-symmetrized), z = A^T conj(s).
void FrequencyStats(const MatrixRef& a, const Spectrogram& s_hat, std::size_t f,
                    Eigen::MatrixXcd& phi, Eigen::VectorXcd& z);
// Solve with trace-relative loading; writes the absolute loading to *delta.
Eigen::VectorXcd SolveLoaded(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& z,
                             double loading, std::size_t f, double* delta);
// out(0, t, f) = w^H A(t, :)^T.
void ApplyFrequency(const MatrixRef& a, const Eigen::VectorXcd& w, Spectrogram& out,
                    std::size_t f);

}  // namespace detail

StackedSpectrogram StackContext(const MultichannelSpectrogram& y, const ContextSpec& ctx);

// s_hat must be single-channel on the same (T, F) grid as the stacked input.
BeamformStats AccumulateStats(const StackedSpectrogram& ytil, const Spectrogram& s_hat);

// w(f) = (Phi(f) + delta(f) I)^-1 z(f), delta(f) = loading * trace(Phi(f)) / D.
FilterBank SolveFilter(const BeamformStats& stats, double loading,
                       const ContextSpec& context = {});

// S(t,f) = w(f)^H Ytil(t,f).
Spectrogram ApplyFilter(const FilterBank& fb, const StackedSpectrogram& ytil,
                        const StftConfig& config, std::size_t signal_length = 0);

Spectrogram Mfmcwf(const MultichannelSpectrogram& y, const Spectrogram& s_hat,
                   const ContextSpec& ctx = kDefaultContext,
                   double loading = kDefaultLoading);

}  // namespace ineube

#endif  // INEUBE_BEAMFORM_HPP_
