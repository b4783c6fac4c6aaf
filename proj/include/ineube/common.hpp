// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INEUBE_COMMON_HPP_
#define INEUBE_COMMON_HPP_

#include <algorithm>
#include <complex>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ineube {

using Complex = std::complex<double>;

// A single real-valued channel.
using Signal = std::vector<double>;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InputTooShortError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t frequency)
      : Error(what + " (frequency bin " + std::to_string(frequency) + ")"),
        frequency_(frequency) {}
  std::size_t frequency() const { return frequency_; }

 private:
  std::size_t frequency_;
};

// P real channels sharing one sample rate.
struct MultichannelWaveform {
  int sample_rate = 16000;
  std::vector<Signal> channels;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels.front().size();
  }
};

// Past (l) and future (r) frame counts used when stacking STFT frames.
struct ContextSpec {
  int past = 0;
  int future = 0;

  int num_frames() const { return past + 1 + future; }
  std::size_t stacked_dim(std::size_t num_channels) const {
    return static_cast<std::size_t>(num_frames()) * num_channels;
  }
  bool operator==(const ContextSpec&) const = default;
};

inline void ValidateContext(const ContextSpec& ctx) {
  if (ctx.past < 0 || ctx.future < 0)
    throw ParameterError("context frame counts must be non-negative");
}

// Runs fn(i) for i in [0, n) across worker threads. Each index is handled by
// exactly one call, so results written to per-index slots are independent of
// scheduling.
template <typename Fn>
void ParallelFor(std::size_t n, Fn&& fn) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ineube

#endif  // INEUBE_COMMON_HPP_
