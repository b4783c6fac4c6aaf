// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <memory>
#include <limits>

namespace ineube {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return v;
}

// from_chars for double does not accept "inf" spellings on every libstdc++;
// strtod does.
double ParseReal(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return v;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

EstimatorName ParseEstimatorName(const std::string& key, const std::string& text) {
  if (text == "oracle") return EstimatorName::kOracle;
  if (text == "degraded") return EstimatorName::kDegraded;
  if (text == "mask") return EstimatorName::kMask;
  if (text == "ridge") return EstimatorName::kRidge;
  if (text == "passthrough") return EstimatorName::kPassthrough;
  throw ConfigError("unknown estimator for " + key + ": '" + text + "'");
}

EstimatorKind MakeEstimator(EstimatorName name, const RunConfig& cfg,
                            const std::filesystem::path& model, std::uint64_t salt) {
  switch (name) {
    case EstimatorName::kOracle:
      return OracleEstimator{};
    case EstimatorName::kDegraded: {
      DegradedOracleEstimator est = cfg.degraded;
      est.seed = cfg.pipeline.seed + salt;
      return est;
    }
    case EstimatorName::kMask:
      return cfg.mask;
    case EstimatorName::kRidge:
      if (model.empty()) throw ConfigError("ridge estimator needs a model file");
      return RidgeEstimator{std::make_shared<const RidgeModel>(LoadRidgeModel(model))};
    case EstimatorName::kPassthrough:
      return BeamformedPassthrough{};
  }
  throw ConfigError("unknown estimator");
}

}  // namespace

KeyValues ParseKeyValues(std::istream& is) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValues ReadKeyValues(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return ParseKeyValues(is);
}

ContextSpec ParseContext(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("context must be l,r: '" + text + "'");
  ContextSpec ctx;
  ctx.past = ParseNumber<int>("context", Trim(text.substr(0, comma)));
  ctx.future = ParseNumber<int>("context", Trim(text.substr(comma + 1)));
  ValidateContext(ctx);
  return ctx;
}

void ApplyKeyValues(const KeyValues& kv, RunConfig& cfg) {
  auto& p = cfg.pipeline;
  auto& s = cfg.scenes;
  auto& degraded = cfg.degraded;
  auto& mask = cfg.mask;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"sample_rate", [&](auto& k, auto& v) { p.stft.sample_rate = ParseNumber<int>(k, v); }},
      {"win_len", [&](auto& k, auto& v) { p.stft.win_len = ParseNumber<int>(k, v); }},
      {"hop", [&](auto& k, auto& v) { p.stft.hop = ParseNumber<int>(k, v); }},
      {"fft_size", [&](auto& k, auto& v) { p.stft.fft_size = ParseNumber<int>(k, v); }},
      {"ctx", [&](auto&, auto& v) { p.ctx = ParseContext(v); }},
      {"loading", [&](auto& k, auto& v) { p.loading = ParseReal(k, v); }},
      {"iterations", [&](auto& k, auto& v) { p.iterations = ParseNumber<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { p.seed = ParseNumber<std::uint64_t>(k, v); }},
      {"estimator1", [&](auto& k, auto& v) { cfg.estimator1 = ParseEstimatorName(k, v); }},
      {"refiner2", [&](auto& k, auto& v) { cfg.refiner2 = ParseEstimatorName(k, v); }},
      {"degraded_shift",
       [&](auto& k, auto& v) { degraded.shift_samples = ParseNumber<int>(k, v); }},
      {"degraded_snr_db", [&](auto& k, auto& v) { degraded.noise_snr_db = ParseReal(k, v); }},
      {"mask_ref_channel",
       [&](auto& k, auto& v) { mask.ref_channel = ParseNumber<std::size_t>(k, v); }},
      {"mask_max", [&](auto& k, auto& v) { mask.max_mask = ParseReal(k, v); }},
      {"ridge1_model", [&](auto&, auto& v) { cfg.ridge1_model = v; }},
      {"ridge2_model", [&](auto&, auto& v) { cfg.ridge2_model = v; }},
      {"ridge_ctx", [&](auto&, auto& v) { cfg.ridge_ctx = ParseContext(v); }},
      {"ridge_lambda", [&](auto& k, auto& v) { cfg.ridge_lambda = ParseReal(k, v); }},
      {"num_scenes", [&](auto& k, auto& v) { s.num_scenes = ParseNumber<int>(k, v); }},
      {"duration_s", [&](auto& k, auto& v) { s.duration_s = ParseReal(k, v); }},
      {"n_channels", [&](auto& k, auto& v) { s.n_channels = ParseNumber<int>(k, v); }},
      {"delay_min", [&](auto& k, auto& v) { s.delay_min = ParseNumber<int>(k, v); }},
      {"delay_max", [&](auto& k, auto& v) { s.delay_max = ParseNumber<int>(k, v); }},
      {"channel_spread", [&](auto& k, auto& v) { s.channel_spread = ParseNumber<int>(k, v); }},
      {"rt60_s", [&](auto& k, auto& v) { s.rt60_s = ParseReal(k, v); }},
      {"n_reflections", [&](auto& k, auto& v) { s.n_reflections = ParseNumber<int>(k, v); }},
      {"reflection_level", [&](auto& k, auto& v) { s.reflection_level = ParseReal(k, v); }},
      {"snr_lo", [&](auto& k, auto& v) { s.snr.lo = ParseReal(k, v); }},
      {"snr_hi", [&](auto& k, auto& v) { s.snr.hi = ParseReal(k, v); }},
      {"noiseless", [&](auto& k, auto& v) { s.noiseless = ParseBool(k, v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  if (s.delay_min < 0 || s.delay_max < s.delay_min)
    throw ConfigError("delay range must satisfy 0 <= delay_min <= delay_max");
  if (s.snr.hi < s.snr.lo) throw ConfigError("snr_hi must not be below snr_lo");
}

void ResolveEstimators(RunConfig& cfg) {
  if (cfg.estimator1 == EstimatorName::kPassthrough)
    throw ConfigError("passthrough cannot be the first estimator");
  EstimatorKind first = MakeEstimator(cfg.estimator1, cfg, cfg.ridge1_model, 0);
  EstimatorKind second = MakeEstimator(cfg.refiner2, cfg, cfg.ridge2_model, 1);
  cfg.pipeline.estimator1 = std::move(first);
  cfg.pipeline.refiner2 = std::move(second);
  ValidatePipelineConfig(cfg.pipeline);
}

}  // namespace ineube
