// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/scene_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ineube/config.hpp"
#include "ineube/wav.hpp"

namespace ineube {

namespace {

namespace fs = std::filesystem;

std::string Real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string IntList(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw IoError("bad integer list in scene metadata: '" + text + "'");
    }
  }
  return out;
}

const std::string& Get(const KeyValues& kv, const std::string& key, const fs::path& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw IoError(where.string() + ": missing key '" + key + "'");
  return it->second;
}

double GetReal(const KeyValues& kv, const std::string& key, const fs::path& where) {
  const std::string& v = Get(kv, key, where);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw IoError(where.string() + ": bad value for '" + key + "'");
  }
}

}  // namespace

void WriteSceneDir(const Scene& scene, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const int fs_hz = scene.mixture.sample_rate;
  WriteWav(dir / "dry.wav", MonoWaveform(scene.dry, fs_hz));
  WriteWav(dir / "noise.wav", MonoWaveform(scene.noise_dry, fs_hz));
  WriteWav(dir / "mixture.wav", scene.mixture);

  std::ofstream os(dir / "meta.txt");
  if (!os) throw IoError("cannot write " + (dir / "meta.txt").string());
  os << "id=" << scene.id << '\n';
  os << "seed=" << scene.seed << '\n';
  os << "# snr_db is a speech-to-noise power ratio in dB over the reverberant images,\n";
  os << "# not an absolute dBFS level.\n";
  os << "snr_db=" << Real(scene.snr_db) << '\n';
  os << "sample_rate=" << fs_hz << '\n';
  os << "norm_gain=" << Real(scene.norm_gain) << '\n';
  os << "dry_norm_gain=" << Real(scene.dry_norm_gain) << '\n';
  os << "noise_gain=" << Real(scene.noise_gain) << '\n';
  os << "speech_delays=" << IntList(scene.speech_delays) << '\n';
  os << "noise_delays=" << IntList(scene.noise_delays) << '\n';
  if (!os) throw IoError("failed writing " + (dir / "meta.txt").string());
}

Scene ReadSceneDir(const fs::path& dir) {
  const fs::path meta = dir / "meta.txt";
  const KeyValues kv = ReadKeyValues(meta);
  Scene scene;
  scene.id = Get(kv, "id", meta);
  try {
    scene.seed = std::stoull(Get(kv, "seed", meta));
  } catch (const std::logic_error&) {
    throw IoError(meta.string() + ": bad value for 'seed'");
  }
  scene.snr_db = GetReal(kv, "snr_db", meta);
  scene.norm_gain = GetReal(kv, "norm_gain", meta);
  scene.dry_norm_gain = GetReal(kv, "dry_norm_gain", meta);
  scene.noise_gain = GetReal(kv, "noise_gain", meta);
  scene.speech_delays = ParseIntList(Get(kv, "speech_delays", meta));
  scene.noise_delays = ParseIntList(Get(kv, "noise_delays", meta));

  scene.mixture = ReadWav(dir / "mixture.wav");
  const auto dry = ReadWav(dir / "dry.wav");
  if (dry.num_channels() != 1) throw IoError((dir / "dry.wav").string() + " must be mono");
  scene.dry = dry.channels[0];
  if (fs::exists(dir / "noise.wav")) {
    const auto noise = ReadWav(dir / "noise.wav");
    if (noise.num_channels() == 1) scene.noise_dry = noise.channels[0];
  }
  if (dry.sample_rate != scene.mixture.sample_rate)
    throw IoError(dir.string() + ": dry and mixture sample rates differ");
  if (scene.dry.size() != scene.mixture.num_samples())
    throw IoError(dir.string() + ": dry and mixture lengths differ");
  return scene;
}

void WriteSceneSet(std::span<const Scene> scenes, const fs::path& dir) {
  for (const auto& scene : scenes) WriteSceneDir(scene, dir / scene.id);
}

std::vector<fs::path> ListSceneDirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  if (fs::exists(dir / "meta.txt")) return {dir};
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "meta.txt"))
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no scenes found under " + dir.string());
  return out;
}

std::vector<Scene> ReadSceneSet(const fs::path& dir) {
  std::vector<Scene> scenes;
  for (const auto& d : ListSceneDirs(dir)) scenes.push_back(ReadSceneDir(d));
  return scenes;
}

}  // namespace ineube
