// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// RIFF WAVE reading and writing. Reads PCM 16-bit and IEEE float 32-bit with
// any channel count; samples are returned in [-1, 1) for PCM input.

#ifndef INEUBE_WAV_HPP_
#define INEUBE_WAV_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>

#include "ineube/common.hpp"

namespace ineube {

enum class WavFormat { kPcm16, kFloat32 };

MultichannelWaveform ReadWav(std::istream& is);
MultichannelWaveform ReadWav(const std::filesystem::path& path);

// PCM16 output is clipped to [-1, 1] before quantization.
void WriteWav(std::ostream& os, const MultichannelWaveform& x,
              WavFormat format = WavFormat::kFloat32);
void WriteWav(const std::filesystem::path& path, const MultichannelWaveform& x,
              WavFormat format = WavFormat::kFloat32);

MultichannelWaveform MonoWaveform(std::span<const double> x, int sample_rate);

}  // namespace ineube

#endif  // INEUBE_WAV_HPP_
