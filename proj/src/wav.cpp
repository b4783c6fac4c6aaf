// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace ineube {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

std::uint32_t Le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t Le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void Put16(std::ostream& os, std::uint16_t v) {
  os.put(static_cast<char>(v & 0xff));
  os.put(static_cast<char>(v >> 8));
}

void Put32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ReadExact(std::istream& is, unsigned char* dst, std::size_t n, const char* what) {
  is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw IoError(std::string("truncated WAV file (") + what + ")");
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

MultichannelWaveform ReadWav(std::istream& is) {
  unsigned char hdr[12];
  ReadExact(is, hdr, 12, "header");
  if (std::memcmp(hdr, "RIFF", 4) != 0 || std::memcmp(hdr + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF WAVE file");

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<unsigned char> payload;
  bool have_data = false;
  while (!have_data) {
    unsigned char ch[8];
    ReadExact(is, ch, 8, "chunk header");
    const std::uint32_t size = Le32(ch + 4);
    if (std::memcmp(ch, "fmt ", 4) == 0) {
      if (size < 16) throw IoError("fmt chunk too small");
      std::vector<unsigned char> body(size);
      ReadExact(is, body.data(), size, "fmt chunk");
      fmt.format = Le16(&body[0]);
      fmt.channels = Le16(&body[2]);
      fmt.sample_rate = Le32(&body[4]);
      fmt.bits = Le16(&body[14]);
      // WAVE_FORMAT_EXTENSIBLE carries the real format code in the subformat GUID.
      if (fmt.format == kFormatExtensible && size >= 26) fmt.format = Le16(&body[24]);
      have_fmt = true;
    } else if (std::memcmp(ch, "data", 4) == 0) {
      if (!have_fmt) throw IoError("data chunk before fmt chunk");
      payload.resize(size);
      ReadExact(is, payload.data(), size, "data chunk");
      have_data = true;
    } else {
      is.ignore(size);
    }
    if (size % 2 == 1 && !have_data) is.ignore(1);
  }

  if (fmt.channels == 0) throw IoError("WAV file declares zero channels");
  if (fmt.sample_rate == 0) throw IoError("WAV file declares a zero sample rate");
  int bytes = 0;
  if (fmt.format == kFormatPcm && fmt.bits == 16) {
    bytes = 2;
  } else if (fmt.format == kFormatFloat && fmt.bits == 32) {
    bytes = 4;
  } else {
    throw IoError("unsupported WAV encoding (format " + std::to_string(fmt.format) + ", " +
                  std::to_string(fmt.bits) + " bits)");
  }

  const std::size_t frame_bytes = static_cast<std::size_t>(bytes) * fmt.channels;
  const std::size_t n = payload.size() / frame_bytes;
  MultichannelWaveform out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.channels.assign(fmt.channels, Signal(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < fmt.channels; ++p) {
      const unsigned char* s = &payload[i * frame_bytes + p * bytes];
      if (bytes == 2) {
        out.channels[p][i] = static_cast<std::int16_t>(Le16(s)) / 32768.0;
      } else {
        out.channels[p][i] = std::bit_cast<float>(Le32(s));
      }
    }
  }
  return out;
}

MultichannelWaveform ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return ReadWav(is);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void WriteWav(std::ostream& os, const MultichannelWaveform& x, WavFormat format) {
  const std::size_t channels = x.num_channels();
  if (channels == 0 || channels > std::numeric_limits<std::uint16_t>::max())
    throw ParameterError("WAV output needs between 1 and 65535 channels");
  if (x.sample_rate <= 0) throw ParameterError("sample rate must be positive");
  const std::size_t n = x.num_samples();
  for (const auto& c : x.channels)
    if (c.size() != n) throw DimensionError("channels differ in length");

  const std::uint16_t bytes = format == WavFormat::kPcm16 ? 2 : 4;
  const std::uint64_t data_size = static_cast<std::uint64_t>(n) * channels * bytes;
  if (data_size > std::numeric_limits<std::uint32_t>::max() - 36)
    throw ParameterError("signal too long for a RIFF WAVE file");

  os.write("RIFF", 4);
  Put32(os, static_cast<std::uint32_t>(36 + data_size));
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  Put32(os, 16);
  Put16(os, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  Put16(os, static_cast<std::uint16_t>(channels));
  Put32(os, static_cast<std::uint32_t>(x.sample_rate));
  Put32(os, static_cast<std::uint32_t>(x.sample_rate * channels * bytes));
  Put16(os, static_cast<std::uint16_t>(channels * bytes));
  Put16(os, static_cast<std::uint16_t>(bytes * 8));
  os.write("data", 4);
  Put32(os, static_cast<std::uint32_t>(data_size));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < channels; ++p) {
      const double v = x.channels[p][i];
      if (format == WavFormat::kPcm16) {
        const double c = std::clamp(v, -1.0, 1.0);
        const long q = std::clamp(std::lround(c * 32768.0), -32768L, 32767L);
        Put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        Put32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  if (!os) throw IoError("failed writing WAV data");
}

void WriteWav(const std::filesystem::path& path, const MultichannelWaveform& x,
              WavFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  WriteWav(os, x, format);
  if (!os) throw IoError("failed writing " + path.string());
}

MultichannelWaveform MonoWaveform(std::span<const double> x, int sample_rate) {
  MultichannelWaveform out;
  out.sample_rate = sample_rate;
  out.channels.emplace_back(x.begin(), x.end());
  return out;
}

}  // namespace ineube
