/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "emoforge/common.hpp"

namespace emoforge {

/// Decoded mono signal. Samples lie in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;
  std::string source_id;

  std::size_t size() const { return samples.size(); }
};

inline void validate(const AudioClip& clip) {
  require(!clip.samples.empty(), ErrorKind::kEmptyAudio, "clip '" + clip.source_id + "' has no samples");
  require(clip.sample_rate > 0, ErrorKind::kFormat, "sample rate must be positive");
  for (double s : clip.samples) {
    require(std::isfinite(s), ErrorKind::kFormat, "non-finite sample in '" + clip.source_id + "'");
  }
}

enum class SampleFormat { kPcm8, kPcm16, kPcm24, kFloat32 };

namespace wav_detail {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

inline std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
inline std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

inline double decode_sample(const std::uint8_t* p, SampleFormat fmt) {
  switch (fmt) {
    case SampleFormat::kPcm8:
      return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case SampleFormat::kPcm16:
      return static_cast<double>(static_cast<std::int16_t>(read_u16(p))) / 32768.0;
    case SampleFormat::kPcm24: {
      std::int32_t v = std::int32_t(p[0]) | (std::int32_t(p[1]) << 8) | (std::int32_t(p[2]) << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v) / 8388608.0;
    }
    case SampleFormat::kFloat32: {
      const std::uint32_t bits = read_u32(p);
      const float f = std::bit_cast<float>(bits);
      require(std::isfinite(f), ErrorKind::kFormat, "non-finite float sample");
      return std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
  }
  return 0.0;
}

inline std::size_t bytes_per_sample(SampleFormat fmt) {
  switch (fmt) {
    case SampleFormat::kPcm8: return 1;
    case SampleFormat::kPcm16: return 2;
    case SampleFormat::kPcm24: return 3;
    case SampleFormat::kFloat32: return 4;
  }
  return 0;
}

}  // namespace wav_detail

/// Parses an in-memory RIFF/WAVE image. Stereo is downmixed by channel mean.
inline AudioClip decode_wav_bytes(std::span<const std::uint8_t> bytes, std::string source_id = {}) {
  using namespace wav_detail;
  require(bytes.size() >= 12, ErrorKind::kFormat, "file too short for a RIFF header");
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0 && std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorKind::kFormat, "missing RIFF/WAVE signature");

  bool have_fmt = false;
  std::uint16_t format_tag = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t sample_rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    // Some writers emit a bogus size on the final data chunk; clamp it.
    const std::size_t available = bytes.size() - body;
    const std::size_t len = std::min<std::size_t>(chunk_size, available);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      require(len >= 16, ErrorKind::kFormat, "fmt chunk too short");
      const std::uint8_t* f = bytes.data() + body;
      format_tag = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      block_align = read_u16(f + 12);
      bits = read_u16(f + 14);
      if (format_tag == kFormatExtensible) {
        require(len >= 26, ErrorKind::kFormat, "extensible fmt chunk too short");
        format_tag = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.subspan(body, len);
      have_data = true;
    }
    pos = body + len + (len & 1u);
  }
  require(have_fmt, ErrorKind::kFormat, "missing fmt chunk");
  require(have_data, ErrorKind::kFormat, "missing data chunk");
  require(sample_rate > 0, ErrorKind::kFormat, "zero sample rate");

  SampleFormat fmt;
  if (format_tag == kFormatPcm && bits == 8) {
    fmt = SampleFormat::kPcm8;
  } else if (format_tag == kFormatPcm && bits == 16) {
    fmt = SampleFormat::kPcm16;
  } else if (format_tag == kFormatPcm && bits == 24) {
    fmt = SampleFormat::kPcm24;
  } else if (format_tag == kFormatFloat && bits == 32) {
    fmt = SampleFormat::kFloat32;
  } else {
    fail(ErrorKind::kUnsupported,
         "encoding tag " + std::to_string(format_tag) + " with " + std::to_string(bits) + " bits");
  }
  require(channels == 1 || channels == 2, ErrorKind::kUnsupported,
          std::to_string(channels) + " channels (only mono and stereo are supported)");
  const std::size_t width = bytes_per_sample(fmt);
  require(block_align == width * channels, ErrorKind::kFormat, "block alignment disagrees with format");

  const std::size_t frames = data.size() / block_align;
  require(frames > 0, ErrorKind::kEmptyAudio, "data chunk holds no samples");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = std::move(source_id);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * block_align;
    double acc = decode_sample(frame, fmt);
    if (channels == 2) acc = 0.5 * (acc + decode_sample(frame + width, fmt));
    clip.samples[i] = acc;
  }
  return clip;
}

inline AudioClip decode_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav_bytes(bytes, path.string());
}

/// Serializes interleaved samples. Integer formats scale by 2^(bits-1) and
/// saturate, so decoding recovers each value to within one quantization step.
inline std::vector<std::uint8_t> encode_wav_bytes(std::span<const double> interleaved, std::uint32_t sample_rate,
                                                  std::uint16_t channels = 1,
                                                  SampleFormat fmt = SampleFormat::kPcm16) {
  using namespace wav_detail;
  require(channels >= 1, ErrorKind::kParameter, "channel count must be positive");
  require(interleaved.size() % channels == 0, ErrorKind::kShape, "sample count not a multiple of channels");
  const std::size_t width = bytes_per_sample(fmt);
  const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * width);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size + 1);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size + (data_size & 1u));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, fmt == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm);
  put_u16(out, channels);
  put_u32(out, sample_rate);
  put_u32(out, static_cast<std::uint32_t>(sample_rate * channels * width));
  put_u16(out, static_cast<std::uint16_t>(channels * width));
  put_u16(out, static_cast<std::uint16_t>(width * 8));
  put_tag(out, "data");
  put_u32(out, data_size);

  auto quantize = [](double x, double scale, double lo, double hi) {
    return std::clamp(std::nearbyint(std::clamp(x, -1.0, 1.0) * scale), lo, hi);
  };
  for (double x : interleaved) {
    switch (fmt) {
      case SampleFormat::kPcm8:
        out.push_back(static_cast<std::uint8_t>(quantize(x, 128.0, -128.0, 127.0) + 128.0));
        break;
      case SampleFormat::kPcm16:
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(quantize(x, 32768.0, -32768.0, 32767.0))));
        break;
      case SampleFormat::kPcm24: {
        const auto v = static_cast<std::int32_t>(quantize(x, 8388608.0, -8388608.0, 8388607.0));
        const auto u = static_cast<std::uint32_t>(v);
        out.push_back(static_cast<std::uint8_t>(u));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
        out.push_back(static_cast<std::uint8_t>(u >> 16));
        break;
      }
      case SampleFormat::kFloat32:
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        break;
    }
  }
  if (data_size & 1u) out.push_back(0);
  return out;
}

inline void write_wav(const std::filesystem::path& path, std::span<const double> interleaved,
                      std::uint32_t sample_rate, std::uint16_t channels = 1,
                      SampleFormat fmt = SampleFormat::kPcm16) {
  const auto bytes = encode_wav_bytes(interleaved, sample_rate, channels, fmt);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace emoforge
