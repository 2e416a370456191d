// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

namespace echopost {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw WavError(WavError::Kind::missing_file, "cannot open wav file: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw WavError(WavError::Kind::malformed, "not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool fmt_seen = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = p + pos;
    std::uint32_t chunk_size = read_u32(chunk + 4);
    const unsigned char* body = chunk + 8;
    if (pos + 8 + chunk_size > size) {
      throw WavError(WavError::Kind::malformed, "truncated chunk in: " + path.string());
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw WavError(WavError::Kind::malformed, "short fmt chunk in: " + path.string());
      }
      format = read_u16(body);
      channels = read_u16(body + 2);
      sample_rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      fmt_seen = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = body;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!fmt_seen || data == nullptr) {
    throw WavError(WavError::Kind::malformed, "missing fmt/data chunk in: " + path.string());
  }
  if (channels != 1) {
    throw WavError(WavError::Kind::multi_channel,
                   "expected mono, got " + std::to_string(channels) +
                       " channels in: " + path.string());
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw WavError(WavError::Kind::unsupported_encoding,
                   "unsupported encoding (format " + std::to_string(format) + ", " +
                       std::to_string(bits) + " bit) in: " + path.string());
  }

  AudioSignal out;
  out.sample_rate = static_cast<int>(sample_rate);
  if (pcm16) {
    const std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v = static_cast<std::int16_t>(read_u16(data + 2 * i));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else {
    const std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t raw = read_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &raw, sizeof(f));
      out.samples[i] = static_cast<double>(f);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioSignal& signal,
               WavEncoding encoding) {
  const std::size_t n = signal.samples.size();
  const std::uint16_t bytes_per_sample = encoding == WavEncoding::pcm16 ? 2 : 4;
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * bytes_per_sample);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  out += "data";
  put_u32(out, data_size);

  if (encoding == WavEncoding::pcm16) {
    for (double v : signal.samples) {
      long q = std::lround(v * 32768.0);
      q = std::clamp(q, -32768L, 32767L);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
  } else {
    for (double v : signal.samples) {
      float f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof(raw));
      put_u32(out, raw);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw WavError(WavError::Kind::unwritable, "cannot write wav file: " + path.string());
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw WavError(WavError::Kind::unwritable, "write failed for: " + path.string());
  }
}

}  // namespace echopost
