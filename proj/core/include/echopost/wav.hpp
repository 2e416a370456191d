// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_WAV_HPP
#define ECHOPOST_WAV_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "echopost/audio.hpp"

namespace echopost {

enum class WavEncoding { pcm16, float32 };

class WavError : public std::runtime_error {
 public:
  enum class Kind { missing_file, multi_channel, unsupported_encoding, malformed, unwritable };

  WavError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a mono RIFF/WAVE file (PCM16 or IEEE float32). PCM16 samples are
/// scaled by 1/32768 so that full scale maps to +/-(32767/32768).
AudioSignal read_wav(const std::filesystem::path& path);

/// Writes a mono RIFF/WAVE file. pcm16 clips out-of-range samples to full
/// scale instead of wrapping.
void write_wav(const std::filesystem::path& path, const AudioSignal& signal,
               WavEncoding encoding = WavEncoding::float32);

}  // namespace echopost

#endif  // ECHOPOST_WAV_HPP
