// include/vfrkit/audio.h

// Copyright 2026  vfrkit authors

// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef VFRKIT_AUDIO_H_
#define VFRKIT_AUDIO_H_

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfrkit {

/// Mono floating-point audio with its sample rate.
struct AudioBuffer {
  std::vector<double> samples;  // nominally in [-1, 1]
  int sample_rate = 0;
  std::string source_id;

  double DurationSeconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }

  /// Throws ValidationError if the rate is not positive or any sample is
  /// non-finite.
  void Validate() const;
};

class WavError : public std::runtime_error {
 public:
  enum class Kind {
    kMissingFile,
    kUnsupportedEncoding,
    kTruncatedData,
    kMalformedHeader,
  };
  WavError(Kind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads RIFF/WAVE with PCM 16-bit or IEEE float 32-bit little-endian data.
/// 16-bit samples are scaled by 1/32768; channels are averaged to mono. The
/// source id is the file stem.
AudioBuffer ReadWav(const std::filesystem::path &path);

/// Parses an in-memory WAV image; `source_id` is attached verbatim.
AudioBuffer ParseWav(std::span<const unsigned char> bytes,
                     const std::string &source_id);

enum class WavEncoding { kPcm16, kFloat32 };

/// Writes mono audio. PCM16 output clips to [-1, 1) and rounds to nearest.
void WriteWav(const std::filesystem::path &path, const AudioBuffer &buf,
              WavEncoding encoding = WavEncoding::kPcm16);

std::vector<unsigned char> EncodeWav(std::span<const double> samples,
                                     int sample_rate, int num_channels,
                                     WavEncoding encoding);

/// Band-limited rate conversion: polyphase windowed-sinc with a Kaiser
/// window (beta 10), 32 zero crossings per side and a cutoff of 0.95 times
/// the lower Nyquist frequency. Output length is
/// round(len * target_rate / source_rate). Equal rates return an exact copy.
AudioBuffer Resample(const AudioBuffer &buf, int target_rate);

}  // namespace vfrkit

#endif  // VFRKIT_AUDIO_H_
