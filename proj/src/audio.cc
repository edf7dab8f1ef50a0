// src/audio.cc

// Copyright 2026  vfrkit authors

// See ../COPYING for clarification regarding multiple authors
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

#include "vfrkit/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <numbers>

#include "vfrkit/common.h"

namespace vfrkit {

void AudioBuffer::Validate() const {
  if (sample_rate <= 0)
    throw ValidationError("audio '" + source_id + "': sample rate must be positive");
  for (double s : samples)
    if (!std::isfinite(s))
      throw ValidationError("audio '" + source_id + "': non-finite sample");
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xFF);
}

void PutU16(std::vector<unsigned char> *out, std::uint16_t v) {
  out->push_back(v & 0xFF);
  out->push_back((v >> 8) & 0xFF);
}

}  // namespace

AudioBuffer ParseWav(std::span<const unsigned char> bytes,
                     const std::string &source_id) {
  using K = WavError::Kind;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError(K::kMalformedHeader, source_id + ": not a RIFF/WAVE file");

  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = ReadU32(chunk + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size())
        throw WavError(K::kMalformedHeader, source_id + ": short fmt chunk");
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26 &&
          body + 26 <= bytes.size())
        format = ReadU16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt)
        throw WavError(K::kMalformedHeader, source_id + ": data before fmt");
      bool pcm16 = format == kFormatPcm && bits == 16;
      bool float32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !float32)
        throw WavError(K::kUnsupportedEncoding,
                       source_id + ": unsupported encoding (format " +
                           std::to_string(format) + ", " +
                           std::to_string(bits) + " bits)");
      if (channels == 0 || rate == 0)
        throw WavError(K::kMalformedHeader,
                       source_id + ": zero channels or sample rate");
      std::size_t frame_bytes = static_cast<std::size_t>(channels) * bits / 8;
      if (body + size > bytes.size() || size % frame_bytes != 0)
        throw WavError(K::kTruncatedData, source_id + ": truncated data chunk");
      std::size_t num_frames = size / frame_bytes;
      AudioBuffer out;
      out.sample_rate = static_cast<int>(rate);
      out.source_id = source_id;
      out.samples.resize(num_frames);
      const unsigned char *p = bytes.data() + body;
      for (std::size_t f = 0; f < num_frames; ++f) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          if (pcm16) {
            auto v = static_cast<std::int16_t>(ReadU16(p));
            acc += v / 32768.0;
            p += 2;
          } else {
            std::uint32_t bitsv = ReadU32(p);
            float v;
            std::memcpy(&v, &bitsv, 4);
            acc += v;
            p += 4;
          }
        }
        out.samples[f] = acc / channels;
      }
      out.Validate();
      return out;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt)
    throw WavError(K::kMalformedHeader, source_id + ": missing fmt chunk");
  throw WavError(K::kTruncatedData, source_id + ": missing data chunk");
}

AudioBuffer ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw WavError(WavError::Kind::kMissingFile,
                   "cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return ParseWav(bytes, path.stem().string());
}

std::vector<unsigned char> EncodeWav(std::span<const double> samples,
                                     int sample_rate, int num_channels,
                                     WavEncoding encoding) {
  if (sample_rate <= 0 || num_channels <= 0 ||
      samples.size() % num_channels != 0)
    throw ValidationError("EncodeWav: bad rate/channel layout");
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(samples.size() * (bits / 8));
  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(&out, static_cast<std::uint16_t>(num_channels));
  PutU32(&out, static_cast<std::uint32_t>(sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(sample_rate) * num_channels * bits / 8);
  PutU16(&out, static_cast<std::uint16_t>(num_channels * bits / 8));
  PutU16(&out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_size);
  for (double s : samples) {
    if (encoding == WavEncoding::kPcm16) {
      double scaled = std::nearbyint(s * 32768.0);
      scaled = std::clamp(scaled, -32768.0, 32767.0);
      PutU16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      float f = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      PutU32(&out, u);
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path &path, const AudioBuffer &buf,
              WavEncoding encoding) {
  std::vector<unsigned char> bytes =
      EncodeWav(buf.samples, buf.sample_rate, 1, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

constexpr double kKaiserBeta = 10.0;
constexpr int kZeroCrossings = 32;
constexpr double kCutoffFraction = 0.95;

double BesselI0(double x) {
  // Power series; converges quickly for the arguments used here.
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

AudioBuffer Resample(const AudioBuffer &buf, int target_rate) {
  if (target_rate <= 0)
    throw ValidationError("Resample: target rate must be positive");
  if (buf.sample_rate <= 0)
    throw ValidationError("Resample: source rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const long long src = buf.sample_rate;
  const long long dst = target_rate;
  const long long g = std::gcd(src, dst);
  const long long up = dst / g;    // number of polyphase branches
  const long long down = src / g;  // input advance per `up` outputs

  const std::size_t n_in = buf.samples.size();
  const std::size_t n_out = static_cast<std::size_t>(
      (2 * static_cast<long long>(n_in) * dst + src) / (2 * src));

  // Cutoff relative to the input rate, in cycles per input sample.
  const double cutoff =
      kCutoffFraction * 0.5 * static_cast<double>(std::min(src, dst)) / src;
  const double half_width = kZeroCrossings / (2.0 * cutoff);  // input samples
  const int taps_each_side = static_cast<int>(std::ceil(half_width));
  const int num_taps = 2 * taps_each_side + 1;
  const double i0_beta = BesselI0(kKaiserBeta);

  // Branch p handles outputs whose input position has fractional part p/up.
  std::vector<double> table(static_cast<std::size_t>(up) * num_taps);
  for (long long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double *row = &table[static_cast<std::size_t>(p) * num_taps];
    double sum = 0.0;
    for (int k = -taps_each_side; k <= taps_each_side; ++k) {
      const double t = k - frac;
      double w = 0.0;
      if (std::abs(t) < half_width) {
        const double r = t / half_width;
        const double window = BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
        const double x = 2.0 * cutoff * t;
        const double sinc =
            x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        w = 2.0 * cutoff * sinc * window;
      }
      row[k + taps_each_side] = w;
      sum += w;
    }
    // Unit DC gain per branch.
    for (int k = 0; k < num_taps; ++k) row[k] /= sum;
  }

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.source_id = buf.source_id;
  out.samples.resize(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    const long long num = static_cast<long long>(j) * down;
    const long long base = num / up;
    const long long phase = num % up;
    const double *row = &table[static_cast<std::size_t>(phase) * num_taps];
    double acc = 0.0;
    for (int k = -taps_each_side; k <= taps_each_side; ++k) {
      const long long idx = base + k;
      if (idx < 0 || idx >= static_cast<long long>(n_in)) continue;
      acc += row[k + taps_each_side] * buf.samples[static_cast<std::size_t>(idx)];
    }
    out.samples[j] = acc;
  }
  return out;
}

}  // namespace vfrkit
