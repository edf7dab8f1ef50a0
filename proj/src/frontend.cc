// src/frontend.cc

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

#include "vfrkit/frontend.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vfrkit {

int FrontendConfig::FrameLengthSamples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_len_ms * sample_rate / 1000.0));
}

int FrontendConfig::ShiftSamples(int sample_rate) const {
  return static_cast<int>(std::lround(base_shift_ms * sample_rate / 1000.0));
}

std::size_t FrontendConfig::FftSize(int sample_rate) const {
  if (fft_size != 0) return fft_size;
  std::size_t n = 1;
  const auto len = static_cast<std::size_t>(FrameLengthSamples(sample_rate));
  while (n < len) n <<= 1;
  return n;
}

double FrontendConfig::HighFreq(int sample_rate) const {
  return high_freq_hz > 0.0 ? high_freq_hz : 0.5 * sample_rate + high_freq_hz;
}

void FrontendConfig::Validate() const {
  if (!(base_shift_ms > 0.0) || !(frame_len_ms > base_shift_ms))
    throw ValidationError("frontend: need frame_len_ms > base_shift_ms > 0");
  if (num_mel_filters < 1 || num_ceps < 1 || num_ceps > num_mel_filters)
    throw ValidationError("frontend: need 1 <= num_ceps <= num_mel_filters");
  if (cmn_window_frames < 1)
    throw ValidationError("frontend: cmn_window_frames must be >= 1");
  if (fft_size != 0 && !IsPowerOfTwo(fft_size))
    throw ValidationError("frontend: fft_size must be a power of two");
  if (low_freq_hz < 0.0)
    throw ValidationError("frontend: low_freq_hz must be non-negative");
}

void FrontendConfig::Validate(int sample_rate) const {
  Validate();
  if (sample_rate <= 0) throw ValidationError("frontend: bad sample rate");
  const double nyquist = 0.5 * sample_rate;
  const double high = HighFreq(sample_rate);
  if (!(low_freq_hz < high) || high > nyquist)
    throw ValidationError("frontend: need low_freq < high_freq <= Nyquist");
  if (ShiftSamples(sample_rate) < 1)
    throw ValidationError("frontend: shift shorter than one sample");
  if (FftSize(sample_rate) < static_cast<std::size_t>(FrameLengthSamples(sample_rate)))
    throw ValidationError("frontend: fft_size shorter than frame length");
}

void FeatureMatrix::Validate() const {
  if (timestamps_ms.size() != rows.NumRows())
    throw ValidationError("features: timestamp count does not match rows");
  for (std::size_t i = 1; i < timestamps_ms.size(); ++i)
    if (!(timestamps_ms[i] > timestamps_ms[i - 1]))
      throw ValidationError("features: timestamps not strictly increasing");
  for (double v : rows.Data())
    if (!std::isfinite(v)) throw ValidationError("features: non-finite value");
  for (double t : timestamps_ms)
    if (!std::isfinite(t)) throw ValidationError("features: non-finite timestamp");
}

std::size_t NumFrames(std::size_t num_samples, int frame_len, int shift) {
  if (frame_len <= 0 || shift <= 0)
    throw ValidationError("NumFrames: frame length and shift must be positive");
  if (num_samples < static_cast<std::size_t>(frame_len)) return 0;
  return (num_samples - frame_len) / shift + 1;
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length, 1.0);
  if (length == 1) return w;
  const double denom = length - 1;
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / denom);
  return w;
}

FrameSet FrameSignal(const AudioBuffer &buf, const FrontendConfig &cfg) {
  cfg.Validate(buf.sample_rate);
  const int len = cfg.FrameLengthSamples(buf.sample_rate);
  const int shift = cfg.ShiftSamples(buf.sample_rate);
  const std::size_t n = NumFrames(buf.samples.size(), len, shift);
  if (n == 0)
    throw ValidationError("audio '" + buf.source_id +
                          "' is shorter than one analysis frame");
  const std::vector<double> window = HammingWindow(len);
  FrameSet out;
  out.frames = Matrix(n, len);
  out.shift_ms = cfg.base_shift_ms;
  out.frame_len_ms = cfg.frame_len_ms;
  out.sample_rate = buf.sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double *x = buf.samples.data() + i * shift;
    auto row = out.frames.Row(i);
    // x[-1] is taken as x[0] at the frame start.
    double prev = x[0];
    for (int j = 0; j < len; ++j) {
      row[j] = (x[j] - cfg.preemph * prev) * window[j];
      prev = x[j];
    }
  }
  return out;
}

MelFilterbank::MelFilterbank(const FrontendConfig &cfg, int sample_rate) {
  cfg.Validate(sample_rate);
  const std::size_t fft = cfg.FftSize(sample_rate);
  num_bins_ = fft / 2 + 1;
  const int k_filters = cfg.num_mel_filters;
  const double mel_low = HzToMel(cfg.low_freq_hz);
  const double mel_high = HzToMel(cfg.HighFreq(sample_rate));
  const double delta = (mel_high - mel_low) / (k_filters + 1);
  const double bin_hz = static_cast<double>(sample_rate) / fft;

  centers_hz_.resize(k_filters);
  first_bin_.resize(k_filters);
  weights_.resize(k_filters);
  for (int k = 0; k < k_filters; ++k) {
    const double left = mel_low + k * delta;
    const double center = left + delta;
    const double right = center + delta;
    centers_hz_[k] = MelToHz(center);
    std::size_t first = num_bins_;
    std::vector<double> w;
    for (std::size_t b = 0; b < num_bins_; ++b) {
      const double mel = HzToMel(b * bin_hz);
      double weight = 0.0;
      if (mel > left && mel <= center)
        weight = (mel - left) / (center - left);
      else if (mel > center && mel < right)
        weight = (right - mel) / (right - center);
      if (weight > 0.0) {
        if (first == num_bins_) first = b;
        w.resize(b - first + 1, 0.0);
        w[b - first] = weight;
      }
    }
    first_bin_[k] = first == num_bins_ ? 0 : first;
    weights_[k] = std::move(w);
  }
}

double MelFilterbank::Weight(int k, std::size_t b) const {
  const auto &w = weights_[k];
  if (b < first_bin_[k] || b >= first_bin_[k] + w.size()) return 0.0;
  return w[b - first_bin_[k]];
}

void MelFilterbank::Apply(std::span<const double> power,
                          std::span<double> energies) const {
  if (power.size() != num_bins_ ||
      energies.size() != static_cast<std::size_t>(NumFilters()))
    throw ValidationError("MelFilterbank::Apply: size mismatch");
  for (int k = 0; k < NumFilters(); ++k) {
    const auto &w = weights_[k];
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * power[first_bin_[k] + j];
    energies[k] = acc;
  }
}

MelSpectrogram MelEnergies(const FrameSet &frames, const FrontendConfig &cfg) {
  const MelFilterbank bank(cfg, frames.sample_rate);
  const PowerSpectrum spectrum(cfg.FftSize(frames.sample_rate));
  MelSpectrogram out;
  out.rows = Matrix(frames.frames.NumRows(), bank.NumFilters());
  out.shift_ms = frames.shift_ms;
  out.frame_len_ms = frames.frame_len_ms;
  out.sample_rate = frames.sample_rate;
  std::vector<double> power(spectrum.NumBins());
  for (std::size_t i = 0; i < frames.frames.NumRows(); ++i) {
    spectrum.Compute(frames.frames.Row(i), power);
    bank.Apply(power, out.rows.Row(i));
  }
  return out;
}

std::vector<double> DctII(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += x[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    const double scale = j == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    c[j] = scale * acc;
  }
  return c;
}

std::vector<double> InverseDctII(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double scale = j == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      acc += scale * c[j] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    }
    x[k] = acc;
  }
  return x;
}

FeatureMatrix Mfcc(const MelSpectrogram &mel, const FrontendConfig &cfg,
                   const std::string &source_id) {
  const std::size_t k_filters = mel.rows.NumCols();
  if (cfg.num_ceps < 1 || static_cast<std::size_t>(cfg.num_ceps) > k_filters)
    throw ValidationError("Mfcc: num_ceps must not exceed the filter count");
  const auto ceps = static_cast<std::size_t>(cfg.num_ceps);

  // Precomputed orthonormal DCT-II basis, first `ceps` rows.
  std::vector<double> basis(ceps * k_filters);
  for (std::size_t j = 0; j < ceps; ++j) {
    const double scale =
        j == 0 ? std::sqrt(1.0 / k_filters) : std::sqrt(2.0 / k_filters);
    for (std::size_t k = 0; k < k_filters; ++k)
      basis[j * k_filters + k] =
          scale * std::cos(std::numbers::pi * j * (k + 0.5) / k_filters);
  }

  FeatureMatrix out;
  out.rows = Matrix(mel.rows.NumRows(), ceps);
  out.timestamps_ms.resize(mel.rows.NumRows());
  out.meta.source_id = source_id;
  out.meta.base_shift_ms = mel.shift_ms;
  std::vector<double> log_e(k_filters);
  for (std::size_t i = 0; i < mel.rows.NumRows(); ++i) {
    auto e = mel.rows.Row(i);
    for (std::size_t k = 0; k < k_filters; ++k)
      log_e[k] = std::log(std::max(e[k], kLogEnergyFloor));
    auto c = out.rows.Row(i);
    for (std::size_t j = 0; j < ceps; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < k_filters; ++k)
        acc += basis[j * k_filters + k] * log_e[k];
      c[j] = acc;
    }
    out.timestamps_ms[i] = i * mel.shift_ms + 0.5 * mel.frame_len_ms;
  }
  return out;
}

FeatureMatrix SlidingCmn(const FeatureMatrix &feats, int window_frames) {
  if (window_frames < 1) throw ValidationError("SlidingCmn: window must be >= 1");
  if (feats.NumRows() == 0) throw ValidationError("SlidingCmn: empty feature matrix");
  const std::size_t n = feats.NumRows();
  const std::size_t dim = feats.Dim();
  FeatureMatrix out = feats;
  out.meta.cmn_applied = true;

  // Prefix sums give each clipped window mean in O(dim).
  std::vector<double> prefix((n + 1) * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d)
      prefix[(i + 1) * dim + d] = prefix[i * dim + d] + feats.rows(i, d);

  const auto w = static_cast<std::size_t>(window_frames);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t begin = 0, end = n;
    if (n >= w) {
      const long long b = static_cast<long long>(i) - static_cast<long long>(w / 2);
      begin = static_cast<std::size_t>(std::max(0LL, b));
      end = static_cast<std::size_t>(
          std::min(static_cast<long long>(n), b + static_cast<long long>(w)));
    }
    const double count = static_cast<double>(end - begin);
    for (std::size_t d = 0; d < dim; ++d) {
      const double mean = (prefix[end * dim + d] - prefix[begin * dim + d]) / count;
      out.rows(i, d) = feats.rows(i, d) - mean;
    }
  }
  return out;
}

FeatureMatrix ExtractMfcc(const AudioBuffer &buf, const FrontendConfig &cfg) {
  const FrameSet frames = FrameSignal(buf, cfg);
  FeatureMatrix feats = Mfcc(MelEnergies(frames, cfg), cfg, buf.source_id);
  if (cfg.apply_cmn) feats = SlidingCmn(feats, cfg.cmn_window_frames);
  return feats;
}

}  // namespace vfrkit
