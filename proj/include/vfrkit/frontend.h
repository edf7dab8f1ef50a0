// include/vfrkit/frontend.h

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

#ifndef VFRKIT_FRONTEND_H_
#define VFRKIT_FRONTEND_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vfrkit/audio.h"
#include "vfrkit/common.h"
#include "vfrkit/fft.h"

namespace vfrkit {

inline constexpr double kFixedShiftMs = 10.0;
inline constexpr double kOversampledShiftMs = 2.5;
inline constexpr double kLogEnergyFloor = 1e-10;

struct FrontendConfig {
  double frame_len_ms = 25.0;
  double base_shift_ms = kFixedShiftMs;
  // 0 selects the smallest power of two holding one frame.
  std::size_t fft_size = 0;
  int num_mel_filters = 23;
  int num_ceps = 23;
  double low_freq_hz = 20.0;
  // Values <= 0 are offsets from the Nyquist frequency.
  double high_freq_hz = -20.0;
  double preemph = 0.97;
  int cmn_window_frames = 300;
  bool apply_cmn = true;

  int FrameLengthSamples(int sample_rate) const;
  int ShiftSamples(int sample_rate) const;
  std::size_t FftSize(int sample_rate) const;
  double HighFreq(int sample_rate) const;

  /// Checks the invariants that do not depend on the audio.
  void Validate() const;
  /// Additionally checks the band edges and FFT size for a sample rate.
  void Validate(int sample_rate) const;
};

/// Windowed frames; row i holds the pre-emphasized, Hamming-windowed
/// samples [i*shift, i*shift + frame_len).
struct FrameSet {
  Matrix frames;
  double shift_ms = 0.0;
  double frame_len_ms = 0.0;
  int sample_rate = 0;
};

/// Linear mel-filter energies on a uniform grid.
struct MelSpectrogram {
  Matrix rows;  // num_frames x K, non-negative
  double shift_ms = 0.0;
  double frame_len_ms = 0.0;
  int sample_rate = 0;
};

struct FeatureMeta {
  std::string source_id;
  bool cmn_applied = false;
  bool vfr_applied = false;
  double base_shift_ms = 0.0;

  friend bool operator==(const FeatureMeta &, const FeatureMeta &) = default;
};

/// Cepstral rows with per-row centre times in milliseconds.
struct FeatureMatrix {
  Matrix rows;
  std::vector<double> timestamps_ms;
  FeatureMeta meta;

  std::size_t NumRows() const { return rows.NumRows(); }
  std::size_t Dim() const { return rows.NumCols(); }
  /// Throws ValidationError unless timestamps match rows, are strictly
  /// increasing, and every value is finite.
  void Validate() const;

  friend bool operator==(const FeatureMatrix &, const FeatureMatrix &) = default;
};

/// Number of complete frames: floor((n - len) / shift) + 1, or 0 if n < len.
std::size_t NumFrames(std::size_t num_samples, int frame_len, int shift);

/// Symmetric Hamming window 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> HammingWindow(int length);

/// Frames the signal (no padding; partial tail frames are dropped), applies
/// pre-emphasis inside each frame and then the Hamming window. Throws if the
/// signal is shorter than one frame.
FrameSet FrameSignal(const AudioBuffer &buf, const FrontendConfig &cfg);

/// Triangular filters equally spaced on the mel scale 1127 ln(1 + f/700).
/// Immutable once built; safe to share across threads.
class MelFilterbank {
 public:
  MelFilterbank(const FrontendConfig &cfg, int sample_rate);

  int NumFilters() const { return static_cast<int>(weights_.size()); }
  std::size_t NumBins() const { return num_bins_; }
  double CenterHz(int k) const { return centers_hz_[k]; }
  /// Weight of filter k on FFT bin b.
  double Weight(int k, std::size_t b) const;

  void Apply(std::span<const double> power, std::span<double> energies) const;

 private:
  std::size_t num_bins_;
  std::vector<double> centers_hz_;
  std::vector<std::size_t> first_bin_;
  std::vector<std::vector<double>> weights_;
};

/// Power spectrum through the mel filterbank; linear (not log) energies.
MelSpectrogram MelEnergies(const FrameSet &frames, const FrontendConfig &cfg);

/// Orthonormal DCT-II and its inverse.
std::vector<double> DctII(std::span<const double> x);
std::vector<double> InverseDctII(std::span<const double> c);

/// c = DCT-II(ln(max(e, 1e-10))), first num_ceps coefficients. Timestamps
/// are frame centres i*shift + frame_len/2.
FeatureMatrix Mfcc(const MelSpectrogram &mel, const FrontendConfig &cfg,
                   const std::string &source_id = {});

/// Centred sliding mean subtraction. Row i uses rows
/// [i - window/2, i - window/2 + window) clipped to the utterance; when the
/// utterance is shorter than the window the whole-utterance mean is used.
FeatureMatrix SlidingCmn(const FeatureMatrix &feats, int window_frames);

/// Fixed-grid pipeline: frames -> mel -> MFCC -> optional CMN.
FeatureMatrix ExtractMfcc(const AudioBuffer &buf, const FrontendConfig &cfg);

inline double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
inline double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

}  // namespace vfrkit

#endif  // VFRKIT_FRONTEND_H_
