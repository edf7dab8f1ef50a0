// include/vfrkit/toybench.h

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

#ifndef VFRKIT_TOYBENCH_H_
#define VFRKIT_TOYBENCH_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vfrkit/audio.h"
#include "vfrkit/augment.h"
#include "vfrkit/frontend.h"

namespace vfrkit {

// Synthetic speakers and speaking styles for a hermetic speaker
// verification benchmark. A speaker is a source-filter model: a glottal
// pulse train plus aspiration noise through three cascaded formant
// resonators, with a speaker-specific vowel inventory around its base
// formants. A style controls tempo, pausing and per-syllable timing
// variability.

struct SyntheticSpeaker {
  std::array<double, 3> resonator_freqs{};  // Hz
  std::array<double, 3> bandwidths{};       // Hz
  double pitch_hz = 120.0;
  std::uint64_t seed = 0;

  /// Frequencies below the Nyquist rate of `sample_rate`, pitch in
  /// [60, 300] Hz, positive bandwidths.
  void Validate(int sample_rate) const;
};

struct StyleSpec {
  std::string name;
  double tempo_factor = 1.0;  // duration multiplier, [0.5, 2.0]
  double pause_rate = 0.0;    // expected pauses per second of neutral-tempo speech
  double pause_min_ms = 0.0;
  double pause_max_ms = 0.0;
  double jitter = 0.0;        // per-syllable tempo variability, [0, 0.9]

  void Validate() const;
};

/// Named presets: neutral (tempo 1.0), slow (1.5), fast (0.75) and
/// hesitant (1.2 with frequent long pauses).
StyleSpec StyleByName(const std::string &name);
std::vector<std::string> StyleNames();

/// Speaker number `index` of the population drawn from `seed`.
SyntheticSpeaker MakeSpeaker(std::uint64_t seed, int index);

/// Renders roughly duration_s seconds of neutral-tempo content, segmented
/// into 200-400 ms syllables, then scales every syllable by
/// tempo_factor * (1 + jitter * u) and inserts pauses (also scaled by the
/// tempo). The jitter factors are renormalised so they do not change the
/// total length, and every random draw happens before the tempo is applied,
/// so the same seed under a different tempo yields a pure time stretch.
AudioBuffer SynthUtterance(const SyntheticSpeaker &speaker, const StyleSpec &style,
                           double duration_s, std::uint64_t seed,
                           int sample_rate = 8000);

struct StretchRatios {
  std::size_t fixed_frames = 0, fixed_frames_stretched = 0;
  std::size_t vfr_frames = 0, vfr_frames_stretched = 0;
  double FixedRatio() const {
    return static_cast<double>(fixed_frames_stretched) / fixed_frames;
  }
  double VfrRatio() const {
    return static_cast<double>(vfr_frames_stretched) / vfr_frames;
  }
};

/// Frame counts of an utterance and of the same content at `stretch` times
/// the style's tempo, under fixed 10 ms and VFR extraction.
StretchRatios MeasureStretchRatios(const SyntheticSpeaker &speaker,
                                   const StyleSpec &style, double duration_s,
                                   std::uint64_t seed, double stretch,
                                   const FrontendConfig &cfg, int sample_rate = 8000);

/// Front-end used by the benchmark: the default configuration without
/// cepstral mean normalization. The mean block of the statistics embedding
/// is where the speaker's spectral envelope lives, and CMN would zero it.
inline FrontendConfig BenchFrontend() {
  FrontendConfig cfg;
  cfg.apply_cmn = false;
  return cfg;
}

struct ExperimentOptions {
  double utterance_s = 3.0;
  int tests_per_speaker = 3;
  int sample_rate = 8000;
  int threads = 1;
  FrontendConfig frontend = BenchFrontend();
};

struct ExperimentReport {
  std::string config;
  std::string enroll_style;
  std::string test_style;
  int n_speakers = 0;
  std::uint64_t seed = 0;
  double eer_percent = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;

  friend bool operator==(const ExperimentReport &, const ExperimentReport &) = default;
};

/// One enrollment utterance (enroll_style) and tests_per_speaker test
/// utterances (test_style) per speaker, all-vs-all trials, cosine scoring of
/// mean/std embeddings. Per config, a trial's score is:
///   baseline      original vs original
///   vfr-norm      VFR vs VFR
///   vfr-norm-aug  max of the two above
///   multi-style   enrollment embedding averaged over the enrollment content
///                 rendered in both styles, original features
ExperimentReport RunExperiment(int n_speakers, const std::string &enroll_style,
                               const std::string &test_style, AugmentConfig config,
                               std::uint64_t seed, const ExperimentOptions &opts = {});

/// Median of the per-seed EERs (mean of the two middle values for even
/// counts).
double MedianEer(const std::vector<ExperimentReport> &reports);

std::string ReportToJson(const ExperimentReport &report, int indent = -1);

}  // namespace vfrkit

#endif  // VFRKIT_TOYBENCH_H_
