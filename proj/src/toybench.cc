// src/toybench.cc

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

#include "vfrkit/toybench.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "vfrkit/eval.h"
#include "vfrkit/parallel.h"
#include "vfrkit/vfr.h"

namespace vfrkit {

void SyntheticSpeaker::Validate(int sample_rate) const {
  const double nyquist = 0.5 * sample_rate;
  for (int k = 0; k < 3; ++k) {
    if (!(resonator_freqs[k] > 0.0) || !(resonator_freqs[k] < nyquist))
      throw ValidationError("speaker: resonator frequency outside (0, Nyquist)");
    if (!(bandwidths[k] > 0.0) || !(bandwidths[k] < nyquist))
      throw ValidationError("speaker: bandwidth outside (0, Nyquist)");
  }
  if (!(pitch_hz >= 60.0 && pitch_hz <= 300.0))
    throw ValidationError("speaker: pitch must be within 60-300 Hz");
}

void StyleSpec::Validate() const {
  if (!(tempo_factor >= 0.5 && tempo_factor <= 2.0))
    throw ValidationError("style '" + name + "': tempo_factor must be in [0.5, 2.0]");
  if (!(pause_rate >= 0.0) || !(pause_min_ms >= 0.0) || !(pause_max_ms >= pause_min_ms))
    throw ValidationError("style '" + name + "': bad pause parameters");
  if (!(jitter >= 0.0 && jitter <= 0.9))
    throw ValidationError("style '" + name + "': jitter must be in [0, 0.9]");
}

StyleSpec StyleByName(const std::string &name) {
  if (name == "neutral") return {"neutral", 1.0, 0.5, 80.0, 200.0, 0.15};
  if (name == "slow") return {"slow", 1.5, 0.5, 80.0, 200.0, 0.15};
  if (name == "fast") return {"fast", 0.75, 0.5, 80.0, 200.0, 0.15};
  if (name == "hesitant") return {"hesitant", 1.2, 1.5, 150.0, 500.0, 0.3};
  throw ValidationError("unknown style '" + name +
                        "' (expected neutral, slow, fast, hesitant)");
}

std::vector<std::string> StyleNames() { return {"neutral", "slow", "fast", "hesitant"}; }

SyntheticSpeaker MakeSpeaker(std::uint64_t seed, int index) {
  Rng rng(MixSeed(seed, 0x5bea4e7, static_cast<std::uint64_t>(index)));
  SyntheticSpeaker s;
  s.resonator_freqs = {rng.Uniform(380.0, 780.0), rng.Uniform(1050.0, 1900.0),
                       rng.Uniform(2250.0, 3150.0)};
  s.bandwidths = {rng.Uniform(50.0, 130.0), rng.Uniform(70.0, 170.0),
                  rng.Uniform(100.0, 240.0)};
  s.pitch_hz = rng.Uniform(95.0, 240.0);
  s.seed = rng.NextU64();
  return s;
}

namespace {

constexpr int kVowels = 6;
constexpr double kOnsetS = 0.05;    // consonant closure plus transition
constexpr double kClosureS = 0.03;
constexpr double kReleaseS = 0.03;
constexpr double kConsonantLevel = 0.1;
constexpr double kAspiration = 0.01;

struct Syllable {
  double base_s = 0.0;   // neutral-tempo duration
  double onset_s = 0.0;
  double factor = 1.0;   // jitter factor after renormalisation
  int vowel = 0;
  double pitch_start = 1.0, pitch_end = 1.0;
  double gain = 1.0;
  double pause_after_s = 0.0;  // neutral-tempo pause
};

// Klatt-style two-pole resonator with unit DC gain.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double Step(double x, double freq, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double b = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double c = -r * r;
    const double a = 1.0 - b - c;
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

AudioBuffer SynthUtterance(const SyntheticSpeaker &speaker, const StyleSpec &style,
                           double duration_s, std::uint64_t seed, int sample_rate) {
  if (!(duration_s >= 1.0)) throw ValidationError("synth: duration must be >= 1 s");
  if (sample_rate <= 0) throw ValidationError("synth: bad sample rate");
  speaker.Validate(sample_rate);
  style.Validate();

  // Speaker vowel inventory: per-vowel scalings of the base formants.
  Rng vrng(speaker.seed);
  std::array<std::array<double, 3>, kVowels> vowels{};
  for (auto &v : vowels)
    for (int k = 0; k < 3; ++k) v[k] = vrng.Uniform(0.72, 1.3);

  // All random draws happen here, independent of the tempo.
  Rng rng(MixSeed(seed, speaker.seed));
  std::vector<Syllable> syl;
  for (double total = 0.0; total < duration_s - 1e-9;) {
    Syllable s;
    s.base_s = std::min(rng.Uniform(0.2, 0.4), duration_s - total);
    s.onset_s = std::min(kOnsetS, 0.5 * s.base_s);
    s.vowel = static_cast<int>(rng.Below(kVowels));
    s.pitch_start = rng.Uniform(0.92, 1.1);
    s.pitch_end = rng.Uniform(0.85, 1.02);
    s.gain = rng.Uniform(0.8, 1.0);
    s.factor = 1.0 + style.jitter * rng.Uniform(-1.0, 1.0);
    total += s.base_s;
    syl.push_back(s);
  }
  // Jitter redistributes time between syllables without changing the total.
  double weighted = 0.0, base_total = 0.0;
  for (const Syllable &s : syl) {
    weighted += s.base_s * s.factor;
    base_total += s.base_s;
  }
  for (Syllable &s : syl) s.factor *= base_total / weighted;
  const double mean_len = base_total / static_cast<double>(syl.size());
  const double pause_prob = std::min(1.0, style.pause_rate * mean_len);
  for (std::size_t i = 0; i + 1 < syl.size(); ++i) {
    const double u = rng.Uniform();
    const double len = rng.Uniform(style.pause_min_ms, style.pause_max_ms) / 1000.0;
    if (u < pause_prob) syl[i].pause_after_s = len;
  }
  const std::uint64_t noise_seed = rng.NextU64();

  const double fs = sample_rate;
  const double tempo = style.tempo_factor;
  auto samples_of = [fs](double seconds) {
    return static_cast<std::size_t>(std::lround(seconds * fs));
  };

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.source_id = "synth";
  Rng noise(noise_seed);
  std::array<Resonator, 3> res{};
  std::array<double, 3> prev_formants{};
  for (int k = 0; k < 3; ++k) prev_formants[k] = speaker.resonator_freqs[k] * vowels[0][k];
  double phase = 0.0;
  double syl_scale = 1.0;
  for (const Syllable &s : syl) {
    const double stretch = tempo * s.factor;
    const std::size_t onset = samples_of(s.onset_s * stretch);
    const std::size_t nucleus = samples_of((s.base_s - s.onset_s) * stretch);
    const std::size_t len = onset + nucleus;
    std::array<double, 3> target{};
    for (int k = 0; k < 3; ++k)
      target[k] = std::min(speaker.resonator_freqs[k] * vowels[s.vowel][k], 0.45 * fs);
    // Consonant locus: lowered F1, F2/F3 pulled toward the speaker's base.
    std::array<double, 3> locus{};
    for (int k = 0; k < 3; ++k)
      locus[k] = speaker.resonator_freqs[k] * (k == 0 ? 0.55 : 0.9);
    const std::size_t closure = samples_of(kClosureS * stretch);
    const std::size_t release = std::min(nucleus / 2, samples_of(kReleaseS * stretch));
    std::vector<double> buf;
    buf.reserve(len);
    for (std::size_t n = 0; n < len; ++n) {
      const double t = static_cast<double>(n) / static_cast<double>(len);
      std::array<double, 3> f = target;
      double env = 1.0;
      if (n < closure) {
        f = locus;
        env = kConsonantLevel;
      } else if (n < onset) {
        const double g = static_cast<double>(n - closure) / static_cast<double>(onset - closure);
        const double smooth = g * g * (3.0 - 2.0 * g);
        for (int k = 0; k < 3; ++k) f[k] = locus[k] + (target[k] - locus[k]) * smooth;
        env = kConsonantLevel + (1.0 - kConsonantLevel) * g;
      } else {
        if (release > 0 && n + release >= len) {
          const double r = static_cast<double>(len - n) / static_cast<double>(release);
          env = kConsonantLevel + (1.0 - kConsonantLevel) * r;
        }
      }
      const double pitch =
          speaker.pitch_hz * (s.pitch_start + (s.pitch_end - s.pitch_start) * t);
      phase += pitch / fs;
      double excitation = 0.0;
      if (phase >= 1.0) {
        phase -= 1.0;
        excitation = 1.0;
      }
      excitation += kAspiration * noise.Gaussian();
      double y = excitation;
      for (int k = 0; k < 3; ++k) y = res[k].Step(y, f[k], speaker.bandwidths[k], fs);
      buf.push_back(env * y);
    }
    // Vowel loudness is set by the syllable gain, not by where the formants
    // happen to fall relative to the harmonics.
    double energy = 0.0;
    std::size_t count = 0;
    for (std::size_t n = onset; n + release < len; ++n, ++count) energy += buf[n] * buf[n];
    const double rms = count > 0 ? std::sqrt(energy / static_cast<double>(count)) : 0.0;
    syl_scale = rms > 0.0 ? s.gain / rms : 1.0;
    for (double v : buf) out.samples.push_back(syl_scale * v);
    prev_formants = target;
    const std::size_t pause = samples_of(s.pause_after_s * tempo);
    for (std::size_t n = 0; n < pause; ++n) {
      double y = 0.0;
      for (int k = 0; k < 3; ++k)
        y = res[k].Step(y, prev_formants[k], speaker.bandwidths[k], fs);
      out.samples.push_back(syl_scale * y);
    }
  }

  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? 0.5 / peak : 1.0;
  for (double &v : out.samples) v = v * scale + 1e-3 * noise.Gaussian();
  return out;
}

StretchRatios MeasureStretchRatios(const SyntheticSpeaker &speaker,
                                   const StyleSpec &style, double duration_s,
                                   std::uint64_t seed, double stretch,
                                   const FrontendConfig &cfg, int sample_rate) {
  StyleSpec stretched = style;
  stretched.tempo_factor = style.tempo_factor * stretch;
  const AudioBuffer a = SynthUtterance(speaker, style, duration_s, seed, sample_rate);
  const AudioBuffer b = SynthUtterance(speaker, stretched, duration_s, seed, sample_rate);
  FrontendConfig fixed = cfg;
  fixed.base_shift_ms = kFixedShiftMs;
  StretchRatios r;
  r.fixed_frames = ExtractMfcc(a, fixed).NumRows();
  r.fixed_frames_stretched = ExtractMfcc(b, fixed).NumRows();
  r.vfr_frames = VfrExtract(a, cfg).NumRows();
  r.vfr_frames_stretched = VfrExtract(b, cfg).NumRows();
  return r;
}

namespace {

struct UtteranceEmbeddings {
  EmbeddingVector orig;
  EmbeddingVector vfr;
};

UtteranceEmbeddings EmbedBoth(const AudioBuffer &audio, const FrontendConfig &cfg,
                              bool need_vfr) {
  FrontendConfig fixed = cfg;
  fixed.base_shift_ms = kFixedShiftMs;
  UtteranceEmbeddings e;
  e.orig = EmbedUtterance(ExtractMfcc(audio, fixed));
  if (need_vfr) e.vfr = EmbedUtterance(VfrExtract(audio, cfg));
  return e;
}

EmbeddingVector AverageEmbeddings(const std::vector<const EmbeddingVector *> &parts) {
  EmbeddingVector out = *parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p)
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += parts[p]->values[i];
  double norm = 0.0;
  for (double v : out.values) norm += v * v;
  norm = std::sqrt(norm);
  for (double &v : out.values) v /= norm;
  return out;
}

}  // namespace

ExperimentReport RunExperiment(int n_speakers, const std::string &enroll_style,
                               const std::string &test_style, AugmentConfig config,
                               std::uint64_t seed, const ExperimentOptions &opts) {
  if (n_speakers < 10) throw ValidationError("experiment needs at least 10 speakers");
  if (opts.tests_per_speaker < 1) throw ValidationError("tests_per_speaker must be >= 1");
  const StyleSpec enroll = StyleByName(enroll_style);
  const StyleSpec test = StyleByName(test_style);
  opts.frontend.Validate(opts.sample_rate);

  const bool need_vfr =
      config == AugmentConfig::kVfrNorm || config == AugmentConfig::kVfrNormAug;
  const bool multi = config == AugmentConfig::kMultiStyle && enroll_style != test_style;
  const auto n = static_cast<std::size_t>(n_speakers);
  const auto per = static_cast<std::size_t>(opts.tests_per_speaker);

  // Job layout: [enroll | enroll in test style (multi-style only) | tests].
  struct Job {
    std::size_t speaker;
    const StyleSpec *style;
    std::uint64_t content_seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < n; ++i) jobs.push_back({i, &enroll, MixSeed(seed, i, 1000)});
  if (multi)
    for (std::size_t i = 0; i < n; ++i) jobs.push_back({i, &test, MixSeed(seed, i, 1000)});
  const std::size_t test_offset = jobs.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < per; ++j) jobs.push_back({i, &test, MixSeed(seed, i, j)});

  std::vector<SyntheticSpeaker> speakers;
  for (std::size_t i = 0; i < n; ++i)
    speakers.push_back(MakeSpeaker(seed, static_cast<int>(i)));

  std::vector<UtteranceEmbeddings> emb(jobs.size());
  ParallelFor(jobs.size(), opts.threads, [&](std::size_t k) {
    const Job &job = jobs[k];
    const AudioBuffer audio = SynthUtterance(speakers[job.speaker], *job.style,
                                             opts.utterance_s, job.content_seed,
                                             opts.sample_rate);
    emb[k] = EmbedBoth(audio, opts.frontend, need_vfr);
  });

  std::vector<EmbeddingVector> enroll_models(n);
  for (std::size_t i = 0; i < n; ++i)
    enroll_models[i] = multi ? AverageEmbeddings({&emb[i].orig, &emb[n + i].orig})
                             : emb[i].orig;

  std::vector<double> tar, non;
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t k = test_offset; k < jobs.size(); ++k) {
      const UtteranceEmbeddings &t = emb[k];
      double score = 0.0;
      switch (config) {
        case AugmentConfig::kBaseline:
        case AugmentConfig::kMultiStyle:
          score = CosineScore(enroll_models[e], t.orig);
          break;
        case AugmentConfig::kVfrNorm:
          score = CosineScore(emb[e].vfr, t.vfr);
          break;
        case AugmentConfig::kVfrNormAug:
          score = std::max(CosineScore(emb[e].orig, t.orig), CosineScore(emb[e].vfr, t.vfr));
          break;
      }
      (jobs[k].speaker == e ? tar : non).push_back(score);
    }

  ExperimentReport report;
  report.config = AugmentConfigName(config);
  report.enroll_style = enroll_style;
  report.test_style = test_style;
  report.n_speakers = n_speakers;
  report.seed = seed;
  report.eer_percent = ComputeEer(tar, non).eer_percent;
  report.n_target = tar.size();
  report.n_nontarget = non.size();
  return report;
}

double MedianEer(const std::vector<ExperimentReport> &reports) {
  if (reports.empty()) throw ValidationError("median of no reports");
  std::vector<double> v;
  for (const ExperimentReport &r : reports) v.push_back(r.eer_percent);
  std::ranges::sort(v);
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string ReportToJson(const ExperimentReport &r, int indent) {
  nlohmann::ordered_json j;
  j["config"] = r.config;
  j["styles"] = {{"enroll", r.enroll_style}, {"test", r.test_style}};
  j["n_speakers"] = r.n_speakers;
  j["seed"] = r.seed;
  j["eer_percent"] = std::round(r.eer_percent * 1e6) / 1e6;
  j["n_target"] = r.n_target;
  j["n_nontarget"] = r.n_nontarget;
  return j.dump(indent);
}

}  // namespace vfrkit
