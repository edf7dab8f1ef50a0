// tests/acceptance-test.cc

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "test-util.h"
#include "vfrkit/audio.h"
#include "vfrkit/common.h"
#include "vfrkit/eval.h"
#include "vfrkit/feature-io.h"
#include "vfrkit/toybench.h"
#include "vfrkit/vfr.h"

using namespace vfrkit;
namespace fs = std::filesystem;
using vfrkit::testing::ReadBytes;
using vfrkit::testing::RunCommand;
using vfrkit::testing::TempDir;
using vfrkit::testing::WriteText;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void Criterion(const std::string &name, double max_seconds,
               const std::function<Outcome()> &body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (max_seconds > 0 && secs >= max_seconds) {
    o.pass = false;
    o.detail += "; runtime over " + FormatFixed(max_seconds, 0) + " s";
  }
  if (!o.pass) ++g_failures;
  std::printf("%s %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string Num(double v, int digits = 6) { return FormatFixed(v, digits); }

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

EntropyCurve CurveOf(const std::vector<double> &values) {
  EntropyCurve c;
  c.values = values;
  for (std::size_t i = 0; i < values.size(); ++i)
    c.segment_start_indices.push_back(i * kEntropyHopRows);
  return c;
}

std::vector<std::size_t> Range(std::size_t stop, std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stop; i += step) out.push_back(i);
  return out;
}

// Brute-force EER over every distinct-score midpoint.
double OracleEer(const std::vector<double> &tar, const std::vector<double> &non) {
  std::vector<double> all = tar;
  all.insert(all.end(), non.begin(), non.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> th = {all.front()};
  for (std::size_t i = 1; i < all.size(); ++i) th.push_back((all[i - 1] + all[i]) / 2);
  th.push_back(all.back() + 1.0);
  double prev_far = 0, prev_frr = 0;
  for (std::size_t j = 0; j < th.size(); ++j) {
    double fa = 0, fr = 0;
    for (double s : non) fa += s >= th[j];
    for (double s : tar) fr += s < th[j];
    const double far = fa / non.size(), frr = fr / tar.size();
    if (j > 0 && far - frr <= 0) {
      const double di = prev_far - prev_frr, dj = far - frr;
      return 100.0 * (prev_far + di / (di - dj) * (far - prev_far));
    }
    prev_far = far;
    prev_frr = frr;
  }
  return -1.0;
}

double OracleMcNemar(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  std::vector<std::uint64_t> row = {1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next(i + 1, 1);
    for (int k = 1; k < i; ++k) next[k] = row[k - 1] + row[k];
    row = next;
  }
  std::uint64_t tail = 0;
  for (int k = std::max(b, c); k <= n; ++k) tail += row[k];
  return std::min(1.0, 2.0 * static_cast<double>(tail) / std::ldexp(1.0, n));
}

Outcome EntropyFormula() {
  const double h = EntropyFromTrace(23, 1.0);
  const double expected = 23 * std::log(std::sqrt(2 * std::numbers::pi));
  Rng rng(1);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Matrix x(12, 23);
    for (double &v : x.Data()) v = rng.Uniform(0.0, 5.0);
    const double c = std::exp(rng.Uniform(-3.0, 3.0));
    Matrix cx = x;
    for (double &v : cx.Data()) v *= c;
    worst = std::max(worst,
                     std::abs(WindowEntropy(cx) - WindowEntropy(x) - 2 * std::log(c)));
  }
  const bool ok = std::abs(h - 21.135586) <= 1e-6 && std::abs(h - expected) < 1e-12 &&
                  worst <= 1e-9;
  return {ok, "H(K=23,tr=1)=" + Num(h) + " max scaling-law error=" +
                  Sci(worst)};
}

Outcome Thresholds() {
  const ThresholdSet th = ThresholdsFromStats(10.0, 4.0, 2.0);
  bool ok = std::abs(th.t1 - 8.2) < 1e-12 && std::abs(th.t2 - 5.2) < 1e-12 &&
            std::abs(th.t3 - 3.0) < 1e-12;
  Rng rng(2);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(1 + rng.Below(100));
    const double spread = std::exp(rng.Uniform(-8.0, 3.0));
    for (double &x : v) x = 20.0 + spread * rng.Gaussian();
    if (rng.Below(10) == 0) std::fill(v.begin(), v.end(), v[0]);
    const ThresholdSet s = ComputeThresholds(CurveOf(v));
    bad += !(s.t1 >= s.t2 && s.t2 >= s.t3);
  }
  ok = ok && bad == 0;
  return {ok, "(T1,T2,T3)=(" + Num(th.t1) + "," + Num(th.t2) + "," + Num(th.t3) +
                  ") ordering violations=" + std::to_string(bad) + "/1000"};
}

Outcome FramePlanCheck() {
  const FramePlan uniform =
      BuildFramePlan(CurveOf({1, 1, 1, 1, 1}), ThresholdsFromStats(1, 1, 1), 41);
  const ThresholdSet th = ThresholdsFromStats(10.0, 4.0, 2.0);
  const FramePlan walk = BuildFramePlan(CurveOf({9.0}), th, 12);
  const FramePlan carry = BuildFramePlan(CurveOf({9.0, 2.5}), th, 17);
  int examples = 0;
  examples += uniform.picked_indices == Range(41, 4);
  examples += walk.picked_indices == std::vector<std::size_t>{0, 2, 4, 6, 8, 10};
  examples += carry.picked_indices == std::vector<std::size_t>{0, 2, 4, 6, 11, 16};

  Rng rng(3);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(1 + rng.Below(80));
    for (double &x : v) x = rng.Uniform(0.0, 25.0);
    const std::size_t n = 6 * (v.size() - 1) + 12;
    const EntropyCurve c = CurveOf(v);
    const std::vector<std::size_t> p = BuildFramePlan(c, ComputeThresholds(c), n).picked_indices;
    bool good = !p.empty() && p.front() == 0 && p.size() >= (n + 4) / 5 &&
                p.size() <= (n + 1) / 2;
    for (std::size_t i = 1; good && i < p.size(); ++i)
      good = p[i] - p[i - 1] >= 2 && p[i] - p[i - 1] <= 5;
    bad += !good;
  }
  return {examples == 3 && bad == 0, "worked examples " + std::to_string(examples) +
                                         "/3, property violations " +
                                         std::to_string(bad) + "/1000"};
}

Outcome FixedRateEquivalence() {
  Rng rng(4);
  const ThresholdSet th = ThresholdsFromStats(20.0, 12.0, 4.0);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng.Below(70));
    for (double &x : v) x = rng.Uniform(th.t3, th.t2);
    v[0] = th.t3;  // the closed end of the interval
    const std::size_t n = 6 * (v.size() - 1) + 12 + rng.Below(6);
    bad += BuildFramePlan(CurveOf(v), th, n).picked_indices != Range(n, 4);
  }
  // A flat curve from real audio takes the same path.
  AudioBuffer tone;
  tone.sample_rate = 8000;
  for (int i = 0; i < 8000; ++i)
    tone.samples.push_back(0.3 * std::sin(2 * std::numbers::pi * 400.0 * i / 8000.0));
  const VfrAnalysis an = AnalyzeVfr(tone, FrontendConfig{});
  const bool tone_ok = an.plan.picked_indices == Range(an.num_oversampled, 4);
  return {bad == 0 && tone_ok, "curves not on the 4-row grid " + std::to_string(bad) +
                                   "/200, stationary tone " + (tone_ok ? "ok" : "off-grid")};
}

Outcome Eer() {
  const double hand = ComputeEer(std::vector<double>{0.9, 0.7, 0.4},
                                 std::vector<double>{0.8, 0.3, 0.1})
                          .eer_percent;
  Rng rng(5);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> tar(2 + rng.Below(199)), non(2 + rng.Below(199));
    const double sep = rng.Uniform(-1.0, 3.0);
    const bool ties = rng.Below(3) == 0;
    for (double &s : tar) s = ties ? std::round(4 * (rng.Gaussian() + sep)) : rng.Gaussian() + sep;
    for (double &s : non) s = ties ? std::round(4 * rng.Gaussian()) : rng.Gaussian();
    worst = std::max(worst, std::abs(ComputeEer(tar, non).eer_percent - OracleEer(tar, non)));
  }
  const bool ok = std::abs(hand - 100.0 / 3.0) < 1e-9 && worst <= 1e-9;
  return {ok, "hand case " + Num(hand, 3) + "%, max |EER - oracle| over 500 sets " +
                  Sci(worst)};
}

Outcome McNemar() {
  double worst = 0.0;
  for (int b = 0; b <= 30; ++b)
    for (int c = 0; b + c <= 30; ++c)
      worst = std::max(worst, std::abs(McNemarFromCounts(b, c).p_value - OracleMcNemar(b, c)));
  const double hand = McNemarFromCounts(10, 2).p_value;
  const bool ok = worst <= 1e-12 && std::abs(hand - 158.0 / 4096.0) <= 1e-12;
  return {ok, "p(10,2)=" + Num(hand) + " (158/4096=" + Num(158.0 / 4096.0) +
                  "), max |p - oracle| for b+c<=30 " + Sci(worst)};
}

Outcome FrameCountNormalization() {
  const FrontendConfig cfg = BenchFrontend();
  const int n = 100;
  int below_measured = 0, below_nominal = 0;
  double fixed_sum = 0.0, vfr_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const StretchRatios r = MeasureStretchRatios(MakeSpeaker(1, i), StyleByName("neutral"),
                                                 5.0, 1000 + i, 1.5, cfg);
    below_measured += r.VfrRatio() < r.FixedRatio();
    below_nominal += r.VfrRatio() < 1.5;
    fixed_sum += r.FixedRatio();
    vfr_sum += r.VfrRatio();
  }
  return {below_measured >= 90,
          "VFR ratio below the fixed-rate ratio in " + std::to_string(below_measured) + "/" +
              std::to_string(n) + " (below 1.5: " + std::to_string(below_nominal) +
              "), mean fixed ratio " + Num(fixed_sum / n, 3) + ", mean VFR ratio " +
              Num(vfr_sum / n, 3)};
}

Outcome Directional() {
  ExperimentOptions opts;
  opts.threads = 4;
  const int speakers = 40;
  auto median = [&](AugmentConfig config, const char *test_style) {
    std::vector<ExperimentReport> r;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      r.push_back(RunExperiment(speakers, "neutral", test_style, config, seed, opts));
    return MedianEer(r);
  };
  const double matched = median(AugmentConfig::kBaseline, "neutral");
  const double mismatched = median(AugmentConfig::kBaseline, "slow");
  const double aug = median(AugmentConfig::kVfrNormAug, "slow");
  const bool ok = mismatched >= matched && aug <= mismatched;
  return {ok, std::to_string(speakers) + " speakers, seeds 1-5: baseline matched " +
                  Num(matched, 2) + "%, baseline mismatched " + Num(mismatched, 2) +
                  "%, vfr-norm-aug mismatched " + Num(aug, 2) + "%"};
}

Outcome FormatRoundTrip() {
  TempDir dir("accept-io");
  Rng rng(8);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    FeatureMatrix f;
    const std::size_t rows = rng.Below(300), dim = 1 + rng.Below(40);
    f.rows = Matrix(rows, dim);
    for (double &v : f.rows.Data())
      v = static_cast<float>(rng.Gaussian() * std::exp(rng.Uniform(-10, 10)));
    double ts = 12.5;
    for (std::size_t i = 0; i < rows; ++i, ts += rng.Uniform(0.1, 12.5))
      f.timestamps_ms.push_back(ts);
    f.meta.vfr_applied = rng.Below(2) == 1;
    f.meta.cmn_applied = rng.Below(2) == 1;
    const fs::path a = dir / "a.vfrf", b = dir / "b.vfrf";
    WriteVfrf(a, f);
    const FeatureMatrix g = ReadVfrf(a);
    WriteVfrf(b, g);
    bool same = ReadBytes(a) == ReadBytes(b) && g.rows.Data() == f.rows.Data() &&
                g.timestamps_ms == f.timestamps_ms;
    bad += !same;
  }
  return {bad == 0, "mismatched round trips " + std::to_string(bad) + "/100"};
}

// Synthesizes a small corpus and runs augment, embed, score, eer and
// mcnemar through the command-line tool. Returns every output file.
std::map<std::string, std::vector<unsigned char>> RunPipeline(const fs::path &root,
                                                              const std::string &threads) {
  fs::create_directories(root / "wav");
  std::ostringstream manifest;
  manifest << "utterance_id,speaker_id,style,audio_path\n";
  std::ostringstream trials;
  for (int s = 0; s < 4; ++s) {
    const SyntheticSpeaker spk = MakeSpeaker(77, s);
    for (int u = 0; u < 2; ++u) {
      const std::string id = "s" + std::to_string(s) + "u" + std::to_string(u);
      WriteWav(root / "wav" / (id + ".wav"),
               SynthUtterance(spk, StyleByName("neutral"), 1.5, 100 * s + u));
      manifest << id << ",s" << s << ",neutral,wav/" << id << ".wav\n";
    }
  }
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t)
      trials << "s" << s << "u0\ts" << t << "u1\t" << (s == t ? "target" : "nontarget") << '\n';
  WriteText(root / "manifest.csv", manifest.str());
  WriteText(root / "trials.tsv", trials.str());

  auto run = [&](std::vector<std::string> args) {
    const auto r = RunCommand(VFRKIT_CLI, args, root);
    if (r.exit_code != 0) throw std::runtime_error("cli failed: " + r.err);
    return r.out;
  };
  run({"--threads", threads, "--output-dir", (root / "feats").string(), "augment",
       "--manifest", (root / "manifest.csv").string(), "--config", "vfr-norm-aug", "--style",
       "neutral"});
  for (const char *variant : {"", "-vfr"}) {
    const fs::path emb = root / (std::string("emb") + variant);
    fs::create_directories(emb);
    for (int s = 0; s < 4; ++s)
      for (int u = 0; u < 2; ++u) {
        const std::string id = "s" + std::to_string(s) + "u" + std::to_string(u);
        run({"embed", (root / "feats" / (id + variant + ".vfrf")).string(), "-o",
             (emb / (id + ".emb")).string()});
      }
    run({"score", "--trials", (root / "trials.tsv").string(), "--embeddings", emb.string(),
         "-o", (root / (std::string("scores") + variant + ".tsv")).string()});
    WriteText(root / (std::string("eer") + variant + ".txt"),
              run({"eer", (root / (std::string("scores") + variant + ".tsv")).string(),
                   "--det", (root / (std::string("det") + variant + ".csv")).string()}));
  }
  WriteText(root / "mcnemar.txt",
            run({"mcnemar", "--scores-a", (root / "scores.tsv").string(), "--scores-b",
                 (root / "scores-vfr.tsv").string()}));
  run({"vfr", "--dump-entropy", (root / "entropy.csv").string(),
       (root / "wav" / "s0u0.wav").string(), (root / "s0u0-direct.vfrf").string()});

  std::map<std::string, std::vector<unsigned char>> files;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename().string().rfind("run", 0) != 0)
      files[fs::relative(e.path(), root).generic_string()] = ReadBytes(e.path());
  return files;
}

Outcome Determinism() {
  TempDir a("accept-det"), b("accept-det");
  const auto first = RunPipeline(a.path(), "1");
  const auto second = RunPipeline(b.path(), "3");
  int differing = 0;
  for (const auto &[name, bytes] : first) {
    const auto it = second.find(name);
    differing += it == second.end() || it->second != bytes;
  }
  differing += static_cast<int>(second.size()) - static_cast<int>(first.size());
  return {differing == 0 && first.size() > 40,
          std::to_string(first.size()) + " output files compared, " +
              std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  Criterion("entropy-formula", 1.0, EntropyFormula);
  Criterion("thresholds", 1.0, Thresholds);
  Criterion("frame-plan", 5.0, FramePlanCheck);
  Criterion("fixed-rate-equivalence", 0.0, FixedRateEquivalence);
  Criterion("eer", 10.0, Eer);
  Criterion("mcnemar", 5.0, McNemar);
  Criterion("frame-count-normalization", 120.0, FrameCountNormalization);
  Criterion("directional-replication", 600.0, Directional);
  Criterion("vfrf-round-trip", 5.0, FormatRoundTrip);
  Criterion("determinism", 0.0, Determinism);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
