// tools/vfrkit.cc

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

// vfrkit command line: feature extraction, variable frame rate analysis,
// development-set augmentation, scoring, and evaluation statistics.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vfrkit/audio.h"
#include "vfrkit/augment.h"
#include "vfrkit/eval.h"
#include "vfrkit/feature-io.h"
#include "vfrkit/frontend.h"
#include "vfrkit/toybench.h"
#include "vfrkit/vfr.h"

namespace fs = std::filesystem;
using namespace vfrkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartial = 2;

const std::string kVersion =
    "vfrkit 1.0.0 (VFRF format v" + std::to_string(kVfrfVersion) + ")";

struct Globals {
  int sample_rate = 8000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir;
};

// Relative output paths land under --output-dir when one is given.
fs::path OutputPath(const Globals &g, const std::string &path) {
  fs::path p(path);
  if (!g.output_dir.empty() && p.is_relative()) return fs::path(g.output_dir) / p;
  return p;
}

void EnsureParent(const fs::path &p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream OpenOutput(const fs::path &p) {
  EnsureParent(p);
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

AudioBuffer LoadAudio(const std::string &path, int rate) {
  return Resample(ReadWav(path), rate);
}

void CheckShift(double shift) {
  if (shift != kFixedShiftMs && shift != kOversampledShiftMs)
    throw ValidationError("--shift-ms must be 10 or 2.5");
}

EntropyDomain ParseDomain(const std::string &s) {
  if (s == "linear") return EntropyDomain::kLinear;
  if (s == "log") return EntropyDomain::kLog;
  throw ValidationError("--entropy-domain must be linear or log");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Variable frame rate speech front-end and speaker verification toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--sample-rate", g.sample_rate, "Working sample rate in Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Corpus-level worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--output-dir", g.output_dir,
                 "Directory for outputs; relative output paths resolve here");

  // extract
  std::string ex_in, ex_out;
  double ex_shift = kFixedShiftMs;
  bool ex_no_cmn = false, ex_csv = false;
  auto *extract = app.add_subcommand("extract", "Fixed-rate MFCC extraction to a VFRF file");
  extract->add_option("input", ex_in, "Input WAV")->required();
  extract->add_option("output", ex_out, "Output VFRF (or CSV with --csv)")->required();
  extract->add_option("--shift-ms", ex_shift, "Frame shift: 10 or 2.5")->capture_default_str();
  extract->add_flag("--no-cmn", ex_no_cmn, "Skip sliding cepstral mean normalization");
  extract->add_flag("--csv", ex_csv, "Write CSV text instead of VFRF");

  // vfr
  std::string vf_in, vf_out, vf_dump, vf_domain = "linear";
  bool vf_no_cmn = false, vf_csv = false;
  auto *vfr = app.add_subcommand("vfr", "Entropy-based variable frame rate MFCC extraction");
  vfr->add_option("input", vf_in, "Input WAV")->required();
  vfr->add_option("output", vf_out, "Output VFRF (or CSV with --csv)")->required();
  vfr->add_option("--dump-entropy", vf_dump,
                  "Write segment_index,start_ms,entropy_nats CSV with a T1/T2/T3 header");
  vfr->add_option("--entropy-domain", vf_domain, "Mel energies for entropy: linear or log")
      ->capture_default_str();
  vfr->add_flag("--no-cmn", vf_no_cmn, "Skip sliding cepstral mean normalization");
  vfr->add_flag("--csv", vf_csv, "Write CSV text instead of VFRF");

  // augment
  std::string au_manifest, au_config, au_style;
  auto *augment = app.add_subcommand(
      "augment",
      "Materialize a development set (baseline, vfr-norm, vfr-norm-aug, multi-style) "
      "into --output-dir with an index.csv");
  augment->add_option("--manifest", au_manifest,
                      "CSV utterance_id,speaker_id,style,audio_path")
      ->required();
  augment->add_option("--config", au_config, "baseline|vfr-norm|vfr-norm-aug|multi-style")
      ->required();
  augment->add_option("--style", au_style, "Style filter (not with multi-style)");

  // embed
  std::string em_in, em_out;
  auto *embed = app.add_subcommand(
      "embed", "Mean/std statistics embedding of a VFRF file, one line of text");
  embed->add_option("input", em_in, "Input VFRF")->required();
  embed->add_option("-o,--output", em_out, "Output file (default: standard output)");

  // score
  std::string sc_trials, sc_dir, sc_out;
  auto *score = app.add_subcommand(
      "score", "Cosine scoring; embeddings are read from <dir>/<utterance_id>.emb");
  score->add_option("--trials", sc_trials, "enroll<TAB>test<TAB>target|nontarget")
      ->required();
  score->add_option("--embeddings", sc_dir, "Directory of .emb files")->required();
  score->add_option("-o,--output", sc_out, "Scores TSV (default: standard output)");

  // eer
  std::string ee_in, ee_det;
  auto *eer = app.add_subcommand("eer", "Equal error rate of a scores file");
  eer->add_option("scores", ee_in, "Scores TSV")->required();
  eer->add_option("--det", ee_det, "Write threshold,far,frr CSV");

  // mcnemar
  std::string mc_a, mc_b;
  auto *mcnemar = app.add_subcommand(
      "mcnemar", "McNemar test on per-trial decisions at each system's EER threshold");
  mcnemar->add_option("--scores-a", mc_a, "Scores of system A")->required();
  mcnemar->add_option("--scores-b", mc_b, "Scores of system B (same trials, same order)")
      ->required();

  // bench
  int be_speakers = 20, be_seeds = 5, be_tests = 3;
  double be_duration = 3.0;
  std::string be_enroll = "neutral", be_test = "slow", be_config = "baseline";
  auto *bench = app.add_subcommand(
      "bench", "Synthetic speaker verification benchmark; prints a JSON report");
  bench->add_option("--speakers", be_speakers, "Number of synthetic speakers (>= 10)")
      ->capture_default_str();
  bench->add_option("--enroll-style", be_enroll, "neutral|slow|fast|hesitant")
      ->capture_default_str();
  bench->add_option("--test-style", be_test, "neutral|slow|fast|hesitant")
      ->capture_default_str();
  bench->add_option("--config", be_config, "baseline|vfr-norm|vfr-norm-aug|multi-style")
      ->capture_default_str();
  bench->add_option("--seeds", be_seeds, "Number of seeds, starting at --seed")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--duration", be_duration, "Utterance duration in seconds (>= 1)")
      ->capture_default_str();
  bench->add_option("--tests-per-speaker", be_tests, "Test utterances per speaker")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    FrontendConfig cfg;

    if (*extract) {
      CheckShift(ex_shift);
      cfg.base_shift_ms = ex_shift;
      cfg.apply_cmn = !ex_no_cmn;
      cfg.Validate(g.sample_rate);
      const FeatureMatrix feats = ExtractMfcc(LoadAudio(ex_in, g.sample_rate), cfg);
      const fs::path out = OutputPath(g, ex_out);
      if (ex_csv) {
        std::ofstream os = OpenOutput(out);
        WriteFeatureCsv(os, feats);
      } else {
        EnsureParent(out);
        WriteVfrf(out, feats);
      }
      std::cerr << "extract: " << ex_in << " -> " << out.string() << " (" << feats.NumRows()
                << " frames)\n";
    } else if (*vfr) {
      const EntropyDomain domain = ParseDomain(vf_domain);
      cfg.apply_cmn = !vf_no_cmn;
      cfg.Validate(g.sample_rate);
      const VfrAnalysis a = AnalyzeVfr(LoadAudio(vf_in, g.sample_rate), cfg, {domain});
      const fs::path out = OutputPath(g, vf_out);
      if (vf_csv) {
        std::ofstream os = OpenOutput(out);
        WriteFeatureCsv(os, a.features);
      } else {
        EnsureParent(out);
        WriteVfrf(out, a.features);
      }
      if (!vf_dump.empty()) {
        std::ofstream os = OpenOutput(OutputPath(g, vf_dump));
        WriteEntropyCsv(os, a.curve, a.thresholds, kOversampledShiftMs);
      }
      std::cerr << "vfr: " << vf_in << " -> " << out.string() << " (" << a.features.NumRows()
                << " of " << a.num_oversampled << " dense frames)\n";
    } else if (*augment) {
      if (g.output_dir.empty()) throw ValidationError("augment requires --output-dir");
      const AugmentConfig config = ParseAugmentConfig(au_config);
      std::optional<std::string> style;
      if (!au_style.empty()) style = au_style;
      const AugmentationPlan plan = BuildPlan(ReadManifest(au_manifest), config, style);
      const PlanResult result =
          RunPlan(plan, cfg, g.output_dir, {g.sample_rate, g.threads});
      for (const PlanOutput &o : result.written)
        std::cerr << "augment: " << o.utterance_id << " -> " << o.feature_path.string()
                  << '\n';
      for (const EntryFailure &f : result.failures)
        std::cerr << "augment: FAILED " << f.utterance_id << ": " << f.message << '\n';
      std::cout << "index=" << result.index_path.string()
                << " written=" << result.written.size()
                << " failed=" << result.failures.size() << '\n';
      if (!result.failures.empty()) return kExitPartial;
    } else if (*embed) {
      const EmbeddingVector emb = EmbedUtterance(ReadVfrf(em_in));
      if (em_out.empty()) {
        WriteEmbedding(std::cout, emb);
      } else {
        std::ofstream os = OpenOutput(OutputPath(g, em_out));
        WriteEmbedding(os, emb);
      }
    } else if (*score) {
      const std::vector<Trial> trials = ReadTrials(fs::path(sc_trials));
      std::map<std::string, EmbeddingVector> embeddings;
      for (const Trial &t : trials)
        for (const std::string &id : {t.enroll_id, t.test_id})
          if (!embeddings.contains(id))
            embeddings.emplace(id, ReadEmbedding(fs::path(sc_dir) / (id + ".emb")));
      const ScoreSet scores = ScoreTrials(trials, embeddings);
      if (sc_out.empty()) {
        WriteScores(std::cout, scores);
      } else {
        std::ofstream os = OpenOutput(OutputPath(g, sc_out));
        WriteScores(os, scores);
      }
    } else if (*eer) {
      const EerReport report = ComputeEer(ReadScores(fs::path(ee_in)));
      if (!ee_det.empty()) {
        std::ofstream os = OpenOutput(OutputPath(g, ee_det));
        WriteDetCsv(os, report);
      }
      std::cout << FormatEerLine(report) << '\n';
    } else if (*mcnemar) {
      const McNemarReport report =
          McNemarFromScores(ReadScores(fs::path(mc_a)), ReadScores(fs::path(mc_b)));
      WriteMcNemarReport(std::cout, report);
    } else if (*bench) {
      const AugmentConfig config = ParseAugmentConfig(be_config);
      StyleByName(be_enroll);
      StyleByName(be_test);
      if (be_speakers < 10) throw ValidationError("--speakers must be >= 10");
      if (!(be_duration >= 1.0)) throw ValidationError("--duration must be >= 1");
      ExperimentOptions opts;
      opts.utterance_s = be_duration;
      opts.tests_per_speaker = be_tests;
      opts.sample_rate = g.sample_rate;
      opts.threads = g.threads;
      std::vector<ExperimentReport> reports;
      nlohmann::ordered_json j;
      j["config"] = be_config;
      j["styles"] = {{"enroll", be_enroll}, {"test", be_test}};
      j["n_speakers"] = be_speakers;
      j["runs"] = nlohmann::json::array();
      for (int k = 0; k < be_seeds; ++k) {
        const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(k);
        reports.push_back(RunExperiment(be_speakers, be_enroll, be_test, config, seed, opts));
        j["runs"].push_back(nlohmann::ordered_json::parse(ReportToJson(reports.back())));
        std::cerr << "bench: seed " << seed << " EER="
                  << FormatFixed(reports.back().eer_percent, 2) << "%\n";
      }
      j["median_eer_percent"] = std::round(MedianEer(reports) * 1e6) / 1e6;
      const std::string text = j.dump(2);
      std::cout << text << '\n';
      if (!g.output_dir.empty()) {
        std::ofstream os = OpenOutput(fs::path(g.output_dir) / "report.json");
        os << text << '\n';
      }
    }
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
