// src/augment.cc

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

#include "vfrkit/augment.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "vfrkit/audio.h"
#include "vfrkit/feature-io.h"
#include "vfrkit/parallel.h"
#include "vfrkit/vfr.h"

namespace vfrkit {

AugmentConfig ParseAugmentConfig(const std::string &name) {
  if (name == "baseline") return AugmentConfig::kBaseline;
  if (name == "vfr-norm") return AugmentConfig::kVfrNorm;
  if (name == "vfr-norm-aug") return AugmentConfig::kVfrNormAug;
  if (name == "multi-style") return AugmentConfig::kMultiStyle;
  if (name == "extrinsic")
    throw ValidationError(
        "config 'extrinsic' (noise, babble, music and reverberation augmentation) "
        "requires external noise and impulse-response corpora and is not supported");
  throw ValidationError("unknown augmentation config '" + name +
                        "' (expected baseline, vfr-norm, vfr-norm-aug, multi-style)");
}

std::string AugmentConfigName(AugmentConfig config) {
  switch (config) {
    case AugmentConfig::kBaseline: return "baseline";
    case AugmentConfig::kVfrNorm: return "vfr-norm";
    case AugmentConfig::kVfrNormAug: return "vfr-norm-aug";
    case AugmentConfig::kMultiStyle: return "multi-style";
  }
  return "unknown";
}

const char *VariantName(Variant v) { return v == Variant::kOrig ? "orig" : "vfr"; }

void CorpusManifest::Validate() const {
  std::set<std::string> ids;
  std::set<std::filesystem::path> paths;
  for (const ManifestEntry &e : entries) {
    if (e.utterance_id.empty() || e.speaker_id.empty() || e.style.empty())
      throw ValidationError("manifest: empty utterance, speaker or style field");
    if (!ids.insert(e.utterance_id).second)
      throw ValidationError("manifest: duplicate utterance id '" + e.utterance_id + "'");
    if (!paths.insert(e.audio_path.lexically_normal()).second)
      throw ValidationError("manifest: duplicate audio path '" + e.audio_path.string() + "'");
  }
}

CorpusManifest ReadManifest(std::istream &is, const std::filesystem::path &base_dir) {
  CorpusManifest m;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = SplitFields(line, ',');
    if (f.size() != 4)
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": expected 4 comma-separated fields");
    if (!header_seen) {
      header_seen = true;
      if (f[0] != "utterance_id" || f[1] != "speaker_id" || f[2] != "style" ||
          f[3] != "audio_path")
        throw ValidationError(
            "manifest: header must be utterance_id,speaker_id,style,audio_path");
      continue;
    }
    std::filesystem::path audio = f[3];
    if (audio.is_relative()) audio = base_dir / audio;
    m.entries.push_back({f[0], f[1], f[2], audio});
  }
  if (!header_seen) throw ValidationError("manifest: missing header");
  m.Validate();
  return m;
}

CorpusManifest ReadManifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest '" + path.string() + "'");
  return ReadManifest(in, path.parent_path());
}

void WriteManifest(std::ostream &os, const CorpusManifest &manifest) {
  os << "utterance_id,speaker_id,style,audio_path\n";
  for (const ManifestEntry &e : manifest.entries)
    os << e.utterance_id << ',' << e.speaker_id << ',' << e.style << ','
       << e.audio_path.generic_string() << '\n';
}

namespace {

PlanOutput MakeOutput(const ManifestEntry &e, Variant v) {
  PlanOutput out;
  out.utterance_id = v == Variant::kVfr ? e.utterance_id + "-vfr" : e.utterance_id;
  out.source_utterance_id = e.utterance_id;
  out.speaker_id = e.speaker_id;
  out.style = e.style;
  out.audio_path = e.audio_path;
  out.variant = v;
  out.feature_path = out.utterance_id + ".vfrf";
  return out;
}

}  // namespace

AugmentationPlan BuildPlan(const CorpusManifest &manifest, AugmentConfig config,
                           const std::optional<std::string> &style_filter) {
  manifest.Validate();
  if (config == AugmentConfig::kMultiStyle && style_filter)
    throw ValidationError("multi-style uses every style; do not pass a style filter");
  if (config != AugmentConfig::kMultiStyle && !style_filter)
    throw ValidationError(AugmentConfigName(config) + " requires a style filter");

  AugmentationPlan plan;
  plan.config = config;
  plan.input.set_label = manifest.set_label;
  for (const ManifestEntry &e : manifest.entries)
    if (!style_filter || e.style == *style_filter) plan.input.entries.push_back(e);
  if (plan.input.entries.empty())
    throw ValidationError("no manifest entries match style '" +
                          style_filter.value_or("") + "'");

  for (const ManifestEntry &e : plan.input.entries) {
    switch (config) {
      case AugmentConfig::kBaseline:
      case AugmentConfig::kMultiStyle:
        plan.outputs.push_back(MakeOutput(e, Variant::kOrig));
        break;
      case AugmentConfig::kVfrNorm:
        plan.outputs.push_back(MakeOutput(e, Variant::kVfr));
        break;
      case AugmentConfig::kVfrNormAug:
        plan.outputs.push_back(MakeOutput(e, Variant::kOrig));
        plan.outputs.push_back(MakeOutput(e, Variant::kVfr));
        break;
    }
  }
  return plan;
}

FeatureMatrix ExtractVariant(const std::filesystem::path &audio_path, Variant variant,
                             const FrontendConfig &cfg, int working_rate) {
  const AudioBuffer audio = Resample(ReadWav(audio_path), working_rate);
  if (variant == Variant::kVfr) return VfrExtract(audio, cfg);
  FrontendConfig fixed = cfg;
  fixed.base_shift_ms = kFixedShiftMs;
  return ExtractMfcc(audio, fixed);
}

PlanResult RunPlan(const AugmentationPlan &plan, const FrontendConfig &cfg,
                   const std::filesystem::path &out_dir, const RunOptions &opts) {
  cfg.Validate(opts.working_rate);
  std::filesystem::create_directories(out_dir);
  const std::size_t n = plan.outputs.size();
  std::vector<std::string> errors(n);
  ParallelFor(n, opts.threads, [&](std::size_t i) {
    const PlanOutput &o = plan.outputs[i];
    try {
      FeatureMatrix feats = ExtractVariant(o.audio_path, o.variant, cfg, opts.working_rate);
      WriteVfrf(out_dir / o.feature_path, feats);
    } catch (const std::exception &e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "extraction failed";
    }
  });

  PlanResult result;
  result.index_path = out_dir / "index.csv";
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty())
      result.written.push_back(plan.outputs[i]);
    else
      result.failures.push_back({plan.outputs[i].utterance_id, errors[i]});
  }
  std::ofstream index(result.index_path);
  if (!index) throw std::runtime_error("cannot write '" + result.index_path.string() + "'");
  index << "feature_path,utterance_id,speaker_id,style,variant\n";
  for (const PlanOutput &o : result.written)
    index << o.feature_path.generic_string() << ',' << o.utterance_id << ','
          << o.speaker_id << ',' << o.style << ',' << VariantName(o.variant) << '\n';
  return result;
}

}  // namespace vfrkit
