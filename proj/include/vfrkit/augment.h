// include/vfrkit/augment.h

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

#ifndef VFRKIT_AUGMENT_H_
#define VFRKIT_AUGMENT_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vfrkit/frontend.h"

namespace vfrkit {

// Development-set configurations for backend adaptation, with their sizes
// relative to X utterances of one style:
//   Baseline     X  original features, one style
//   VfrNorm      X  VFR-normalized features, one style
//   VfrNormAug   2X original plus VFR-normalized, one style
//   MultiStyle   all styles, original features (4X with four styles)
enum class AugmentConfig { kBaseline, kVfrNorm, kVfrNormAug, kMultiStyle };

/// Accepts baseline, vfr-norm, vfr-norm-aug, multi-style. "extrinsic"
/// (noise/reverberation augmentation) is recognised and rejected because it
/// needs external corpora.
AugmentConfig ParseAugmentConfig(const std::string &name);
std::string AugmentConfigName(AugmentConfig config);

enum class SetLabel { kDevelopment, kEnrollment, kTest };

struct ManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string style;
  std::filesystem::path audio_path;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  SetLabel set_label = SetLabel::kDevelopment;

  /// Unique utterance ids and distinct audio paths.
  void Validate() const;
};

/// CSV with header utterance_id,speaker_id,style,audio_path. Relative audio
/// paths are resolved against `base_dir`.
CorpusManifest ReadManifest(std::istream &is, const std::filesystem::path &base_dir);
CorpusManifest ReadManifest(const std::filesystem::path &path);
void WriteManifest(std::ostream &os, const CorpusManifest &manifest);

enum class Variant { kOrig, kVfr };
const char *VariantName(Variant v);

struct PlanOutput {
  std::filesystem::path feature_path;  // relative to the output directory
  std::string utterance_id;            // "-vfr" suffix for VFR variants
  std::string source_utterance_id;
  std::string speaker_id;
  std::string style;
  std::filesystem::path audio_path;
  Variant variant = Variant::kOrig;
};

struct AugmentationPlan {
  AugmentConfig config = AugmentConfig::kBaseline;
  CorpusManifest input;
  std::vector<PlanOutput> outputs;
};

/// Baseline/VfrNorm/VfrNormAug need a style filter; MultiStyle forbids one.
/// Throws if nothing survives the filter.
AugmentationPlan BuildPlan(const CorpusManifest &manifest, AugmentConfig config,
                           const std::optional<std::string> &style_filter);

struct EntryFailure {
  std::string utterance_id;
  std::string message;
};

struct PlanResult {
  std::vector<PlanOutput> written;
  std::vector<EntryFailure> failures;
  std::filesystem::path index_path;
};

struct RunOptions {
  int working_rate = 8000;
  int threads = 1;
};

/// Extracts every plan output into out_dir (orig: fixed 10 ms + CMN; vfr:
/// VFR extraction) and writes out_dir/index.csv listing the successful
/// outputs in plan order. Per-entry failures are collected, not thrown.
PlanResult RunPlan(const AugmentationPlan &plan, const FrontendConfig &cfg,
                   const std::filesystem::path &out_dir, const RunOptions &opts = {});

/// Loads audio, resamples to the working rate, and extracts one variant.
FeatureMatrix ExtractVariant(const std::filesystem::path &audio_path, Variant variant,
                             const FrontendConfig &cfg, int working_rate);

}  // namespace vfrkit

#endif  // VFRKIT_AUGMENT_H_
