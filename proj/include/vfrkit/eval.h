// include/vfrkit/eval.h

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

#ifndef VFRKIT_EVAL_H_
#define VFRKIT_EVAL_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vfrkit/frontend.h"

namespace vfrkit {

/// Per-dimension mean followed by per-dimension population standard
/// deviation, scaled to unit Euclidean norm. A simple stand-in for a
/// learned speaker embedding.
struct EmbeddingVector {
  std::vector<double> values;
  std::string utterance_id;
};

EmbeddingVector EmbedUtterance(const FeatureMatrix &feats);

/// Dot product of two unit-norm embeddings.
double CosineScore(const EmbeddingVector &a, const EmbeddingVector &b);

/// Text form: space-separated values, 17 significant digits, one line.
void WriteEmbedding(std::ostream &os, const EmbeddingVector &emb);
EmbeddingVector ReadEmbedding(const std::filesystem::path &path);

enum class TrialLabel { kTarget, kNontarget };

struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kNontarget;
};

struct ScoreRecord {
  std::string enroll_id;
  std::string test_id;
  double score = 0.0;
  TrialLabel label = TrialLabel::kNontarget;
};

using ScoreSet = std::vector<ScoreRecord>;

/// Trials: enroll<TAB>test<TAB>target|nontarget.
std::vector<Trial> ReadTrials(std::istream &is);
std::vector<Trial> ReadTrials(const std::filesystem::path &path);
/// Scores: trial fields plus <TAB>score, six decimals on output.
ScoreSet ReadScores(std::istream &is);
ScoreSet ReadScores(const std::filesystem::path &path);
void WriteScores(std::ostream &os, const ScoreSet &scores);

/// Scores every trial by cosine similarity. Throws if an id is unknown.
ScoreSet ScoreTrials(std::span<const Trial> trials,
                     const std::map<std::string, EmbeddingVector> &embeddings);

struct OperatingPoint {
  double threshold;
  double far;  // fraction of nontargets with score >= threshold
  double frr;  // fraction of targets with score < threshold
};

struct EerReport {
  double eer_percent = 0.0;
  double threshold = 0.0;
  std::vector<OperatingPoint> far_frr_curve;
};

/// Operating points at the lowest score, at every midpoint between distinct
/// adjacent scores, and just above the highest score; the EER is the
/// linearly interpolated FAR/FRR crossing between adjacent points.
EerReport ComputeEer(const ScoreSet &scores);
EerReport ComputeEer(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores);

/// EER=<percent, 2 decimals> THRESH=<6 decimals>
std::string FormatEerLine(const EerReport &report);
/// threshold,far,frr with a header row.
void WriteDetCsv(std::ostream &os, const EerReport &report);

inline constexpr double kSignificanceLevels[] = {0.05, 0.01, 0.005};
inline constexpr int kExactMcNemarLimit = 100;

struct McNemarReport {
  long long b = 0;  // A wrong, B right
  long long c = 0;  // A right, B wrong
  double p_value = 1.0;
  bool exact = true;
  std::vector<double> significant_at;
};

/// Exact two-sided binomial test for b + c <= 100, continuity-corrected
/// chi-square with one degree of freedom above that. b + c = 0 gives p = 1.
McNemarReport McNemarFromCounts(long long b, long long c);
McNemarReport McNemarTest(std::span<const bool> correct_a,
                          std::span<const bool> correct_b);

/// Per-trial correctness at each system's own EER threshold: accept when
/// score >= threshold, correct when acceptance matches the label.
std::vector<bool> DecisionsAtEer(const ScoreSet &scores);
/// Requires both sets to list the same trials in the same order.
McNemarReport McNemarFromScores(const ScoreSet &a, const ScoreSet &b);

inline constexpr const char *kMcNemarPairing =
    "per-trial correctness at each system's own EER threshold";

void WriteMcNemarReport(std::ostream &os, const McNemarReport &report);

}  // namespace vfrkit

#endif  // VFRKIT_EVAL_H_
