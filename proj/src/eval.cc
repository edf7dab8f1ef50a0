// src/eval.cc

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

#include "vfrkit/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace vfrkit {

EmbeddingVector EmbedUtterance(const FeatureMatrix &feats) {
  const std::size_t n = feats.NumRows();
  if (n < 2) throw ValidationError("embedding needs at least two feature rows");
  const std::size_t dim = feats.Dim();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += feats.rows(i, d);
  for (double &m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      const double dev = feats.rows(i, d) - mean[d];
      var[d] += dev * dev;
    }
  EmbeddingVector emb;
  emb.utterance_id = feats.meta.source_id;
  emb.values = mean;
  for (double v : var) emb.values.push_back(std::sqrt(v / static_cast<double>(n)));
  double norm = 0.0;
  for (double v : emb.values) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0))
    throw ValidationError("embedding of '" + emb.utterance_id + "' has zero norm");
  for (double &v : emb.values) v /= norm;
  return emb;
}

double CosineScore(const EmbeddingVector &a, const EmbeddingVector &b) {
  if (a.values.size() != b.values.size())
    throw ValidationError("embedding dimensions differ: " + a.utterance_id + " vs " +
                          b.utterance_id);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
  return acc;
}

void WriteEmbedding(std::ostream &os, const EmbeddingVector &emb) {
  for (std::size_t i = 0; i < emb.values.size(); ++i) {
    if (i) os << ' ';
    os << FormatSignificant(emb.values[i], 17);
  }
  os << '\n';
}

EmbeddingVector ReadEmbedding(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding '" + path.string() + "'");
  EmbeddingVector emb;
  emb.utterance_id = path.stem().string();
  std::string token;
  while (in >> token) emb.values.push_back(ParseDouble(token));
  if (emb.values.empty())
    throw ValidationError("empty embedding file '" + path.string() + "'");
  return emb;
}

namespace {

TrialLabel ParseLabel(const std::string &s, std::size_t line_no) {
  if (s == "target") return TrialLabel::kTarget;
  if (s == "nontarget") return TrialLabel::kNontarget;
  throw ValidationError("line " + std::to_string(line_no) + ": bad label '" + s + "'");
}

const char *LabelName(TrialLabel l) {
  return l == TrialLabel::kTarget ? "target" : "nontarget";
}

template <typename Fn>
void ForEachRecord(std::istream &is, std::size_t expected_fields, Fn &&fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = SplitFields(line, '\t');
    if (f.size() != expected_fields)
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected_fields) + " tab-separated fields");
    fn(f, line_no);
  }
}

std::ifstream OpenOrThrow(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::vector<Trial> ReadTrials(std::istream &is) {
  std::vector<Trial> out;
  ForEachRecord(is, 3, [&](const std::vector<std::string> &f, std::size_t ln) {
    out.push_back({f[0], f[1], ParseLabel(f[2], ln)});
  });
  return out;
}

std::vector<Trial> ReadTrials(const std::filesystem::path &path) {
  std::ifstream in = OpenOrThrow(path);
  return ReadTrials(in);
}

ScoreSet ReadScores(std::istream &is) {
  ScoreSet out;
  ForEachRecord(is, 4, [&](const std::vector<std::string> &f, std::size_t ln) {
    out.push_back({f[0], f[1], ParseDouble(f[3]), ParseLabel(f[2], ln)});
  });
  return out;
}

ScoreSet ReadScores(const std::filesystem::path &path) {
  std::ifstream in = OpenOrThrow(path);
  return ReadScores(in);
}

void WriteScores(std::ostream &os, const ScoreSet &scores) {
  for (const ScoreRecord &r : scores)
    os << r.enroll_id << '\t' << r.test_id << '\t' << LabelName(r.label) << '\t'
       << FormatFixed(r.score, 6) << '\n';
}

ScoreSet ScoreTrials(std::span<const Trial> trials,
                     const std::map<std::string, EmbeddingVector> &embeddings) {
  ScoreSet out;
  out.reserve(trials.size());
  auto lookup = [&](const std::string &id) -> const EmbeddingVector & {
    auto it = embeddings.find(id);
    if (it == embeddings.end()) throw ValidationError("unknown utterance id '" + id + "'");
    return it->second;
  };
  for (const Trial &t : trials)
    out.push_back({t.enroll_id, t.test_id,
                   CosineScore(lookup(t.enroll_id), lookup(t.test_id)), t.label});
  return out;
}

EerReport ComputeEer(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw ValidationError("EER needs at least one target and one nontarget score");
  std::vector<double> tar(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  for (double s : tar)
    if (!std::isfinite(s)) throw ValidationError("non-finite score");
  for (double s : non)
    if (!std::isfinite(s)) throw ValidationError("non-finite score");
  std::ranges::sort(tar);
  std::ranges::sort(non);

  std::vector<double> distinct;
  distinct.reserve(tar.size() + non.size());
  std::ranges::merge(tar, non, std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> thresholds;
  thresholds.reserve(distinct.size() + 1);
  thresholds.push_back(distinct.front());
  for (std::size_t i = 1; i < distinct.size(); ++i)
    thresholds.push_back(0.5 * (distinct[i - 1] + distinct[i]));
  thresholds.push_back(
      std::nextafter(distinct.back(), std::numeric_limits<double>::infinity()));

  EerReport report;
  report.far_frr_curve.reserve(thresholds.size());
  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  for (double t : thresholds) {
    const auto tar_below = std::lower_bound(tar.begin(), tar.end(), t) - tar.begin();
    const auto non_below = std::lower_bound(non.begin(), non.end(), t) - non.begin();
    report.far_frr_curve.push_back(
        {t, (nn - static_cast<double>(non_below)) / nn, static_cast<double>(tar_below) / nt});
  }

  const auto &pts = report.far_frr_curve;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double dj = pts[j].far - pts[j].frr;
    if (dj > 0.0) continue;
    const double di = pts[j - 1].far - pts[j - 1].frr;
    const double alpha = di / (di - dj);
    report.eer_percent =
        100.0 * (pts[j - 1].far + alpha * (pts[j].far - pts[j - 1].far));
    report.threshold =
        pts[j - 1].threshold + alpha * (pts[j].threshold - pts[j - 1].threshold);
    return report;
  }
  // Unreachable: the last point always has FAR = 0 and FRR = 1.
  throw std::logic_error("EER sweep found no crossing");
}

EerReport ComputeEer(const ScoreSet &scores) {
  std::vector<double> tar, non;
  for (const ScoreRecord &r : scores)
    (r.label == TrialLabel::kTarget ? tar : non).push_back(r.score);
  return ComputeEer(tar, non);
}

std::string FormatEerLine(const EerReport &report) {
  return "EER=" + FormatFixed(report.eer_percent, 2) +
         " THRESH=" + FormatFixed(report.threshold, 6);
}

void WriteDetCsv(std::ostream &os, const EerReport &report) {
  os << "threshold,far,frr\n";
  for (const OperatingPoint &p : report.far_frr_curve)
    os << FormatSignificant(p.threshold, 9) << ',' << FormatSignificant(p.far, 9)
       << ',' << FormatSignificant(p.frr, 9) << '\n';
}

McNemarReport McNemarFromCounts(long long b, long long c) {
  if (b < 0 || c < 0) throw ValidationError("McNemar counts must be non-negative");
  McNemarReport r;
  r.b = b;
  r.c = c;
  const long long n = b + c;
  if (n == 0) {
    r.p_value = 1.0;
  } else if (n <= kExactMcNemarLimit) {
    // Binomial(n, 1/2) pmf by the multiplicative recurrence.
    double pmf = std::ldexp(1.0, static_cast<int>(-n));
    double tail = 0.0;
    const long long k0 = std::max(b, c);
    for (long long k = 0; k <= n; ++k) {
      if (k >= k0) tail += pmf;
      pmf = pmf * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    r.p_value = std::min(1.0, 2.0 * tail);
  } else {
    r.exact = false;
    const double diff = std::abs(static_cast<double>(b - c)) - 1.0;
    const double stat = std::max(diff, 0.0) * std::max(diff, 0.0) / static_cast<double>(n);
    r.p_value = std::min(1.0, std::erfc(std::sqrt(stat / 2.0)));
  }
  for (double level : kSignificanceLevels)
    if (r.p_value < level) r.significant_at.push_back(level);
  return r;
}

McNemarReport McNemarTest(std::span<const bool> correct_a,
                          std::span<const bool> correct_b) {
  if (correct_a.size() != correct_b.size())
    throw ValidationError("McNemar: decision lists differ in length");
  long long b = 0, c = 0;
  for (std::size_t i = 0; i < correct_a.size(); ++i) {
    if (!correct_a[i] && correct_b[i]) ++b;
    if (correct_a[i] && !correct_b[i]) ++c;
  }
  return McNemarFromCounts(b, c);
}

std::vector<bool> DecisionsAtEer(const ScoreSet &scores) {
  const double thr = ComputeEer(scores).threshold;
  std::vector<bool> out;
  out.reserve(scores.size());
  for (const ScoreRecord &r : scores)
    out.push_back((r.score >= thr) == (r.label == TrialLabel::kTarget));
  return out;
}

McNemarReport McNemarFromScores(const ScoreSet &a, const ScoreSet &b) {
  if (a.size() != b.size())
    throw ValidationError("McNemar: score files have different trial counts");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].enroll_id != b[i].enroll_id || a[i].test_id != b[i].test_id ||
        a[i].label != b[i].label)
      throw ValidationError("McNemar: trial " + std::to_string(i + 1) +
                            " differs between score files");
  const std::vector<bool> da = DecisionsAtEer(a);
  const std::vector<bool> db = DecisionsAtEer(b);
  // std::vector<bool> has no contiguous storage; copy for the span API.
  std::unique_ptr<bool[]> ca(new bool[da.size()]), cb(new bool[db.size()]);
  std::ranges::copy(da, ca.get());
  std::ranges::copy(db, cb.get());
  return McNemarTest(std::span<const bool>(ca.get(), da.size()),
                     std::span<const bool>(cb.get(), db.size()));
}

void WriteMcNemarReport(std::ostream &os, const McNemarReport &r) {
  os << "b=" << r.b << " c=" << r.c << " p=" << FormatFixed(r.p_value, 6)
     << " method=" << (r.exact ? "exact-binomial" : "chi2-continuity") << '\n';
  for (double level : kSignificanceLevels) {
    const bool sig = std::ranges::find(r.significant_at, level) != r.significant_at.end();
    os << "significant@" << FormatSignificant(level, 3) << '=' << (sig ? "yes" : "no")
       << '\n';
  }
  os << "pairing=" << kMcNemarPairing << '\n';
}

}  // namespace vfrkit
