// include/vfrkit/vfr.h

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

#ifndef VFRKIT_VFR_H_
#define VFRKIT_VFR_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "vfrkit/frontend.h"

namespace vfrkit {

// Entropy-based variable frame rate analysis. Frames are first taken on a
// dense 2.5 ms grid. An inter-frame entropy value is computed for every
// 30 ms buffer of mel spectra at a 15 ms hop, and each buffer's value
// selects how many dense frames to skip: 2, 3, 4 or 5 (5, 7.5, 10 or
// 12.5 ms). High-entropy regions are sampled densely, steady regions
// sparsely.

inline constexpr int kEntropyBufferRows = 12;  // 30 ms of 2.5 ms rows
inline constexpr int kEntropyHopRows = 6;      // 15 ms
inline constexpr double kTraceFloor = 1e-10;
inline constexpr std::array<double, 3> kThresholdWeights = {0.7, 0.8, 0.5};

enum class EntropyDomain { kLinear, kLog };

struct EntropyWindowStats {
  std::vector<double> mu;
  double trace_sigma = 0.0;  // sum of per-dimension population variances
  int dim = 0;
};

/// Mean and Tr(Sigma) of a buffer of K-dimensional rows.
EntropyWindowStats WindowStats(const Matrix &rows, std::size_t begin,
                               std::size_t end);

/// Gaussian entropy approximation K ln sqrt(2 pi) + ln Tr(Sigma), with
/// Tr(Sigma) floored at 1e-10. Needs at least two rows.
double WindowEntropy(const Matrix &rows, std::size_t begin, std::size_t end);
double WindowEntropy(const Matrix &rows);
double EntropyFromTrace(int dim, double trace_sigma);

struct EntropyCurve {
  std::vector<double> values;
  double hop_ms = 15.0;
  double buffer_ms = 30.0;
  // Dense-grid row where each buffer begins; stride kEntropyHopRows.
  std::vector<std::size_t> segment_start_indices;

  std::size_t size() const { return values.size(); }
};

/// Buffers of 12 rows at a hop of 6. A tail of rows not covered by any full
/// buffer forms one extra, shorter segment. Requires mel.shift_ms == 2.5
/// and at least 12 rows. `domain` selects linear or log mel energies.
EntropyCurve ComputeEntropyCurve(const MelSpectrogram &mel,
                                 EntropyDomain domain = EntropyDomain::kLinear);

struct ThresholdSet {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double m_max = 0.0, m_med = 0.0, m_min = 0.0;
  std::array<double, 3> omegas = kThresholdWeights;
  bool degenerate = false;  // m_max - m_min < 1e-6
};

/// Median uses the lower-middle element for even lengths.
double LowerMedian(std::span<const double> values);

ThresholdSet ThresholdsFromStats(double m_max, double m_med, double m_min);
ThresholdSet ComputeThresholds(const EntropyCurve &curve);

/// Dense-grid stride for an entropy value: 2 if H >= T1, 3 if H >= T2,
/// 4 if H >= T3, else 5.
int StrideForEntropy(double h, const ThresholdSet &th);

struct FramePlan {
  std::vector<std::size_t> picked_indices;
  std::vector<int> per_segment_stride;
};

/// Walks a cursor from 0, advancing by the stride of the segment
/// min(cursor / 6, N - 1), until it reaches n_oversampled. A degenerate
/// threshold set forces stride 4 throughout.
FramePlan BuildFramePlan(const EntropyCurve &curve, const ThresholdSet &th,
                         std::size_t n_oversampled);
FramePlan BuildFramePlan(std::span<const int> segment_strides,
                         std::size_t n_oversampled);

struct VfrOptions {
  EntropyDomain entropy_domain = EntropyDomain::kLinear;
};

/// Everything the VFR pipeline computed for one utterance.
struct VfrAnalysis {
  EntropyCurve curve;
  ThresholdSet thresholds;
  FramePlan plan;
  std::size_t num_oversampled = 0;
  FeatureMatrix features;
};

/// Dense framing -> mel -> entropy curve -> thresholds -> plan -> MFCC on
/// every dense frame -> row selection -> sliding CMN (if cfg.apply_cmn).
/// cfg.base_shift_ms is ignored; the dense grid is always 2.5 ms.
VfrAnalysis AnalyzeVfr(const AudioBuffer &buf, const FrontendConfig &cfg,
                       const VfrOptions &opts = {});
FeatureMatrix VfrExtract(const AudioBuffer &buf, const FrontendConfig &cfg,
                         const VfrOptions &opts = {});

/// segment_index,start_ms,entropy_nats rows after a comment header carrying
/// T1/T2/T3.
void WriteEntropyCsv(std::ostream &os, const EntropyCurve &curve,
                     const ThresholdSet &th, double dense_shift_ms);

}  // namespace vfrkit

#endif  // VFRKIT_VFR_H_
