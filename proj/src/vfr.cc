// src/vfr.cc

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

#include "vfrkit/vfr.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace vfrkit {

EntropyWindowStats WindowStats(const Matrix &rows, std::size_t begin,
                               std::size_t end) {
  if (end > rows.NumRows() || begin > end || end - begin < 2)
    throw ValidationError("entropy buffer needs at least two rows");
  const std::size_t dim = rows.NumCols();
  const double count = static_cast<double>(end - begin);
  EntropyWindowStats stats;
  stats.dim = static_cast<int>(dim);
  stats.mu.assign(dim, 0.0);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t d = 0; d < dim; ++d) stats.mu[d] += rows(i, d);
  for (double &m : stats.mu) m /= count;
  // Two-pass variance keeps the shift invariance exact up to rounding.
  double trace = 0.0;
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      const double dev = rows(i, d) - stats.mu[d];
      trace += dev * dev;
    }
  stats.trace_sigma = trace / count;
  return stats;
}

double EntropyFromTrace(int dim, double trace_sigma) {
  if (dim < 1) throw ValidationError("entropy dimension must be >= 1");
  return dim * std::log(std::sqrt(2.0 * std::numbers::pi)) +
         std::log(std::max(trace_sigma, kTraceFloor));
}

double WindowEntropy(const Matrix &rows, std::size_t begin, std::size_t end) {
  const EntropyWindowStats stats = WindowStats(rows, begin, end);
  return EntropyFromTrace(stats.dim, stats.trace_sigma);
}

double WindowEntropy(const Matrix &rows) {
  return WindowEntropy(rows, 0, rows.NumRows());
}

EntropyCurve ComputeEntropyCurve(const MelSpectrogram &mel, EntropyDomain domain) {
  if (std::abs(mel.shift_ms - kOversampledShiftMs) > 1e-9)
    throw ValidationError("entropy curve requires the 2.5 ms dense grid");
  const std::size_t n = mel.rows.NumRows();
  if (n < static_cast<std::size_t>(kEntropyBufferRows))
    throw ValidationError("entropy curve needs at least 12 dense frames (30 ms)");

  Matrix log_rows;
  const Matrix *source = &mel.rows;
  if (domain == EntropyDomain::kLog) {
    log_rows = mel.rows;
    for (double &v : log_rows.Data()) v = std::log(std::max(v, kLogEnergyFloor));
    source = &log_rows;
  }

  EntropyCurve curve;
  curve.hop_ms = kEntropyHopRows * kOversampledShiftMs;
  curve.buffer_ms = kEntropyBufferRows * kOversampledShiftMs;
  const std::size_t full = (n - kEntropyBufferRows) / kEntropyHopRows + 1;
  for (std::size_t i = 0; i < full; ++i) {
    const std::size_t begin = i * kEntropyHopRows;
    curve.segment_start_indices.push_back(begin);
    curve.values.push_back(WindowEntropy(*source, begin, begin + kEntropyBufferRows));
  }
  const std::size_t covered = (full - 1) * kEntropyHopRows + kEntropyBufferRows;
  if (covered < n) {
    // The tail always has between 7 and 11 rows here.
    const std::size_t begin = full * kEntropyHopRows;
    curve.segment_start_indices.push_back(begin);
    curve.values.push_back(WindowEntropy(*source, begin, n));
  }
  return curve;
}

double LowerMedian(std::span<const double> values) {
  if (values.empty()) throw ValidationError("median of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  return sorted[mid];
}

ThresholdSet ThresholdsFromStats(double m_max, double m_med, double m_min) {
  const auto [w1, w2, w3] = kThresholdWeights;
  ThresholdSet th;
  th.m_max = m_max;
  th.m_med = m_med;
  th.m_min = m_min;
  // Written as offsets from the median so that rounding cannot break
  // T1 >= T2 >= T3 when max >= med >= min.
  const double spread = m_max - m_med;
  th.t1 = m_med + w1 * spread;
  th.t2 = m_med + (1.0 - w2) * spread;
  th.t3 = (1.0 - w3) * m_med + w3 * m_min;
  th.degenerate = m_max - m_min < 1e-6;
  return th;
}

ThresholdSet ComputeThresholds(const EntropyCurve &curve) {
  if (curve.values.empty()) throw ValidationError("thresholds of an empty entropy curve");
  const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
  return ThresholdsFromStats(*hi, LowerMedian(curve.values), *lo);
}

int StrideForEntropy(double h, const ThresholdSet &th) {
  if (th.degenerate) return 4;
  if (h >= th.t1) return 2;
  if (h >= th.t2) return 3;
  if (h >= th.t3) return 4;
  return 5;
}

FramePlan BuildFramePlan(std::span<const int> segment_strides,
                         std::size_t n_oversampled) {
  if (segment_strides.empty()) throw ValidationError("frame plan needs at least one segment");
  for (int s : segment_strides)
    if (s < 2 || s > 5) throw ValidationError("segment stride outside {2,3,4,5}");
  FramePlan plan;
  plan.per_segment_stride.assign(segment_strides.begin(), segment_strides.end());
  const std::size_t last = segment_strides.size() - 1;
  for (std::size_t c = 0; c < n_oversampled;) {
    plan.picked_indices.push_back(c);
    const std::size_t seg = std::min(c / kEntropyHopRows, last);
    c += static_cast<std::size_t>(segment_strides[seg]);
  }
  return plan;
}

FramePlan BuildFramePlan(const EntropyCurve &curve, const ThresholdSet &th,
                         std::size_t n_oversampled) {
  std::vector<int> strides;
  strides.reserve(curve.values.size());
  for (double h : curve.values) strides.push_back(StrideForEntropy(h, th));
  return BuildFramePlan(strides, n_oversampled);
}

VfrAnalysis AnalyzeVfr(const AudioBuffer &buf, const FrontendConfig &cfg,
                       const VfrOptions &opts) {
  FrontendConfig dense = cfg;
  dense.base_shift_ms = kOversampledShiftMs;
  const FrameSet frames = FrameSignal(buf, dense);
  const MelSpectrogram mel = MelEnergies(frames, dense);

  VfrAnalysis out;
  out.num_oversampled = mel.rows.NumRows();
  out.curve = ComputeEntropyCurve(mel, opts.entropy_domain);
  out.thresholds = ComputeThresholds(out.curve);
  out.plan = BuildFramePlan(out.curve, out.thresholds, out.num_oversampled);

  const FeatureMatrix all = Mfcc(mel, dense, buf.source_id);
  FeatureMatrix picked;
  picked.rows = Matrix(out.plan.picked_indices.size(), all.Dim());
  picked.meta = all.meta;
  picked.meta.vfr_applied = true;
  picked.meta.base_shift_ms = kOversampledShiftMs;
  for (std::size_t r = 0; r < out.plan.picked_indices.size(); ++r) {
    const std::size_t src = out.plan.picked_indices[r];
    std::ranges::copy(all.rows.Row(src), picked.rows.Row(r).begin());
    picked.timestamps_ms.push_back(all.timestamps_ms[src]);
  }
  if (cfg.apply_cmn) picked = SlidingCmn(picked, cfg.cmn_window_frames);
  out.features = std::move(picked);
  return out;
}

FeatureMatrix VfrExtract(const AudioBuffer &buf, const FrontendConfig &cfg,
                         const VfrOptions &opts) {
  return AnalyzeVfr(buf, cfg, opts).features;
}

void WriteEntropyCsv(std::ostream &os, const EntropyCurve &curve,
                     const ThresholdSet &th, double dense_shift_ms) {
  os << "# T1=" << FormatFixed(th.t1, 6) << " T2=" << FormatFixed(th.t2, 6)
     << " T3=" << FormatFixed(th.t3, 6) << " degenerate=" << (th.degenerate ? 1 : 0)
     << '\n';
  os << "segment_index,start_ms,entropy_nats\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    os << i << ',' << FormatFixed(curve.segment_start_indices[i] * dense_shift_ms, 3)
       << ',' << FormatFixed(curve.values[i], 6) << '\n';
}

}  // namespace vfrkit
