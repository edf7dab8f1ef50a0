// tests/vfr-test.cc

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

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "vfrkit/common.h"
#include "vfrkit/frontend.h"
#include "vfrkit/toybench.h"
#include "vfrkit/vfr.h"

using namespace vfrkit;

namespace {

Matrix RandomRows(Rng &rng, std::size_t n, std::size_t dim, double scale = 1.0) {
  Matrix m(n, dim);
  for (double &v : m.Data()) v = scale * rng.Uniform(0.0, 10.0);
  return m;
}

// Sum of per-dimension population variances via E[x^2] - E[x]^2 in long
// double; a different route from the two-pass library code.
double TraceOracle(const Matrix &m) {
  long double total = 0.0L;
  for (std::size_t d = 0; d < m.NumCols(); ++d) {
    long double s = 0.0L, s2 = 0.0L;
    for (std::size_t i = 0; i < m.NumRows(); ++i) {
      s += m(i, d);
      s2 += static_cast<long double>(m(i, d)) * m(i, d);
    }
    const long double n = m.NumRows();
    total += s2 / n - (s / n) * (s / n);
  }
  return static_cast<double>(total);
}

MelSpectrogram DenseMel(const AudioBuffer &a) {
  FrontendConfig cfg;
  cfg.base_shift_ms = kOversampledShiftMs;
  return MelEnergies(FrameSignal(a, cfg), cfg);
}

EntropyCurve CurveOf(const std::vector<double> &values) {
  EntropyCurve c;
  c.values = values;
  for (std::size_t i = 0; i < values.size(); ++i)
    c.segment_start_indices.push_back(i * kEntropyHopRows);
  return c;
}

std::vector<std::size_t> Range(std::size_t start, std::size_t stop, std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t i = start; i < stop; i += step) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("window entropy closed-form values") {
  CHECK(std::abs(EntropyFromTrace(23, 1.0) - 21.135586) < 1e-6);
  CHECK(std::abs(23.0 * 0.5 * std::log(2.0 * std::numbers::pi) - EntropyFromTrace(23, 1.0)) <
        1e-12);
  Matrix same(12, 23, 0.7);
  const double floored = 23.0 * 0.5 * std::log(2.0 * std::numbers::pi) + std::log(1e-10);
  CHECK(std::abs(WindowEntropy(same) - floored) < 1e-12);
  CHECK(std::abs(WindowEntropy(same) - (-1.8902647)) < 1e-7);

  // Two rows +-0.5 in one dimension: population variance 0.25 (0.5 with N-1).
  Matrix two(2, 1);
  two(0, 0) = -0.5;
  two(1, 0) = 0.5;
  CHECK(WindowEntropy(two) == doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi) +
                                              std::log(0.25)));
  CHECK_THROWS_AS(WindowEntropy(Matrix(1, 23, 1.0)), ValidationError);
}

TEST_CASE("window entropy matches the trace oracle") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const Matrix m = RandomRows(rng, 2 + rng.Below(20), 1 + rng.Below(30));
    const double want = m.NumCols() * std::log(std::sqrt(2.0 * std::numbers::pi)) +
                        std::log(TraceOracle(m));
    REQUIRE(WindowEntropy(m) == doctest::Approx(want).epsilon(1e-10));
    REQUIRE(WindowStats(m, 0, m.NumRows()).trace_sigma ==
            doctest::Approx(TraceOracle(m)).epsilon(1e-10));
  }
}

TEST_CASE("entropy scaling and shift laws") {
  Rng rng(2);
  Matrix base(12, 23);
  for (double &v : base.Data()) v = rng.Uniform(0, 1);
  Matrix e_scaled = base;
  for (double &v : e_scaled.Data()) v *= std::numbers::e;
  CHECK(std::abs(WindowEntropy(e_scaled) - WindowEntropy(base) - 2.0) < 1e-9);

  for (int t = 0; t < 1000; ++t) {
    const Matrix m = RandomRows(rng, 2 + rng.Below(15), 23);
    const double c = std::exp(rng.Uniform(-5.0, 5.0));
    Matrix scaled = m, shifted = m;
    for (double &v : scaled.Data()) v *= c;
    std::vector<double> offset(23);
    for (double &o : offset) o = rng.Uniform(-3.0, 3.0);
    for (std::size_t i = 0; i < m.NumRows(); ++i)
      for (std::size_t d = 0; d < 23; ++d) shifted(i, d) += offset[d];
    REQUIRE(std::abs(WindowEntropy(scaled) - WindowEntropy(m) - 2.0 * std::log(c)) < 1e-9);
    REQUIRE(std::abs(WindowEntropy(shifted) - WindowEntropy(m)) < 1e-9);
  }
}

TEST_CASE("entropy curve segmentation") {
  Rng rng(4);
  AudioBuffer a;
  a.sample_rate = 8000;
  for (int i = 0; i < 8000; ++i) a.samples.push_back(rng.Uniform(-0.3, 0.3));
  const MelSpectrogram mel = DenseMel(a);
  REQUIRE(mel.rows.NumRows() == 391);
  const EntropyCurve c = ComputeEntropyCurve(mel);
  REQUIRE(c.size() == 65);
  CHECK(c.hop_ms == 15.0);
  CHECK(c.buffer_ms == 30.0);
  CHECK(c.segment_start_indices == Range(0, 390, 6));
  for (std::size_t i = 0; i < 64; ++i)
    REQUIRE(c.values[i] == WindowEntropy(mel.rows, 6 * i, 6 * i + 12));
  // The 7-row tail.
  CHECK(c.values[64] == WindowEntropy(mel.rows, 384, 391));
  for (double v : c.values) CHECK(std::isfinite(v));

  // Exactly one buffer.
  MelSpectrogram small = mel;
  small.rows = Matrix(12, 23);
  for (double &v : small.rows.Data()) v = rng.Uniform(0, 1);
  CHECK(ComputeEntropyCurve(small).size() == 1);
  // Buffers that tile exactly leave no tail.
  small.rows = Matrix(18, 23, 1.0);
  CHECK(ComputeEntropyCurve(small).size() == 2);
  small.rows = Matrix(19, 23, 1.0);
  CHECK(ComputeEntropyCurve(small).size() == 3);
  small.rows = Matrix(11, 23, 1.0);
  CHECK_THROWS_AS(ComputeEntropyCurve(small), ValidationError);
  small.rows = Matrix(40, 23, 1.0);
  small.shift_ms = 10.0;
  CHECK_THROWS_AS(ComputeEntropyCurve(small), ValidationError);
}

TEST_CASE("entropy curve in the log domain") {
  Rng rng(6);
  MelSpectrogram mel;
  mel.shift_ms = 2.5;
  mel.rows = Matrix(30, 23);
  for (double &v : mel.rows.Data()) v = rng.Uniform(0.0, 2.0);
  mel.rows(3, 4) = 0.0;
  Matrix logged = mel.rows;
  for (double &v : logged.Data()) v = std::log(std::max(v, 1e-10));
  const EntropyCurve c = ComputeEntropyCurve(mel, EntropyDomain::kLog);
  REQUIRE(c.size() == 4);
  CHECK(c.values[0] == WindowEntropy(logged, 0, 12));
  CHECK(c.values[3] == WindowEntropy(logged, 18, 30));
}

TEST_CASE("thresholds") {
  const ThresholdSet th = ThresholdsFromStats(10.0, 4.0, 2.0);
  CHECK(std::abs(th.t1 - 8.2) < 1e-12);
  CHECK(std::abs(th.t2 - 5.2) < 1e-12);
  CHECK(std::abs(th.t3 - 3.0) < 1e-12);
  CHECK_FALSE(th.degenerate);

  const ThresholdSet flat = ComputeThresholds(CurveOf({3.5, 3.5, 3.5}));
  CHECK(flat.t1 == 3.5);
  CHECK(flat.t2 == 3.5);
  CHECK(flat.t3 == 3.5);
  CHECK(flat.degenerate);

  // Lower-middle median for even lengths.
  CHECK(LowerMedian(std::vector<double>{4.0, 1.0, 3.0, 2.0}) == 2.0);
  CHECK(LowerMedian(std::vector<double>{5.0}) == 5.0);
  const ThresholdSet ev = ComputeThresholds(CurveOf({1.0, 9.0, 2.0, 3.0}));
  CHECK(ev.m_med == 2.0);
  CHECK(ev.m_max == 9.0);
  CHECK(ev.m_min == 1.0);
  CHECK_THROWS_AS(ComputeThresholds(EntropyCurve{}), ValidationError);

  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(1 + rng.Below(200));
    for (double &x : v) x = rng.Uniform(-5.0, 30.0);
    const ThresholdSet r = ComputeThresholds(CurveOf(v));
    REQUIRE(r.m_max >= r.m_med);
    REQUIRE(r.m_med >= r.m_min);
    REQUIRE(r.t1 >= r.t2);
    REQUIRE(r.t2 >= r.t3);
  }
}

TEST_CASE("stride branches") {
  const ThresholdSet th = ThresholdsFromStats(10.0, 4.0, 2.0);
  CHECK(StrideForEntropy(10.0, th) == 2);
  CHECK(StrideForEntropy(8.2, th) == 2);
  CHECK(StrideForEntropy(8.1, th) == 3);
  CHECK(StrideForEntropy(5.2, th) == 3);
  CHECK(StrideForEntropy(5.1, th) == 4);
  CHECK(StrideForEntropy(3.0, th) == 4);
  CHECK(StrideForEntropy(2.9, th) == 5);
}

TEST_CASE("frame plan worked examples") {
  const ThresholdSet flat = ThresholdsFromStats(1.0, 1.0, 1.0);
  const FramePlan uniform = BuildFramePlan(CurveOf({1.0, 1.0, 1.0, 1.0, 1.0}), flat, 41);
  CHECK(uniform.picked_indices == Range(0, 41, 4));
  CHECK(uniform.picked_indices.size() == 11);

  const ThresholdSet th = ThresholdsFromStats(10.0, 4.0, 2.0);
  CHECK(BuildFramePlan(CurveOf({9.0}), th, 12).picked_indices ==
        std::vector<std::size_t>{0, 2, 4, 6, 8, 10});

  const std::vector<int> strides = {2, 5};
  CHECK(BuildFramePlan(strides, 17).picked_indices ==
        std::vector<std::size_t>{0, 2, 4, 6, 11, 16});
  CHECK(BuildFramePlan(CurveOf({9.0, 2.5}), th, 17).picked_indices ==
        std::vector<std::size_t>{0, 2, 4, 6, 11, 16});

  CHECK_THROWS_AS(BuildFramePlan(std::vector<int>{}, 10), ValidationError);
  CHECK_THROWS_AS(BuildFramePlan(std::vector<int>{6}, 10), ValidationError);
}

TEST_CASE("frame plan properties over random curves") {
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t segs = 1 + rng.Below(80);
    std::vector<double> v(segs);
    for (double &x : v) x = rng.Uniform(0.0, 25.0);
    // Plans may end anywhere inside the last segment's reach.
    const std::size_t n = 1 + rng.Below(6 * segs + 12);
    const EntropyCurve c = CurveOf(v);
    const FramePlan p = BuildFramePlan(c, ComputeThresholds(c), n);
    REQUIRE(!p.picked_indices.empty());
    REQUIRE(p.picked_indices.front() == 0);
    REQUIRE(p.picked_indices.back() < n);
    for (std::size_t i = 1; i < p.picked_indices.size(); ++i) {
      const std::size_t d = p.picked_indices[i] - p.picked_indices[i - 1];
      REQUIRE(d >= 2);
      REQUIRE(d <= 5);
    }
    REQUIRE(p.picked_indices.size() >= (n + 4) / 5);
    REQUIRE(p.picked_indices.size() <= (n + 1) / 2);
    REQUIRE(p.per_segment_stride.size() == segs);
  }
}

TEST_CASE("entropies in [T3, T2) pick the fixed 10 ms grid") {
  Rng rng(10);
  const ThresholdSet th = ThresholdsFromStats(20.0, 12.0, 4.0);  // T2 13.6, T3 8
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng.Below(70));
    for (double &x : v) x = rng.Uniform(th.t3, th.t2);
    const std::size_t n = 6 * (v.size() - 1) + 12;
    CHECK(BuildFramePlan(CurveOf(v), th, n).picked_indices == Range(0, n, 4));
  }
}

TEST_CASE("stationary input falls back to the fixed rate") {
  // A 400 Hz tone repeats every 20 samples, i.e. every dense hop, so every
  // dense frame is identical and the curve is flat.
  for (std::size_t n : {800u, 8000u, 8123u}) {
    AudioBuffer a;
    a.sample_rate = 8000;
    for (std::size_t i = 0; i < n; ++i)
      a.samples.push_back(0.3 * std::sin(2.0 * std::numbers::pi * 400.0 * i / 8000.0));
    FrontendConfig cfg;
    const VfrAnalysis an = AnalyzeVfr(a, cfg);
    CHECK(an.thresholds.degenerate);
    CHECK(an.features.NumRows() == ExtractMfcc(a, cfg).NumRows());
    CHECK(an.plan.picked_indices == Range(0, an.num_oversampled, 4));
  }
}

TEST_CASE("vfr extraction output") {
  const SyntheticSpeaker spk = MakeSpeaker(5, 0);
  const AudioBuffer a = SynthUtterance(spk, StyleByName("neutral"), 2.0, 77);
  FrontendConfig cfg;
  const VfrAnalysis an = AnalyzeVfr(a, cfg);
  const FeatureMatrix &f = an.features;
  CHECK(f.NumRows() == an.plan.picked_indices.size());
  CHECK(f.Dim() == 23);
  CHECK(f.meta.vfr_applied);
  CHECK(f.meta.cmn_applied);
  CHECK_NOTHROW(f.Validate());
  for (std::size_t r = 0; r < f.NumRows(); ++r)
    REQUIRE(f.timestamps_ms[r] == an.plan.picked_indices[r] * 2.5 + 12.5);
  CHECK_FALSE(an.thresholds.degenerate);

  // Rows are the dense MFCC rows at the picked indices, before CMN.
  FrontendConfig raw = cfg;
  raw.apply_cmn = false;
  FrontendConfig dense = raw;
  dense.base_shift_ms = 2.5;
  const FeatureMatrix all = ExtractMfcc(a, dense);
  const FeatureMatrix picked = VfrExtract(a, raw);
  for (std::size_t r = 0; r < picked.NumRows(); ++r)
    for (std::size_t d = 0; d < 23; ++d)
      REQUIRE(picked.rows(r, d) == all.rows(an.plan.picked_indices[r], d));

  CHECK(VfrExtract(a, cfg) == f);
  CHECK(VfrExtract(a, cfg, {EntropyDomain::kLog}).NumRows() > 0);

  AudioBuffer tiny;
  tiny.sample_rate = 8000;
  tiny.samples.assign(400, 0.1);  // 11 dense frames
  CHECK_THROWS_AS(VfrExtract(tiny, cfg), ValidationError);
}

TEST_CASE("entropy dump format") {
  const EntropyCurve c = CurveOf({1.5, -0.25});
  std::ostringstream os;
  WriteEntropyCsv(os, c, ThresholdsFromStats(10.0, 4.0, 2.0), 2.5);
  CHECK(os.str() ==
        "# T1=8.200000 T2=5.200000 T3=3.000000 degenerate=0\n"
        "segment_index,start_ms,entropy_nats\n"
        "0,0.000,1.500000\n"
        "1,15.000,-0.250000\n");
}
