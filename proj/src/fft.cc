// src/fft.cc

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

#include "vfrkit/fft.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "vfrkit/common.h"

namespace vfrkit {

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void ComplexFft(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (!IsPowerOfTwo(n)) throw ValidationError("FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
      for (std::size_t i = 0; i < n; i += len) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

PowerSpectrum::PowerSpectrum(std::size_t fft_size) : fft_size_(fft_size) {
  if (!IsPowerOfTwo(fft_size))
    throw ValidationError("fft_size must be a power of two");
}

void PowerSpectrum::Compute(std::span<const double> frame,
                            std::span<double> power) const {
  if (frame.size() > fft_size_ || power.size() != NumBins())
    throw ValidationError("PowerSpectrum: size mismatch");
  std::vector<std::complex<double>> buf(fft_size_);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  ComplexFft(buf);
  for (std::size_t k = 0; k < NumBins(); ++k) power[k] = std::norm(buf[k]);
}

}  // namespace vfrkit
