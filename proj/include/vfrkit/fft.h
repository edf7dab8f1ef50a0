// include/vfrkit/fft.h

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

#ifndef VFRKIT_FFT_H_
#define VFRKIT_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vfrkit {

// In-place iterative radix-2 FFT; size must be a power of two.
void ComplexFft(std::span<std::complex<double>> data);

// Power spectrum |X[k]|^2 for k = 0..n/2 of a real frame zero-padded to n.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(std::size_t fft_size);
  std::size_t FftSize() const { return fft_size_; }
  std::size_t NumBins() const { return fft_size_ / 2 + 1; }
  void Compute(std::span<const double> frame, std::span<double> power) const;

 private:
  std::size_t fft_size_;
};

bool IsPowerOfTwo(std::size_t n);

}  // namespace vfrkit

#endif  // VFRKIT_FFT_H_
