// include/vfrkit/common.h

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

#ifndef VFRKIT_COMMON_H_
#define VFRKIT_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vfrkit {

/// Raised when an argument or configuration violates a documented
/// precondition. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles. Rows are frames, columns are
/// feature dimensions.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t NumRows() const { return rows_; }
  std::size_t NumCols() const { return cols_; }
  bool Empty() const { return rows_ == 0; }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<double> &Data() const { return data_; }
  std::vector<double> &Data() { return data_; }

  void AppendRow(std::span<const double> row);

  friend bool operator==(const Matrix &, const Matrix &) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Locale-independent number formatting.
std::string FormatFixed(double value, int decimals);
std::string FormatSignificant(double value, int digits);

/// Locale-independent parse; throws ValidationError on junk.
double ParseDouble(std::string_view text);

/// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string> SplitFields(std::string_view line, char delim);

/// splitmix64-based generator with a portable uniform mapping, so seeded
/// outputs do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t NextU64();
  /// Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Standard normal (Box-Muller, no caching).
  double Gaussian();
  /// Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

/// Deterministic seed derivation for sub-streams.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace vfrkit

#endif  // VFRKIT_COMMON_H_
