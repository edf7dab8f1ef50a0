// include/vfrkit/feature-io.h

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

#ifndef VFRKIT_FEATURE_IO_H_
#define VFRKIT_FEATURE_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "vfrkit/frontend.h"

namespace vfrkit {

inline constexpr std::uint32_t kVfrfVersion = 1;

// VFRF layout, all little-endian:
//   "VFRF" | u32 version | u32 num_rows | u32 dim | u8 flags
//   | f32 base_shift_ms | f64 timestamps[num_rows] | f32 values[num_rows*dim]
// flags: bit0 cmn_applied, bit1 vfr_applied. Values are stored as f32, so a
// write quantizes the in-memory doubles; the source id is not stored.
std::vector<unsigned char> EncodeVfrf(const FeatureMatrix &feats);
FeatureMatrix DecodeVfrf(const std::vector<unsigned char> &bytes);

void WriteVfrf(const std::filesystem::path &path, const FeatureMatrix &feats);
/// The returned matrix takes the file stem as its source id.
FeatureMatrix ReadVfrf(const std::filesystem::path &path);

/// One line per frame: timestamp then coefficients, 9 significant digits.
void WriteFeatureCsv(std::ostream &os, const FeatureMatrix &feats);

}  // namespace vfrkit

#endif  // VFRKIT_FEATURE_IO_H_
