// src/feature-io.cc

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

#include "vfrkit/feature-io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <stdexcept>

namespace vfrkit {

namespace {

constexpr unsigned char kMagic[4] = {0x56, 0x46, 0x52, 0x46};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 1 + 4;

template <typename U>
void PutLe(std::vector<unsigned char> *out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out->push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U GetLe(const unsigned char *p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<unsigned char> EncodeVfrf(const FeatureMatrix &feats) {
  feats.Validate();
  const std::size_t rows = feats.NumRows();
  const std::size_t dim = feats.Dim();
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + rows * 8 + rows * dim * 4);
  for (unsigned char b : kMagic) out.push_back(b);
  PutLe<std::uint32_t>(&out, kVfrfVersion);
  PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(rows));
  PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(dim));
  std::uint8_t flags = (feats.meta.cmn_applied ? 1 : 0) |
                       (feats.meta.vfr_applied ? 2 : 0);
  out.push_back(flags);
  PutLe(&out, std::bit_cast<std::uint32_t>(static_cast<float>(feats.meta.base_shift_ms)));
  for (double t : feats.timestamps_ms) PutLe(&out, std::bit_cast<std::uint64_t>(t));
  for (double v : feats.rows.Data())
    PutLe(&out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

FeatureMatrix DecodeVfrf(const std::vector<unsigned char> &bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ValidationError("VFRF: bad magic");
  const unsigned char *p = bytes.data() + 4;
  const auto version = GetLe<std::uint32_t>(p);
  if (version != kVfrfVersion)
    throw ValidationError("VFRF: unsupported version " + std::to_string(version));
  const auto rows = GetLe<std::uint32_t>(p + 4);
  const auto dim = GetLe<std::uint32_t>(p + 8);
  const std::uint8_t flags = p[12];
  if (flags & ~0x3u) throw ValidationError("VFRF: unknown flag bits");
  const float shift = std::bit_cast<float>(GetLe<std::uint32_t>(p + 13));
  const std::size_t expected = kHeaderBytes + static_cast<std::size_t>(rows) * 8 +
                               static_cast<std::size_t>(rows) * dim * 4;
  if (bytes.size() != expected)
    throw ValidationError("VFRF: size " + std::to_string(bytes.size()) +
                          " does not match header (" + std::to_string(expected) + ")");
  FeatureMatrix out;
  out.meta.cmn_applied = flags & 1;
  out.meta.vfr_applied = flags & 2;
  out.meta.base_shift_ms = shift;
  out.rows = Matrix(rows, dim);
  out.timestamps_ms.resize(rows);
  p = bytes.data() + kHeaderBytes;
  for (std::uint32_t i = 0; i < rows; ++i, p += 8)
    out.timestamps_ms[i] = std::bit_cast<double>(GetLe<std::uint64_t>(p));
  for (double &v : out.rows.Data()) {
    v = std::bit_cast<float>(GetLe<std::uint32_t>(p));
    p += 4;
  }
  out.Validate();
  return out;
}

void WriteVfrf(const std::filesystem::path &path, const FeatureMatrix &feats) {
  const std::vector<unsigned char> bytes = EncodeVfrf(feats);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

FeatureMatrix ReadVfrf(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  FeatureMatrix feats = DecodeVfrf(bytes);
  feats.meta.source_id = path.stem().string();
  return feats;
}

void WriteFeatureCsv(std::ostream &os, const FeatureMatrix &feats) {
  for (std::size_t i = 0; i < feats.NumRows(); ++i) {
    os << FormatSignificant(feats.timestamps_ms[i], 9);
    for (double v : feats.rows.Row(i)) os << ',' << FormatSignificant(v, 9);
    os << '\n';
  }
}

}  // namespace vfrkit
