// Copyright 2026 The robustqn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robustqn/bench/idx.h"

#include <fstream>
#include <iterator>
#include <stdexcept>

namespace robustqn::bench {
namespace {

std::uint32_t ReadBigEndian(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error(path + ": truncated IDX header");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void WriteBigEndian(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

IdxArray ReadIdxFile(const std::string& path, std::uint32_t expected_magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  IdxArray out;
  out.magic = ReadBigEndian(in, path);
  if (out.magic != expected_magic) {
    throw std::runtime_error(path + ": bad IDX magic");
  }
  // The low byte of the magic is the number of dimensions; the type byte
  // (0x08) is unsigned bytes for both supported magics.
  const std::uint32_t ndims = out.magic & 0xff;
  std::size_t total = 1;
  for (std::uint32_t d = 0; d < ndims; ++d) {
    out.dims.push_back(ReadBigEndian(in, path));
    total *= out.dims.back();
  }
  out.data.assign(std::istreambuf_iterator<char>(in),
                  std::istreambuf_iterator<char>());
  if (out.data.size() != total) {
    throw std::runtime_error(path + ": payload has " +
                             std::to_string(out.data.size()) +
                             " bytes, header implies " + std::to_string(total));
  }
  return out;
}

void WriteIdxFile(const std::string& path, const IdxArray& array) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  WriteBigEndian(out, array.magic);
  for (std::uint32_t d : array.dims) WriteBigEndian(out, d);
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::size_t IdxImages::pixels_per_image() const {
  std::size_t total = 1;
  for (std::size_t i = 1; i < dims.size(); ++i) total *= dims[i];
  return total;
}

IdxImages LoadIdx(const std::string& images_path,
                  const std::string& labels_path) {
  IdxArray images = ReadIdxFile(images_path, kIdxImagesMagic);
  IdxArray labels = ReadIdxFile(labels_path, kIdxLabelsMagic);
  if (labels.dims.empty() || images.dims.empty() ||
      labels.dims[0] != images.dims[0]) {
    throw std::runtime_error("label count does not match image count");
  }
  IdxImages out;
  out.magic = images.magic;
  out.dims = std::move(images.dims);
  out.pixels = std::move(images.data);
  out.labels = std::move(labels.data);
  return out;
}

}  // namespace robustqn::bench
