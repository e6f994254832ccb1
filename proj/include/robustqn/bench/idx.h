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

#ifndef ROBUSTQN_BENCH_IDX_H_
#define ROBUSTQN_BENCH_IDX_H_

#include <cstdint>
#include <string>
#include <vector>

// Reader and writer for the big-endian IDX container used by MNIST.

namespace robustqn::bench {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxArray {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

// Throws std::runtime_error on I/O failure, a magic other than
// `expected_magic`, or a payload shorter or longer than the dims imply.
IdxArray ReadIdxFile(const std::string& path, std::uint32_t expected_magic);
void WriteIdxFile(const std::string& path, const IdxArray& array);

struct IdxImages {
  std::uint32_t magic = kIdxImagesMagic;
  std::vector<std::uint32_t> dims;  // count, rows, cols
  std::vector<std::uint8_t> pixels;
  std::vector<std::uint8_t> labels;

  std::size_t count() const { return dims.empty() ? 0 : dims[0]; }
  std::size_t pixels_per_image() const;
};

// Loads an image file and its label file; their counts must agree.
IdxImages LoadIdx(const std::string& images_path,
                  const std::string& labels_path);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_IDX_H_
