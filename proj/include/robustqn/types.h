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

#ifndef ROBUSTQN_TYPES_H_
#define ROBUSTQN_TYPES_H_

#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace robustqn {

using Vector = Eigen::VectorXd;
// Column-major: each covariate column is contiguous, which is the layout the
// kernels stream over.
using Matrix = Eigen::MatrixXd;

// Parameter, gradient and Hessian values flowing through the protocol. They
// are plain Eigen objects; the aliases document intent at API boundaries.
using ParamVector = Vector;
using GradVector = Vector;
using HessMatrix = Matrix;

// Raised when a loss, gradient or Hessian overflows to a non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline std::span<const double> AsSpan(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<double> AsSpan(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<const double> Column(const Matrix& m, Eigen::Index col) {
  return {m.col(col).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace robustqn

#endif  // ROBUSTQN_TYPES_H_
