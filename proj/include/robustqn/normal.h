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

#ifndef ROBUSTQN_NORMAL_H_
#define ROBUSTQN_NORMAL_H_

namespace robustqn {

// Standard normal density.
double NormalPdf(double x);

// Standard normal distribution function.
double NormalCdf(double x);

// Inverse of NormalCdf on (0, 1). Throws std::domain_error outside.
double NormalQuantile(double prob);

}  // namespace robustqn

#endif  // ROBUSTQN_NORMAL_H_
