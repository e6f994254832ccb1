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

#ifndef ROBUSTQN_BENCH_REPORT_H_
#define ROBUSTQN_BENCH_REPORT_H_

#include <iosfwd>
#include <string>

#include "robustqn/bench/replications.h"

namespace robustqn::bench {

// CSV with header estimator,epsilon,m,n,p,alpha,mrse,stderr. Numbers use the
// shortest representation that round-trips.
void WriteMrseCsv(const MrseReport& report, std::ostream& out);
void WriteMrseCsvFile(const MrseReport& report, const std::string& path);

// Inverse of WriteMrseCsv. Throws std::invalid_argument on a bad header or
// row.
MrseReport ParseMrseCsv(std::istream& in);

// Line chart of MRSE against the grid value, one polyline per estimator. The
// noise-free baseline is solid; cq, os and qn are dashed, dotted and
// dot-dashed.
void EmitSvg(const MrseReport& report, GridKind kind, std::ostream& out);
void EmitSvgFile(const MrseReport& report, GridKind kind,
                 const std::string& path);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_REPORT_H_
