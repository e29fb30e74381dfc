// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqfisher/common.hpp"
#include "seqfisher/fisher.hpp"

namespace seqfisher::scan {

enum class Spacing { linear, log };

struct AxisSpec {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  Spacing spacing = Spacing::linear;
};

/// Grid points of an axis (count ≥ 2, min < max, log needs min > 0).
std::vector<double> axis_points(const AxisSpec& axis);

struct ScanRecord {
  double x = 0.0;
  std::optional<fisher::FisherReport> report;  // empty when failed
  std::string error;                           // failure message, if any
};

struct ScanGrid {
  AxisSpec axis;
  std::vector<ScanRecord> records;
};

/// Evaluate a report at every grid point. Per-point failures are recorded
/// and the scan continues. Records whose conditional value falls below
/// 2% of the scan maximum are flagged "near-zero-fi".
ScanGrid scan_1d(const std::function<fisher::FisherReport(double)>& f,
                 const AxisSpec& axis);

enum class OptMethod { grid, golden_section, nelder_mead };

struct OptResult {
  std::vector<double> argmax;
  double value = 0.0;
  OptMethod method = OptMethod::grid;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> flags;
};

/// Grid pre-scan, then golden-section refinement inside the bracketing
/// triple around the best grid point, to an absolute argument tolerance
/// of 1e-4. A maximum on the grid boundary is returned as-is, flagged
/// "boundary". Ties prefer the smaller argument. The result value is
/// never below the best grid value.
OptResult maximize_1d(const std::function<double(double)>& f,
                      const std::vector<double>& grid);

/// Grid pre-scan over the product grid, then Nelder-Mead (clamped to
/// nonnegative arguments) from the best point; converges when the simplex
/// diameter drops below 1e-4, gives up (flag "max-iterations") after
/// max_iterations. Evaluation failures count as −∞.
OptResult maximize_2d(const std::function<double(double, double)>& f,
                      const std::vector<double>& grid_x,
                      const std::vector<double>& grid_y,
                      int max_iterations = 500);

}  // namespace seqfisher::scan
