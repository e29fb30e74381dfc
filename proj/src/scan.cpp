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

#include "seqfisher/scan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace seqfisher::scan {

namespace {

constexpr double kArgTol = 1e-4;
constexpr double kGolden = 0.6180339887498949;  // 1/φ

double safe_eval(const std::function<double(double, double)>& f, double x,
                 double y, bool* failed) {
  try {
    const double v = f(std::max(x, 0.0), std::max(y, 0.0));
    if (!std::isfinite(v)) throw NumericError("non-finite value");
    return v;
  } catch (const std::exception&) {
    if (failed) *failed = true;
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::vector<double> axis_points(const AxisSpec& axis) {
  if (axis.count < 2)
    throw DimensionError("axis_points: need at least 2 points");
  if (!(axis.min < axis.max))
    throw DimensionError("axis_points: need min < max");
  if (axis.spacing == Spacing::log && !(axis.min > 0.0))
    throw DimensionError("axis_points: log spacing needs min > 0");
  std::vector<double> pts(axis.count);
  if (axis.spacing == Spacing::linear) {
    const double step = (axis.max - axis.min) / (axis.count - 1);
    for (int i = 0; i < axis.count; ++i) pts[i] = axis.min + step * i;
  } else {
    const double lmin = std::log(axis.min);
    const double step = (std::log(axis.max) - lmin) / (axis.count - 1);
    for (int i = 0; i < axis.count; ++i) pts[i] = std::exp(lmin + step * i);
  }
  pts.front() = axis.min;
  pts.back() = axis.max;
  return pts;
}

ScanGrid scan_1d(const std::function<fisher::FisherReport(double)>& f,
                 const AxisSpec& axis) {
  ScanGrid grid;
  grid.axis = axis;
  for (double x : axis_points(axis)) {
    ScanRecord rec;
    rec.x = x;
    try {
      rec.report = f(x);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    grid.records.push_back(std::move(rec));
  }
  double best = 0.0;
  for (const auto& rec : grid.records)
    if (rec.report) best = std::max(best, rec.report->fi_conditional);
  if (best > 0.0)
    for (auto& rec : grid.records)
      if (rec.report && rec.report->fi_conditional < 0.02 * best)
        rec.report->flags.push_back("near-zero-fi");
  return grid;
}

OptResult maximize_1d(const std::function<double(double)>& f,
                      const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw DimensionError("maximize_1d: need at least 2 grid points");
  std::vector<double> vals(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = f(grid[i]);
    if (!std::isfinite(vals[i]))
      throw NumericError("maximize_1d: non-finite evaluation");
    if (vals[i] > vals[best]) best = i;  // ties keep the smaller argument
  }

  OptResult out;
  out.method = OptMethod::golden_section;
  if (best == 0 || best + 1 == grid.size()) {
    out.argmax = {grid[best]};
    out.value = vals[best];
    out.converged = false;
    out.flags.push_back("boundary");
    return out;
  }

  // Golden-section inside the bracketing triple.
  double a = grid[best - 1], b = grid[best + 1];
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best_x = grid[best], best_f = vals[best];
  int iters = 0;
  while (b - a > kArgTol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
    ++iters;
    if (iters > 200) break;
  }
  for (auto [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}})
    if (v > best_f || (v == best_f && x < best_x)) {
      best_f = v;
      best_x = x;
    }
  out.argmax = {best_x};
  out.value = best_f;
  out.iterations = iters;
  out.converged = (b - a) <= kArgTol;
  return out;
}

OptResult maximize_2d(const std::function<double(double, double)>& f,
                      const std::vector<double>& grid_x,
                      const std::vector<double>& grid_y, int max_iterations) {
  if (grid_x.empty() || grid_y.empty())
    throw DimensionError("maximize_2d: empty grid");

  OptResult out;
  out.method = OptMethod::nelder_mead;

  using Point = std::array<double, 2>;
  bool any_failed = false;
  auto eval = [&](const Point& p) {
    return safe_eval(f, p[0], p[1], &any_failed);
  };

  Point best_pt{grid_x[0], grid_y[0]};
  double best_val = -std::numeric_limits<double>::infinity();
  for (double x : grid_x)
    for (double y : grid_y) {
      const double v = eval({x, y});
      if (v > best_val) {
        best_val = v;
        best_pt = {x, y};
      }
    }
  if (!std::isfinite(best_val))
    throw NumericError("maximize_2d: every grid evaluation failed");

  // Initial simplex around the best grid point.
  const double h0 = std::max(0.05, 0.25 * std::max(best_pt[0], best_pt[1]));
  std::array<Point, 3> simplex{best_pt,
                               Point{best_pt[0] + h0, best_pt[1]},
                               Point{best_pt[0], best_pt[1] + h0}};
  std::array<double, 3> fv{best_val, eval(simplex[1]), eval(simplex[2])};

  auto diameter = [&]() {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        d = std::max(d, std::hypot(simplex[i][0] - simplex[j][0],
                                   simplex[i][1] - simplex[j][1]));
    return d;
  };

  int it = 0;
  for (; it < max_iterations; ++it) {
    // Order: 0 best, 2 worst.
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fv[a] > fv[b]; });
    std::array<Point, 3> s{simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]};
    std::array<double, 3> v{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    simplex = s;
    fv = v;
    if (diameter() < kArgTol) {
      out.converged = true;
      break;
    }

    const Point centroid{0.5 * (simplex[0][0] + simplex[1][0]),
                         0.5 * (simplex[0][1] + simplex[1][1])};
    auto along = [&](double t) {
      return Point{std::max(centroid[0] + t * (centroid[0] - simplex[2][0]), 0.0),
                   std::max(centroid[1] + t * (centroid[1] - simplex[2][1]), 0.0)};
    };

    const Point refl = along(1.0);
    const double f_refl = eval(refl);
    if (f_refl > fv[0]) {
      const Point expa = along(2.0);
      const double f_expa = eval(expa);
      if (f_expa > f_refl) {
        simplex[2] = expa;
        fv[2] = f_expa;
      } else {
        simplex[2] = refl;
        fv[2] = f_refl;
      }
    } else if (f_refl > fv[1]) {
      simplex[2] = refl;
      fv[2] = f_refl;
    } else {
      const Point contr = along(f_refl > fv[2] ? 0.5 : -0.5);
      const double f_contr = eval(contr);
      if (f_contr > std::min(f_refl, fv[2])) {
        simplex[2] = contr;
        fv[2] = f_contr;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = {0.5 * (simplex[i][0] + simplex[0][0]),
                        0.5 * (simplex[i][1] + simplex[0][1])};
          fv[i] = eval(simplex[i]);
        }
      }
    }
    for (int i = 0; i < 3; ++i)
      if (fv[i] > best_val) {
        best_val = fv[i];
        best_pt = simplex[i];
      }
  }

  out.iterations = it;
  if (!out.converged) out.flags.push_back("max-iterations");
  if (any_failed) out.flags.push_back("evaluation-failures");
  out.argmax = {best_pt[0], best_pt[1]};
  out.value = best_val;
  return out;
}

}  // namespace seqfisher::scan
