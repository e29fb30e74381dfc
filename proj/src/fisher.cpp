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

#include "seqfisher/fisher.hpp"

#include <cmath>

namespace seqfisher::fisher {

namespace {

void check_param(const ParamSpec& p) {
  if (!(p.rel_step > 0.0))
    throw DimensionError("ParamSpec: derivative step must be positive");
  if (!std::isfinite(p.value))
    throw DimensionError("ParamSpec: theta must be finite");
}

}  // namespace

double d_theta(const std::function<double(double)>& f, const ParamSpec& p) {
  check_param(p);
  const double d = p.delta();
  const double hi = f(p.value + d), lo = f(p.value - d);
  if (!std::isfinite(hi) || !std::isfinite(lo))
    throw NumericError("d_theta: non-finite evaluation near theta=" +
                       std::to_string(p.value));
  return (hi - lo) / (2.0 * d);
}

RVector d_theta(const std::function<RVector(double)>& f, const ParamSpec& p) {
  check_param(p);
  const double d = p.delta();
  const RVector hi = f(p.value + d), lo = f(p.value - d);
  if (hi.size() != lo.size())
    throw DimensionError("d_theta: evaluation shape changed with theta");
  if (!hi.allFinite() || !lo.allFinite())
    throw NumericError("d_theta: non-finite evaluation");
  return (hi - lo) / (2.0 * d);
}

RMatrix d_theta(const std::function<RMatrix(double)>& f, const ParamSpec& p) {
  check_param(p);
  const double d = p.delta();
  const RMatrix hi = f(p.value + d), lo = f(p.value - d);
  if (hi.rows() != lo.rows() || hi.cols() != lo.cols())
    throw DimensionError("d_theta: evaluation shape changed with theta");
  if (!hi.allFinite() || !lo.allFinite())
    throw NumericError("d_theta: non-finite evaluation");
  return (hi - lo) / (2.0 * d);
}

double fi_of_distribution(const RVector& p, const RVector& dp,
                          std::vector<std::string>* flags) {
  if (p.size() != dp.size())
    throw DimensionError("fi_of_distribution: shape mismatch");
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (!(p[k] >= -kProbFloor) || p[k] > 1.0 + 1e-12)
      throw DimensionError("fi_of_distribution: invalid distribution");
  if (std::abs(p.sum() - 1.0) > 1e-10)
    throw DimensionError("fi_of_distribution: distribution does not sum to 1");
  if (std::abs(dp.sum()) > 1e-8)
    throw DimensionError("fi_of_distribution: derivative does not sum to ~0");

  double fi = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > kProbFloor) {
      fi += dp[k] * dp[k] / p[k];
    } else if (std::abs(dp[k]) > kDerivFloor) {
      // Vanishing probability with non-vanishing sensitivity: a genuine
      // near-divergence. Floor it, flag it, keep the scan alive.
      fi += dp[k] * dp[k] / kProbFloor;
      if (flags)
        flags->push_back("singular-term:outcome=" + std::to_string(k));
    }
  }
  return fi;
}

ConditionalFisher f_conditional(const chain::TransitionMatrix& p,
                                const RMatrix& dp,
                                const chain::StationaryDistribution& q) {
  const int n = p.n_outcomes();
  if (dp.rows() != n || dp.cols() != n || q.size() != n)
    throw DimensionError("f_conditional: shape mismatch");
  ConditionalFisher out;
  out.by_previous = RVector::Zero(n);
  for (int kp = 0; kp < n; ++kp) {
    std::vector<std::string> col_flags;
    out.by_previous[kp] =
        fi_of_distribution(p.column(kp), dp.col(kp), &col_flags);
    for (const auto& f : col_flags)
      out.flags.push_back(f + ";prev=" + std::to_string(kp));
    out.value += q[kp] * out.by_previous[kp];
  }
  return out;
}

double f_sequential(double fi_stationary, double fi_conditional,
                    std::int64_t n) {
  if (n < 1) throw DimensionError("f_sequential: need n >= 1");
  return fi_stationary + static_cast<double>(n - 1) * fi_conditional;
}

double enumerate_fi(const ChainModel& model, const ParamSpec& p, int n,
                    std::vector<std::string>* flags) {
  check_param(p);
  if (n < 1) throw DimensionError("enumerate_fi: need n >= 1");
  const double d = p.delta();
  const chain::TransitionMatrix p0 = model.transition_at(p.value);
  const chain::TransitionMatrix pp = model.transition_at(p.value + d);
  const chain::TransitionMatrix pm = model.transition_at(p.value - d);
  const RVector i0 = model.init_at(p.value);
  const RVector ip = model.init_at(p.value + d);
  const RVector im = model.init_at(p.value - d);
  const int n_out = p0.n_outcomes();
  if (pp.n_outcomes() != n_out || pm.n_outcomes() != n_out ||
      i0.size() != n_out || ip.size() != n_out || im.size() != n_out)
    throw DimensionError("enumerate_fi: model shape changed with theta");
  if (std::pow(static_cast<double>(n_out), n) > 1e7)
    throw DimensionError("enumerate_fi: n_outcomes^n exceeds the 1e7 guard");

  // Depth-first walk over all sequences, carrying the three running
  // products; the sum order is fixed by the walk, hence deterministic.
  double fi = 0.0;
  std::vector<int> seq(static_cast<std::size_t>(n), 0);
  std::function<void(int, double, double, double)> walk =
      [&](int depth, double prob0, double prob_hi, double prob_lo) {
        if (!std::isfinite(prob0) || !std::isfinite(prob_hi) ||
            !std::isfinite(prob_lo))
          throw NumericError("enumerate_fi: non-finite sequence probability");
        if (depth == n) {
          const double dp = (prob_hi - prob_lo) / (2.0 * d);
          if (prob0 > kProbFloor) {
            fi += dp * dp / prob0;
          } else if (std::abs(dp) > kDerivFloor) {
            fi += dp * dp / kProbFloor;
            if (flags) flags->push_back("singular-sequence");
          }
          return;
        }
        for (int w = 0; w < n_out; ++w) {
          seq[depth] = w;
          if (depth == 0) {
            walk(1, i0[w], ip[w], im[w]);
          } else {
            const int prev = seq[depth - 1];
            walk(depth + 1, prob0 * p0.matrix()(w, prev),
                 prob_hi * pp.matrix()(w, prev),
                 prob_lo * pm.matrix()(w, prev));
          }
        }
      };
  walk(0, 1.0, 1.0, 1.0);
  return fi;
}

}  // namespace seqfisher::fisher
