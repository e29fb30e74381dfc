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

#include "seqfisher/estimate.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "seqfisher/rng.hpp"

namespace seqfisher::estimate {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kHardZero = 1e-300;

double log_likelihood(const TransitionCounts& counts, const RVector& init,
                      const RMatrix& p) {
  if (init[counts.first_outcome] < kHardZero)
    throw NumericError("mle: initial outcome " +
                       std::to_string(counts.first_outcome) +
                       " has vanishing model probability");
  double ll = std::log(init[counts.first_outcome]);
  for (Eigen::Index kp = 0; kp < p.cols(); ++kp)
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      const auto c = counts.counts(k, kp);
      if (c == 0) continue;
      if (p(k, kp) < kHardZero)
        throw NumericError("mle: observed transition " + std::to_string(kp) +
                           "->" + std::to_string(k) +
                           " has vanishing model probability");
      ll += static_cast<double>(c) * std::log(p(k, kp));
    }
  return ll;
}

/// Bisection solve of s(θ) = target on [lo, hi]; needs a sign change.
double invert_monotone(const std::function<double(double)>& s, double target,
                       double lo, double hi) {
  double f_lo = s(lo) - target;
  double f_hi = s(hi) - target;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (!(f_lo * f_hi < 0.0))
    throw NumericError("invert_monotone: no sign change on the bracket");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = s(mid) - target;
    if (f_mid == 0.0) return mid;
    if (f_mid * f_lo < 0.0) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RMatrix TransitionCounts::normalized(
    std::vector<int>* undefined_columns) const {
  const auto n = counts.cols();
  RMatrix p(n, n);
  for (Eigen::Index kp = 0; kp < n; ++kp) {
    const double visits =
        static_cast<double>(counts.col(kp).sum());
    if (visits == 0.0) {
      p.col(kp).setConstant(std::numeric_limits<double>::quiet_NaN());
      if (undefined_columns)
        undefined_columns->push_back(static_cast<int>(kp));
      continue;
    }
    for (Eigen::Index k = 0; k < n; ++k)
      p(k, kp) = static_cast<double>(counts(k, kp)) / visits;
  }
  return p;
}

TransitionCounts count_transitions(const chain::Trajectory& traj,
                                   int n_outcomes) {
  if (traj.length() < 2)
    throw DimensionError("count_transitions: need at least 2 outcomes");
  TransitionCounts out;
  out.counts.setZero(n_outcomes, n_outcomes);
  out.first_outcome = traj.outcomes.front();
  for (std::size_t i = 0; i + 1 < traj.outcomes.size(); ++i) {
    const int from = traj.outcomes[i];
    const int to = traj.outcomes[i + 1];
    if (from < 0 || from >= n_outcomes || to < 0 || to >= n_outcomes)
      throw DimensionError("count_transitions: outcome index out of range");
    ++out.counts(to, from);
  }
  out.total = traj.length() - 1;
  return out;
}

MleResult mle(const chain::Trajectory& traj, const fisher::ChainModel& model,
              double lo, double hi) {
  if (!(lo < hi)) throw DimensionError("mle: need lo < hi");
  const int n_outcomes = model.transition_at(lo).n_outcomes();
  const TransitionCounts counts = count_transitions(traj, n_outcomes);
  auto ll = [&](double theta) {
    return log_likelihood(counts, model.init_at(theta),
                          model.transition_at(theta).matrix());
  };
  const double tol = 1e-6 * std::max({std::abs(lo), std::abs(hi), 1.0});
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = ll(x1), f2 = ll(x2);
  int iters = 0;
  while (b - a > tol && iters < 300) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = ll(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = ll(x2);
    }
    ++iters;
  }
  MleResult res;
  res.theta_hat = (f1 >= f2) ? x1 : x2;
  res.log_likelihood = std::max(f1, f2);
  res.iterations = iters;
  res.boundary = (res.theta_hat - lo < 2.0 * tol) ||
                 (hi - res.theta_hat < 2.0 * tol);
  return res;
}

RVector empirical_distribution(const chain::Trajectory& traj,
                               int n_outcomes) {
  if (traj.length() < 1)
    throw DimensionError("empirical_distribution: empty trajectory");
  RVector freq = RVector::Zero(n_outcomes);
  for (int k : traj.outcomes) {
    if (k < 0 || k >= n_outcomes)
      throw DimensionError("empirical_distribution: index out of range");
    freq[k] += 1.0;
  }
  return freq / static_cast<double>(traj.length());
}

chain::Trajectory subsample(const chain::Trajectory& traj,
                            std::int64_t delta) {
  if (delta < 1) throw DimensionError("subsample: need delta >= 1");
  chain::Trajectory out;
  out.seed = traj.seed;
  out.init = traj.init;
  for (std::int64_t i = 0; i < traj.length(); i += delta)
    out.outcomes.push_back(traj.outcomes[static_cast<std::size_t>(i)]);
  return out;
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mle:
      return "mle";
    case EstimatorKind::transition_inversion:
      return "transition-inversion";
    case EstimatorKind::empirical_distribution:
      return "empirical-distribution";
  }
  return "unknown";
}

McReport monte_carlo(const fisher::ChainModel& model, double theta0,
                     const MonteCarloConfig& cfg) {
  if (cfg.n_trajectories < 2)
    throw DimensionError("monte_carlo: need at least 2 trajectories");
  if (cfg.n < 2) throw DimensionError("monte_carlo: need n >= 2");
  if (!(cfg.bracket_lo < theta0 && theta0 < cfg.bracket_hi))
    throw DimensionError("monte_carlo: bracket must contain theta0");

  const chain::TransitionMatrix p0 = model.transition_at(theta0);
  const RVector init0 = model.init_at(theta0);
  fisher::ParamSpec spec{"theta", theta0};
  const RMatrix dp = fisher::d_theta(
      std::function<RMatrix(double)>(
          [&](double th) { return model.transition_at(th).matrix(); }),
      spec);
  const auto q0 = chain::stationary(p0);
  const double fi_rate = fisher::f_conditional(p0, dp, q0).value;

  std::vector<double> estimates;
  estimates.reserve(cfg.n_trajectories);
  int failures = 0;
  for (int i = 0; i < cfg.n_trajectories; ++i) {
    const chain::Trajectory traj =
        chain::sample(p0, cfg.n, init0, split_seed(cfg.seed, i));
    try {
      double theta_hat = 0.0;
      switch (cfg.kind) {
        case EstimatorKind::mle:
          theta_hat = mle(traj, model, cfg.bracket_lo, cfg.bracket_hi)
                          .theta_hat;
          break;
        case EstimatorKind::transition_inversion: {
          const TransitionCounts counts =
              count_transitions(traj, p0.n_outcomes());
          const double visits =
              static_cast<double>(counts.counts.col(0).sum());
          if (visits == 0.0)
            throw NumericError("transition inversion: state 0 never visited");
          const double observed =
              static_cast<double>(counts.counts(0, 0)) / visits;
          theta_hat = invert_monotone(
              [&](double th) {
                return model.transition_at(th).matrix()(0, 0);
              },
              observed, cfg.bracket_lo, cfg.bracket_hi);
          break;
        }
        case EstimatorKind::empirical_distribution: {
          const double observed =
              empirical_distribution(traj, p0.n_outcomes())[0];
          theta_hat = invert_monotone(
              [&](double th) { return model.init_at(th)[0]; }, observed,
              cfg.bracket_lo, cfg.bracket_hi);
          break;
        }
      }
      estimates.push_back(theta_hat);
    } catch (const Error&) {
      ++failures;
    }
  }

  if (failures * 100 >= cfg.n_trajectories)
    throw NumericError("monte_carlo: estimator failed on " +
                       std::to_string(failures) + " of " +
                       std::to_string(cfg.n_trajectories) + " trajectories");

  const auto n_ok = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n_ok;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (n_ok - 1.0);

  McReport rep;
  rep.n_trajectories = cfg.n_trajectories;
  rep.n_per_trajectory = cfg.n;
  rep.kind = cfg.kind;
  rep.theta0 = theta0;
  rep.mean = mean;
  rep.variance = var;
  rep.bias = mean - theta0;
  rep.fi_conditional = fi_rate;
  rep.predicted_bound = 1.0 / (static_cast<double>(cfg.n) * fi_rate);
  rep.ratio = var * static_cast<double>(cfg.n) * fi_rate;
  rep.failures = failures;
  rep.seed = cfg.seed;
  return rep;
}

}  // namespace seqfisher::estimate
