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

#include <cmath>
#include <cstdint>
#include <random>

#include "seqfisher/common.hpp"

namespace seqfisher {

// Reproducibility contract: all sampling goes through this wrapper. The std
// distribution adaptors are implementation-defined, so uniform and discrete
// draws are derived here directly from the raw 64-bit stream; results are
// bit-identical across toolchains for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two fresh uniforms per call).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Draw an index from a probability vector (any Eigen vector expression,
  /// evaluated without a copy) by CDF inversion.
  template <typename Derived>
  int discrete(const Eigen::MatrixBase<Derived>& p) {
    const double u = uniform01();
    double acc = 0.0;
    for (int k = 0; k + 1 < p.size(); ++k) {
      acc += p[k];
      if (u < acc) return k;
    }
    return static_cast<int>(p.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

/// Child seed for stream `index` of a parent seed (splitmix64 finalizer).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Ginibre complex matrix with iid standard normal entries.
inline CMatrix random_ginibre(Rng& rng, int rows, int cols) {
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      g(i, j) = Complex(rng.normal(), rng.normal());
  return g;
}

/// Full-rank random density matrix G·G†/Tr.
inline CMatrix random_density(Rng& rng, int dim) {
  const CMatrix g = random_ginibre(rng, dim, dim);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint().eval());
}

/// Haar-like random unitary: QR of a Ginibre draw with phase fixing.
inline CMatrix random_unitary(Rng& rng, int dim) {
  const CMatrix g = random_ginibre(rng, dim, dim);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace seqfisher
