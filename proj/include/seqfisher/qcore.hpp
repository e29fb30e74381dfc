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

#include <vector>

#include "seqfisher/common.hpp"

namespace seqfisher::qcore {

// Vectorization convention, fixed once for the whole library:
// column stacking, vec(A·ρ·B) = (Bᵀ ⊗ A)·vec(ρ). Eigen matrices are
// column-major, so vec(ρ) is just a flat view of the storage.

/// Flatten a d×d matrix into a d² vector by stacking columns.
CVector vec(const CMatrix& m);

/// Inverse of vec for a d²-length vector.
CMatrix unvec(const CVector& v, int dim);

/// Kronecker product a ⊗ b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// d×d complex Hermitian, unit-trace, positive-semidefinite state.
/// Construction validates all three properties (tolerances 1e-12, 1e-12,
/// min eigenvalue ≥ −1e-10) and symmetrizes away sub-tolerance asymmetry.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix maximally_mixed(int dim);
  /// Diagonal state from a probability vector (validated).
  static DensityMatrix diagonal(const RVector& populations);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  /// Real diagonal (populations).
  RVector populations() const { return entries_.diagonal().real(); }

 private:
  CMatrix entries_;
};

enum class SuperopKind { generator, propagator };

/// d²×d² matrix acting on vectorized density matrices. A generator
/// annihilates trace; a propagator preserves it (both checked on
/// construction against test inputs, tolerance 1e-10).
class Superoperator {
 public:
  Superoperator(CMatrix entries, SuperopKind kind);

  static Superoperator identity(int dim);

  int dim() const { return dim_; }
  SuperopKind kind() const { return kind_; }
  const CMatrix& matrix() const { return entries_; }

  /// Apply to a raw matrix, no state validation on the result.
  CMatrix apply_raw(const CMatrix& rho) const;

  /// Propagator-only: apply to a state. The result is symmetrized if its
  /// asymmetry is below 1e-10, otherwise a NumericError is raised; the
  /// DensityMatrix constructor then re-validates trace and positivity.
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  CMatrix entries_;
  int dim_;
  SuperopKind kind_;
};

/// d×d Hermitian operator with energies in units of γ.
class HamiltonianSpec {
 public:
  explicit HamiltonianSpec(CMatrix entries);
  static HamiltonianSpec zero(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }

 private:
  CMatrix entries_;
};

struct Jump {
  double rate;  // nonnegative, units of γ
  CMatrix op;
};

/// Dissipator superoperator of a jump operator:
/// ρ ↦ LρL† − ½{L†L, ρ}, in vectorized form.
Superoperator dissipator(const CMatrix& jump_op);

/// Generator −i[H,·] + Σ_j rate_j · dissipator(L_j).
Superoperator liouvillian(const HamiltonianSpec& h, const std::vector<Jump>& jumps);

/// Propagator e^{gen·τ} by scaling-and-squaring Padé (default route).
Superoperator propagate(const Superoperator& gen, double tau);

/// Propagator e^{gen·τ} by eigendecomposition; cross-check route for the
/// default. Raises NumericError when the eigenbasis is too ill-conditioned
/// to certify the result (near-defective generator).
Superoperator propagate_eig(const Superoperator& gen, double tau);

/// Eigenvalues of a superoperator, sorted by descending real part, ties
/// broken by descending imaginary part.
std::vector<Complex> spectrum(const Superoperator& s);

enum class Subsystem { first, second };

/// Partial trace of a state on H_first ⊗ H_second (index convention of
/// kron: joint row index = i_first·dim_second + i_second).
DensityMatrix partial_trace(const DensityMatrix& joint, int dim_first,
                            int dim_second, Subsystem keep);

}  // namespace seqfisher::qcore
