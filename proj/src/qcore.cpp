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

#include "seqfisher/qcore.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace seqfisher::qcore {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kSuperopTol = 1e-10;
constexpr double kSymmetrizeTol = 1e-10;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_square(const CMatrix& m) { return m.rows() == m.cols(); }

}  // namespace

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw DimensionError("unvec: vector length does not match dim^2");
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix::DensityMatrix(CMatrix entries) {
  if (!is_square(entries) || entries.rows() == 0)
    throw DimensionError("DensityMatrix: entries must be square and non-empty");
  const double asym = max_abs(entries - entries.adjoint().eval());
  if (asym > kHermTol)
    throw NumericError("DensityMatrix: not Hermitian, max asymmetry " +
                       std::to_string(asym));
  entries = 0.5 * (entries + entries.adjoint().eval());
  const double trace_dev = std::abs(entries.trace() - Complex(1.0, 0.0));
  if (trace_dev > kTraceTol)
    throw NumericError("DensityMatrix: trace deviates from 1 by " +
                       std::to_string(trace_dev));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries,
                                            Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("DensityMatrix: eigensolver failed");
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol)
    throw NumericError("DensityMatrix: negative eigenvalue " +
                       std::to_string(min_eig));
  entries_ = std::move(entries);
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw DimensionError("DensityMatrix::pure: zero vector");
  CVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw DimensionError("DensityMatrix: dim must be positive");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::diagonal(const RVector& populations) {
  CMatrix m = CMatrix::Zero(populations.size(), populations.size());
  for (Eigen::Index k = 0; k < populations.size(); ++k)
    m(k, k) = populations[k];
  return DensityMatrix(std::move(m));
}

Superoperator::Superoperator(CMatrix entries, SuperopKind kind)
    : kind_(kind) {
  if (!is_square(entries) || entries.rows() == 0)
    throw DimensionError("Superoperator: entries must be square");
  const auto d = static_cast<int>(std::llround(std::sqrt(
      static_cast<double>(entries.rows()))));
  if (static_cast<Eigen::Index>(d) * d != entries.rows())
    throw DimensionError("Superoperator: side length is not a perfect square");
  dim_ = d;
  entries_ = std::move(entries);

  // Tr[S(ρ)] = vec(I)† · S · vec(ρ), so comparing that row functional
  // against vec(I)† (propagator) or zero (generator) checks the trace
  // behaviour on *every* input, not just a probe set.
  const Eigen::RowVectorXcd id_row = vec(CMatrix::Identity(d, d)).adjoint();
  const Eigen::RowVectorXcd trace_row = id_row * entries_;
  const double dev = (kind_ == SuperopKind::propagator)
                         ? (trace_row - id_row).cwiseAbs().maxCoeff()
                         : trace_row.cwiseAbs().maxCoeff();
  if (dev > kSuperopTol)
    throw NumericError(
        kind_ == SuperopKind::propagator
            ? "Superoperator: propagator is not trace-preserving"
            : "Superoperator: generator does not annihilate trace");
}

Superoperator Superoperator::identity(int dim) {
  return Superoperator(CMatrix::Identity(dim * dim, dim * dim),
                       SuperopKind::propagator);
}

CMatrix Superoperator::apply_raw(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw DimensionError("Superoperator::apply_raw: dimension mismatch");
  return unvec(entries_ * vec(rho), dim_);
}

DensityMatrix Superoperator::apply(const DensityMatrix& rho) const {
  if (kind_ != SuperopKind::propagator)
    throw DimensionError("Superoperator::apply: only propagators map states");
  CMatrix out = apply_raw(rho.matrix());
  const double asym = max_abs(out - out.adjoint().eval());
  if (asym >= kSymmetrizeTol)
    throw NumericError("propagation broke Hermiticity by " +
                       std::to_string(asym));
  out = 0.5 * (out + out.adjoint().eval());
  return DensityMatrix(std::move(out));
}

HamiltonianSpec::HamiltonianSpec(CMatrix entries) {
  if (!is_square(entries) || entries.rows() == 0)
    throw DimensionError("HamiltonianSpec: entries must be square");
  if (max_abs(entries - entries.adjoint().eval()) > kHermTol)
    throw NumericError("HamiltonianSpec: not Hermitian");
  entries_ = std::move(entries);
}

HamiltonianSpec HamiltonianSpec::zero(int dim) {
  return HamiltonianSpec(CMatrix::Zero(dim, dim));
}

Superoperator dissipator(const CMatrix& jump_op) {
  if (jump_op.rows() != jump_op.cols() || jump_op.rows() == 0)
    throw DimensionError("dissipator: jump operator must be square");
  const auto d = jump_op.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix ldl = jump_op.adjoint() * jump_op;
  CMatrix s = kron(jump_op.conjugate(), jump_op);
  s -= 0.5 * kron(id, ldl);
  s -= 0.5 * kron(ldl.transpose(), id);
  return Superoperator(std::move(s), SuperopKind::generator);
}

Superoperator liouvillian(const HamiltonianSpec& h,
                          const std::vector<Jump>& jumps) {
  const auto d = h.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  const Complex im(0.0, 1.0);
  CMatrix s = -im * (kron(id, h.matrix()) - kron(h.matrix().transpose(), id));
  for (const auto& j : jumps) {
    if (j.rate < 0.0)
      throw DimensionError("liouvillian: negative jump rate");
    if (j.op.rows() != d || j.op.cols() != d)
      throw DimensionError("liouvillian: jump operator dimension mismatch");
    s += j.rate * dissipator(j.op).matrix();
  }
  return Superoperator(std::move(s), SuperopKind::generator);
}

Superoperator propagate(const Superoperator& gen, double tau) {
  if (gen.kind() != SuperopKind::generator)
    throw DimensionError("propagate: input must be a generator");
  if (!std::isfinite(tau) || tau < 0.0)
    throw DimensionError("propagate: tau must be finite and nonnegative");
  CMatrix e = (gen.matrix() * tau).exp();
  return Superoperator(std::move(e), SuperopKind::propagator);
}

Superoperator propagate_eig(const Superoperator& gen, double tau) {
  if (gen.kind() != SuperopKind::generator)
    throw DimensionError("propagate_eig: input must be a generator");
  if (!std::isfinite(tau) || tau < 0.0)
    throw DimensionError("propagate_eig: tau must be finite and nonnegative");
  Eigen::ComplexEigenSolver<CMatrix> es(gen.matrix());
  if (es.info() != Eigen::Success)
    throw NumericError("propagate_eig: eigensolver did not converge");
  const CMatrix& v = es.eigenvectors();
  const CMatrix vinv = Eigen::PartialPivLU<CMatrix>(v).inverse();
  const CVector phases = (es.eigenvalues() * tau).array().exp();
  CMatrix e = v * phases.asDiagonal() * vinv;
  // Certify the basis was good enough for the advertised accuracy.
  const double recon =
      (v * es.eigenvalues().asDiagonal() * vinv - gen.matrix())
          .cwiseAbs()
          .maxCoeff();
  if (!e.allFinite() || recon > 1e-8)
    throw NumericError("propagate_eig: generator too close to defective");
  return Superoperator(std::move(e), SuperopKind::propagator);
}

std::vector<Complex> spectrum(const Superoperator& s) {
  Eigen::ComplexEigenSolver<CMatrix> es(s.matrix(), false);
  if (es.info() != Eigen::Success)
    throw NumericError("spectrum: eigensolver did not converge");
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& joint, int dim_first,
                            int dim_second, Subsystem keep) {
  if (dim_first < 1 || dim_second < 1 ||
      joint.dim() != dim_first * dim_second)
    throw DimensionError("partial_trace: joint dimension does not factor");
  const CMatrix& j = joint.matrix();
  if (keep == Subsystem::first) {
    CMatrix out = CMatrix::Zero(dim_first, dim_first);
    for (int a = 0; a < dim_first; ++a)
      for (int b = 0; b < dim_first; ++b)
        for (int c = 0; c < dim_second; ++c)
          out(a, b) += j(a * dim_second + c, b * dim_second + c);
    return DensityMatrix(std::move(out));
  }
  CMatrix out = CMatrix::Zero(dim_second, dim_second);
  for (int c = 0; c < dim_second; ++c)
    for (int e = 0; e < dim_second; ++e)
      for (int a = 0; a < dim_first; ++a)
        out(c, e) += j(a * dim_second + c, a * dim_second + e);
  return DensityMatrix(std::move(out));
}

}  // namespace seqfisher::qcore
