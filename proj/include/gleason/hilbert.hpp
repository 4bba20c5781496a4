// Copyright 2026 The gleason-csm Authors
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

/// @file
/// Finite-dimensional Hilbert-space primitives over the real or complex field:
/// unit vectors, orthonormal bases (contexts), projectors, density matrices,
/// unitaries, and the seeded random generators built on them.
///
/// Every type is templated on its scalar (`double` or `std::complex<double>`)
/// and validates its invariants on construction; once built, values are
/// immutable.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gleason/core.hpp"

namespace gleason {

using Real = double;
using Complex = std::complex<double>;

enum class Field { Real, Complex };

inline const char* to_string(Field f) { return f == Field::Real ? "R" : "C"; }

template <class S>
concept ScalarType = std::same_as<S, Real> || std::same_as<S, Complex>;

template <ScalarType S>
inline constexpr Field field_of = std::same_as<S, Real> ? Field::Real : Field::Complex;

template <ScalarType S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <ScalarType S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using Rng = std::mt19937_64;

namespace detail {

template <ScalarType S>
S gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  if constexpr (std::same_as<S, Real>) {
    return n(rng);
  } else {
    const double re = n(rng);
    const double im = n(rng);
    return Complex(re, im) / std::numbers::sqrt2;
  }
}

template <ScalarType S>
Matrix<S> gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix<S> g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = gaussian<S>(rng);
  return g;
}

// Seed-taking constructors draw from separate streams, so passing the same
// seed to two of them does not correlate their outputs.
inline constexpr std::uint64_t kUnitaryStream = 0x5501;
inline constexpr std::uint64_t kVectorStream = 0x5502;
inline constexpr std::uint64_t kCompletionStream = 0x5503;
inline constexpr std::uint64_t kDensityStream = 0x5504;

template <class Derived>
double max_abs_entry(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <ScalarType S>
double real_part(S s) {
  return std::real(s);
}

inline void require_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

// ---------------------------------------------------------------------------

template <ScalarType S>
class UnitVector {
 public:
  /// Wraps an already normalized vector; throws INVALID_ARGUMENT otherwise.
  explicit UnitVector(Vector<S> v, double tol = default_tolerances().structural)
      : v_(std::move(v)) {
    if (v_.size() < 2) throw Error(ErrorCode::InvalidArgument, "unit vector needs dim >= 2");
    if (std::abs(v_.norm() - 1.0) > tol)
      throw Error(ErrorCode::InvalidArgument, "vector is not normalized");
  }

  static UnitVector normalized(const Vector<S>& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::DegenerateInput, "zero vector");
    return UnitVector(Vector<S>(v / n));
  }

  const Vector<S>& components() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  static constexpr Field field() { return field_of<S>; }
  S operator[](Eigen::Index i) const { return v_(i); }

  S inner(const UnitVector& other) const { return v_.dot(other.v_); }

  Matrix<S> outer() const { return v_ * v_.adjoint(); }

  /// Equality up to a unit-modulus factor.
  bool same_ray(const UnitVector& other, double tol = default_tolerances().derived) const {
    return dim() == other.dim() && detail::max_abs_entry(outer() - other.outer()) <= tol;
  }

 private:
  Vector<S> v_;
};

template <ScalarType S>
class Projector {
 public:
  explicit Projector(Matrix<S> m, const Tolerances& tol = default_tolerances()) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2)
      throw Error(ErrorCode::InvalidArgument, "projector must be square with dim >= 2");
    if (detail::max_abs_entry(m_ - m_.adjoint()) > tol.structural)
      throw Error(ErrorCode::InvalidArgument, "projector is not Hermitian");
    if (detail::max_abs_entry(m_ * m_ - m_) > tol.derived)
      throw Error(ErrorCode::InvalidArgument, "projector is not idempotent");
    const double tr = std::real(m_.trace());
    rank_ = static_cast<int>(std::lround(tr));
    if (rank_ < 1 || std::abs(tr - rank_) > tol.derived)
      throw Error(ErrorCode::InvalidArgument, "projector trace is not a positive integer");
  }

  static Projector onto(const UnitVector<S>& v) { return Projector(v.outer()); }

  const Matrix<S>& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int rank() const { return rank_; }

 private:
  Matrix<S> m_;
  int rank_ = 0;
};

/// Max-entry distance between two projectors. Extravalence and tabulated
/// lookup are both defined in terms of this distance.
template <ScalarType S>
double projector_distance(const Projector<S>& a, const Projector<S>& b) {
  detail::require_dim(a.dim(), b.dim(), "projector_distance");
  return detail::max_abs_entry(a.matrix() - b.matrix());
}

template <ScalarType S>
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix<S> m, const Tolerances& tol = default_tolerances())
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2)
      throw Error(ErrorCode::InvalidArgument, "density matrix must be square with dim >= 2");
    if (detail::max_abs_entry(m_ - m_.adjoint()) > tol.structural)
      throw Error(ErrorCode::InvalidArgument, "density matrix is not Hermitian");
    if (std::abs(std::real(m_.trace()) - 1.0) > tol.derived)
      throw Error(ErrorCode::InvalidArgument, "density matrix trace differs from 1");
    if (eigenvalues().minCoeff() < -tol.derived)
      throw Error(ErrorCode::InvalidArgument, "density matrix has a negative eigenvalue");
  }

  static DensityMatrix pure(const UnitVector<S>& v) { return DensityMatrix(v.outer()); }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(Matrix<S>(Matrix<S>::Identity(dim, dim) / static_cast<double>(dim)));
  }

  const Matrix<S>& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix<S>> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  /// Expectation value x†ρx.
  double expectation(const Vector<S>& x) const { return std::real(x.dot(m_ * x)); }

 private:
  Matrix<S> m_;
};

template <ScalarType S>
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Matrix<S> m, double tol = default_tolerances().derived) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw Error(ErrorCode::NotUnitary, "unitary must be square");
    const auto id = Matrix<S>::Identity(m_.rows(), m_.cols());
    if (detail::max_abs_entry(m_.adjoint() * m_ - id) > tol)
      throw Error(ErrorCode::NotUnitary, "U^dagger U differs from identity");
  }

  static UnitaryMatrix identity(Eigen::Index dim) { return UnitaryMatrix(Matrix<S>::Identity(dim, dim)); }

  const Matrix<S>& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }
  S determinant() const { return m_.determinant(); }

 private:
  Matrix<S> m_;
};

/// An ordered orthonormal basis with an identity label. Used for contexts.
template <ScalarType S>
class OrthonormalBasis {
 public:
  /// Columns of `vectors` are the basis vectors.
  OrthonormalBasis(Matrix<S> vectors, std::string label,
                   const Tolerances& tol = default_tolerances())
      : m_(std::move(vectors)), label_(std::move(label)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2)
      throw Error(ErrorCode::InvalidArgument, "basis needs exactly dim >= 2 vectors");
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      if (std::abs(m_.col(j).norm() - 1.0) > tol.structural)
        throw Error(ErrorCode::InvalidArgument, "basis vector " + std::to_string(j) + " not normalized");
    const Matrix<S> gram = m_.adjoint() * m_;
    if (detail::max_abs_entry(gram - Matrix<S>::Identity(m_.cols(), m_.cols())) > tol.derived)
      throw Error(ErrorCode::InvalidArgument, "basis vectors are not orthogonal");
  }

  static OrthonormalBasis standard(Eigen::Index dim, std::string label = "std") {
    return OrthonormalBasis(Matrix<S>::Identity(dim, dim), std::move(label));
  }

  Eigen::Index dim() const { return m_.rows(); }
  static constexpr Field field() { return field_of<S>; }
  const std::string& label() const { return label_; }
  const Matrix<S>& matrix() const { return m_; }

  UnitVector<S> vector(Eigen::Index i) const { return UnitVector<S>(Vector<S>(m_.col(i))); }
  Projector<S> projector(Eigen::Index i) const { return Projector<S>(Matrix<S>(m_.col(i) * m_.col(i).adjoint())); }

  OrthonormalBasis relabeled(std::string label) const { return OrthonormalBasis(m_, std::move(label)); }

  /// Returns U·B, the basis rotated by a unitary.
  OrthonormalBasis rotated(const UnitaryMatrix<S>& u, std::string label) const {
    detail::require_dim(u.dim(), dim(), "rotated");
    return OrthonormalBasis(Matrix<S>(u.matrix() * m_), std::move(label));
  }

 private:
  Matrix<S> m_;
  std::string label_;
};

// ---------------------------------------------------------------------------
// Constructions

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt, two passes).
/// The first output vector is parallel to the first input.
template <ScalarType S>
OrthonormalBasis<S> gram_schmidt(std::span<const Vector<S>> vectors, std::string label = "gs",
                                 const Tolerances& tol = default_tolerances()) {
  if (vectors.empty()) throw Error(ErrorCode::DegenerateInput, "no vectors");
  const Eigen::Index dim = vectors[0].size();
  if (static_cast<Eigen::Index>(vectors.size()) != dim)
    throw Error(ErrorCode::DegenerateInput, "need exactly dim vectors");
  Matrix<S> a(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    detail::require_dim(vectors[j].size(), dim, "gram_schmidt");
    a.col(j) = vectors[j];
  }
  Eigen::JacobiSVD<Matrix<S>> svd(a);
  if (!(svd.singularValues().minCoeff() > tol.gram_schmidt_sigma))
    throw Error(ErrorCode::DegenerateInput, "vectors are linearly dependent");

  Matrix<S> q = a;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return OrthonormalBasis<S>(std::move(q), std::move(label), tol);
}

template <ScalarType S>
OrthonormalBasis<S> gram_schmidt(const std::vector<Vector<S>>& vectors, std::string label = "gs") {
  return gram_schmidt<S>(std::span<const Vector<S>>(vectors), std::move(label));
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of the
/// triangular diagonal moved into Q.
template <ScalarType S>
UnitaryMatrix<S> random_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix<S> g = detail::gaussian_matrix<S>(dim, dim, rng);
  Eigen::HouseholderQR<Matrix<S>> qr(g);
  Matrix<S> q = qr.householderQ() * Matrix<S>::Identity(dim, dim);
  const Matrix<S>& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const S d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : S(1));
  }
  return UnitaryMatrix<S>(std::move(q));
}

template <ScalarType S>
UnitaryMatrix<S> random_unitary(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(child_seed(seed, detail::kUnitaryStream));
  return random_unitary<S>(dim, rng);
}

template <ScalarType S>
OrthonormalBasis<S> random_basis(Eigen::Index dim, std::uint64_t seed, std::string label = "rand") {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "dim must be >= 2");
  return OrthonormalBasis<S>(random_unitary<S>(dim, seed).matrix(), std::move(label));
}

template <ScalarType S>
UnitVector<S> random_unit_vector(Eigen::Index dim, Rng& rng) {
  return UnitVector<S>::normalized(detail::gaussian_matrix<S>(dim, 1, rng).col(0));
}

template <ScalarType S>
UnitVector<S> random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(child_seed(seed, detail::kVectorStream));
  return random_unit_vector<S>(dim, rng);
}

/// Basis whose first vector is exactly `v`; the rest is a random completion
/// drawn from `seed`. Contexts built this way from the same `v` share a
/// bit-identical outcome projector.
template <ScalarType S>
OrthonormalBasis<S> basis_containing(const UnitVector<S>& v, std::uint64_t seed,
                                     std::string label = "ctx") {
  Rng rng(child_seed(seed, detail::kCompletionStream));
  const Eigen::Index dim = v.dim();
  std::vector<Vector<S>> cols;
  cols.reserve(dim);
  cols.push_back(v.components());
  for (Eigen::Index j = 1; j < dim; ++j) cols.push_back(detail::gaussian_matrix<S>(dim, 1, rng).col(0));
  Matrix<S> q = gram_schmidt<S>(cols, label).matrix();
  q.col(0) = v.components();
  return OrthonormalBasis<S>(std::move(q), std::move(label));
}

/// Random density matrix of the given rank: random eigenbasis, eigenvalues
/// drawn from a flat Dirichlet distribution.
template <ScalarType S>
DensityMatrix<S> random_density_matrix(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > dim) throw Error(ErrorCode::InvalidArgument, "rank out of range");
  Rng rng(child_seed(seed, detail::kDensityStream));
  const UnitaryMatrix<S> u = random_unitary<S>(dim, rng);
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < rank; ++i) w(i) = expo(rng);
  w /= w.sum();
  Matrix<S> m = u.matrix() * w.cast<S>().asDiagonal() * u.matrix().adjoint();
  m = (m + m.adjoint()) / 2.0;
  m /= std::real(m.trace());
  return DensityMatrix<S>(std::move(m));
}

template <ScalarType S>
DensityMatrix<S> density_from_spectrum(const OrthonormalBasis<S>& basis, const Eigen::VectorXd& weights) {
  detail::require_dim(weights.size(), basis.dim(), "density_from_spectrum");
  Matrix<S> m = basis.matrix() * weights.cast<S>().asDiagonal() * basis.matrix().adjoint();
  m = (m + m.adjoint()) / 2.0;
  return DensityMatrix<S>(std::move(m));
}

// ---------------------------------------------------------------------------
// Born probabilities

/// trace(ρP), clamped into [0, 1].
template <ScalarType S>
double born_probability(const Projector<S>& p, const DensityMatrix<S>& rho,
                        const Tolerances& tol = default_tolerances()) {
  detail::require_dim(p.dim(), rho.dim(), "born_probability");
  const S tr = (rho.matrix() * p.matrix()).trace();
  const double v = std::real(tr);
  if (std::abs(std::imag(Complex(tr))) > tol.structural * static_cast<double>(p.dim()) ||
      v < -tol.derived || v > 1.0 + tol.derived)
    throw Error(ErrorCode::EvaluationRange, "trace(rho P) outside [0,1]");
  return std::clamp(v, 0.0, 1.0);
}

/// trace(P Q) for two rank-1 projectors: the transition probability between
/// two extravalence classes.
template <ScalarType S>
double transition_probability(const Projector<S>& from, const Projector<S>& to) {
  detail::require_dim(from.dim(), to.dim(), "transition_probability");
  const double v = std::real((from.matrix() * to.matrix()).trace());
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Unitary path to a permutation

/// Permutation matrix with P e_j = e_{perm[j]}.
inline Matrix<Complex> permutation_matrix(const std::vector<std::size_t>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Matrix<Complex> p = Matrix<Complex>::Zero(n, n);
  std::vector<bool> seen(perm.size(), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t i = perm[j];
    if (i >= perm.size() || seen[i]) throw Error(ErrorCode::InvalidArgument, "not a permutation");
    seen[i] = true;
    p(static_cast<Eigen::Index>(i), j) = 1.0;
  }
  return p;
}

/// Continuous unitary path U(t) = exp(t log P) from the identity to the
/// permutation matrix, sampled at t = k/steps for k = 0..steps (steps + 1
/// matrices). The logarithm takes principal-branch phases of the Schur
/// eigenvalues; a phase within 1e-9 of -pi is moved to +pi.
inline std::vector<UnitaryMatrix<Complex>> unitary_path_to_permutation(
    const std::vector<std::size_t>& perm, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "steps must be >= 2");
  if (perm.size() < 1) throw Error(ErrorCode::InvalidArgument, "empty permutation");
  const Matrix<Complex> p = permutation_matrix(perm);
  const auto n = p.rows();

  Eigen::ComplexSchur<Matrix<Complex>> schur(p);
  const Matrix<Complex>& z = schur.matrixU();
  const Matrix<Complex>& t = schur.matrixT();
  Eigen::VectorXd theta(n);
  constexpr double kBranchShift = 1e-9;
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::arg(t(i, i));
    if (a <= -std::numbers::pi + kBranchShift) a += 2.0 * std::numbers::pi;
    theta(i) = a;
  }

  std::vector<UnitaryMatrix<Complex>> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    const double tk = static_cast<double>(k) / steps;
    Eigen::VectorXcd phases(n);
    for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, tk * theta(i));
    Matrix<Complex> u = z * phases.asDiagonal() * z.adjoint();
    if (k == 0) {
      u = Matrix<Complex>::Identity(n, n);
    } else if (k == steps) {
      if (detail::max_abs_entry(u - p) > default_tolerances().derived)
        throw Error(ErrorCode::DegenerateInput, "path endpoint does not reach the permutation");
      u = p;
    }
    path.emplace_back(std::move(u));
  }
  return path;
}

/// Largest singular value.
template <class Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd{M(m)};
  return svd.singularValues()(0);
}

}  // namespace gleason
