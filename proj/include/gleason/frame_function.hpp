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
/// Frame functions: non-negative functions on the unit sphere that sum to one
/// over every orthonormal basis. This header checks the frame condition,
/// fits the quadratic form x -> x†ρx that makes a frame function regular,
/// and estimates the extreme values and latitude bands used by the squeeze
/// argument on the real 3-sphere.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gleason/hilbert.hpp"

namespace gleason {

enum class FrameKind { Tabulated, ClosedForm, Born };

inline const char* to_string(FrameKind k) {
  switch (k) {
    case FrameKind::Tabulated: return "tabulated";
    case FrameKind::ClosedForm: return "closed_form";
    case FrameKind::Born: return "born";
  }
  return "unknown";
}

template <ScalarType S>
struct TabulatedEntry {
  UnitVector<S> direction;
  double value;
};

namespace detail {

/// Rotates the global phase so that the largest-modulus component is real
/// and positive. Any function of the result is phase invariant.
template <ScalarType S>
Vector<S> canonical_phase(const Vector<S>& x) {
  Eigen::Index k = 0;
  x.cwiseAbs().maxCoeff(&k);
  const double a = std::abs(x(k));
  if (a == 0.0) return x;
  if constexpr (std::same_as<S, Real>) return x(k) < 0.0 ? Vector<S>(-x) : x;
  else return x * (std::conj(x(k)) / a);
}

/// Orthonormal basis of the orthogonal complement of x (columns).
template <ScalarType S>
Matrix<S> orthocomplement(const Vector<S>& x) {
  const Eigen::Index d = x.size();
  Eigen::HouseholderQR<Matrix<S>> qr{Matrix<S>(x)};
  Matrix<S> q = qr.householderQ() * Matrix<S>::Identity(d, d);
  return q.rightCols(d - 1);
}

}  // namespace detail

/// A candidate probability assignment on unit vectors.
///
/// Values are range-checked on every evaluation: anything outside
/// [-1e-10, 1 + 1e-10] raises EVALUATION_RANGE, in-range values are clamped
/// to [0, 1]. Closed-form evaluators see a phase-canonicalized argument, so
/// f(e^{ia} x) = f(x) always holds.
template <ScalarType S>
class FrameFunction {
 public:
  using Evaluator = std::function<double(const Vector<S>&)>;

  static FrameFunction born(DensityMatrix<S> rho) {
    auto st = std::make_shared<State>();
    st->kind = FrameKind::Born;
    st->dim = rho.dim();
    st->name = "born";
    st->rho.emplace(std::move(rho));
    return FrameFunction(std::move(st));
  }

  static FrameFunction closed_form(Eigen::Index dim, Evaluator fn, std::string name = "closed_form") {
    if (dim < 2) throw Error(ErrorCode::InvalidArgument, "dim must be >= 2");
    auto st = std::make_shared<State>();
    st->kind = FrameKind::ClosedForm;
    st->dim = dim;
    st->name = std::move(name);
    st->fn = std::move(fn);
    return FrameFunction(std::move(st));
  }

  static FrameFunction constant(Eigen::Index dim) {
    const double c = 1.0 / static_cast<double>(dim);
    return closed_form(dim, [c](const Vector<S>&) { return c; }, "constant");
  }

  static FrameFunction tabulated(Eigen::Index dim, std::vector<TabulatedEntry<S>> entries) {
    if (dim < 2) throw Error(ErrorCode::InvalidArgument, "dim must be >= 2");
    if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty table");
    for (const auto& e : entries) detail::require_dim(e.direction.dim(), dim, "tabulated entry");
    auto st = std::make_shared<State>();
    st->kind = FrameKind::Tabulated;
    st->dim = dim;
    st->name = "tabulated";
    st->entries = std::move(entries);
    return FrameFunction(std::move(st));
  }

  FrameKind kind() const { return st_->kind; }
  Eigen::Index dim() const { return st_->dim; }
  static constexpr Field field() { return field_of<S>; }
  const std::string& name() const { return st_->name; }
  const std::optional<DensityMatrix<S>>& rho() const { return st_->rho; }
  const std::vector<TabulatedEntry<S>>& entries() const { return st_->entries; }

  double operator()(const UnitVector<S>& x) const { return checked(raw(x)); }

  double operator()(const Vector<S>& x) const { return (*this)(UnitVector<S>(x, 1e-10)); }

  /// Orthonormal bases that can be assembled from stored directions
  /// (tabulated functions only). Enumeration stops at `cap` bases.
  std::vector<OrthonormalBasis<S>> stored_bases(std::size_t cap = 10000,
                                                const Tolerances& tol = default_tolerances()) const {
    std::vector<OrthonormalBasis<S>> out;
    if (kind() != FrameKind::Tabulated) return out;
    const auto& e = st_->entries;
    const std::size_t n = e.size();
    std::vector<std::vector<char>> orth(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        orth[i][j] = orth[j][i] = std::abs(e[i].direction.inner(e[j].direction)) <= tol.derived;
    std::vector<std::size_t> pick;
    const auto want = static_cast<std::size_t>(dim());
    std::function<void(std::size_t)> dfs = [&](std::size_t from) {
      if (out.size() >= cap) return;
      if (pick.size() == want) {
        Matrix<S> m(dim(), dim());
        for (std::size_t k = 0; k < want; ++k) m.col(static_cast<Eigen::Index>(k)) = e[pick[k]].direction.components();
        out.emplace_back(std::move(m), "stored");
        return;
      }
      for (std::size_t c = from; c < n; ++c) {
        bool ok = true;
        for (std::size_t q : pick) ok = ok && orth[q][c];
        if (!ok) continue;
        pick.push_back(c);
        dfs(c + 1);
        pick.pop_back();
      }
    };
    dfs(0);
    return out;
  }

 private:
  struct State {
    FrameKind kind = FrameKind::ClosedForm;
    Eigen::Index dim = 0;
    std::string name;
    Evaluator fn;
    std::optional<DensityMatrix<S>> rho;
    std::vector<TabulatedEntry<S>> entries;
  };

  explicit FrameFunction(std::shared_ptr<const State> st) : st_(std::move(st)) {}

  double raw(const UnitVector<S>& x) const {
    detail::require_dim(x.dim(), dim(), "frame function argument");
    switch (st_->kind) {
      case FrameKind::Born:
        return st_->rho->expectation(x.components());
      case FrameKind::ClosedForm:
        return st_->fn(detail::canonical_phase<S>(x.components()));
      case FrameKind::Tabulated: {
        const Matrix<S> px = x.outer();
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (const auto& e : st_->entries) {
          const double d = detail::max_abs_entry(px - e.direction.outer());
          if (d < best) {
            best = d;
            value = e.value;
          }
        }
        if (best > default_tolerances().tabulated_match)
          throw Error(ErrorCode::OffTable, "no stored direction within tolerance");
        return value;
      }
    }
    return 0.0;
  }

  static double checked(double v) {
    const double tol = default_tolerances().derived;
    if (!(v >= -tol && v <= 1.0 + tol))
      throw Error(ErrorCode::EvaluationRange, "frame function value " + std::to_string(v) + " outside [0,1]");
    return std::clamp(v, 0.0, 1.0);
  }

  std::shared_ptr<const State> st_;
};

// ---------------------------------------------------------------------------
// Frame condition

template <ScalarType S>
struct FrameReport {
  double max_deviation = 0.0;
  std::size_t n_bases = 0;
  std::optional<OrthonormalBasis<S>> worst_basis;
  double worst_sum = 0.0;
  bool used_stored_bases = false;
};

namespace detail {

template <ScalarType S>
double basis_sum(const FrameFunction<S>& f, const Matrix<S>& basis) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) s += f(UnitVector<S>(Vector<S>(basis.col(j)), 1e-10));
  return s;
}

template <ScalarType S>
FrameReport<S> frame_report_over(const FrameFunction<S>& f, const std::vector<OrthonormalBasis<S>>& bases) {
  FrameReport<S> rep;
  rep.n_bases = bases.size();
  for (const auto& b : bases) {
    const double s = basis_sum(f, b.matrix());
    const double dev = std::abs(s - 1.0);
    if (!rep.worst_basis || dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_sum = s;
      rep.worst_basis = b;
    }
  }
  return rep;
}

}  // namespace detail

/// Frame condition over an explicit list of bases.
template <ScalarType S>
FrameReport<S> check_frame_condition(const FrameFunction<S>& f, const std::vector<OrthonormalBasis<S>>& bases) {
  if (bases.empty()) throw Error(ErrorCode::InvalidArgument, "no bases");
  for (const auto& b : bases) detail::require_dim(b.dim(), f.dim(), "check_frame_condition");
  return detail::frame_report_over(f, bases);
}

/// max |sum_i f(x_i) - 1| over `n_bases` Haar-random bases. Tabulated
/// functions are only defined on their stored directions, so for them the
/// check runs over every basis assembled from the table instead.
template <ScalarType S>
FrameReport<S> check_frame_condition(const FrameFunction<S>& f, std::size_t n_bases, std::uint64_t seed) {
  if (n_bases < 1) throw Error(ErrorCode::InvalidArgument, "n_bases must be >= 1");
  if (f.kind() == FrameKind::Tabulated) {
    auto bases = f.stored_bases();
    if (bases.empty()) throw Error(ErrorCode::InvalidArgument, "table contains no orthonormal basis");
    auto rep = detail::frame_report_over(f, bases);
    rep.used_stored_bases = true;
    return rep;
  }
  struct Worst {
    double dev = -1.0;
    double sum = 0.0;
    Matrix<S> basis;
  };
  auto chunks = run_chunked<Worst>(n_bases, seed, [&](std::size_t, std::size_t b, std::size_t e, std::uint64_t s) {
    Rng rng(s);
    Worst w;
    for (std::size_t i = b; i < e; ++i) {
      Matrix<S> u = random_unitary<S>(f.dim(), rng).matrix();
      const double sum = detail::basis_sum(f, u);
      const double dev = std::abs(sum - 1.0);
      if (dev > w.dev) w = Worst{dev, sum, std::move(u)};
    }
    return w;
  });
  FrameReport<S> rep;
  rep.n_bases = n_bases;
  const Worst* best = &chunks.front();
  for (const auto& c : chunks)
    if (c.dev > best->dev) best = &c;
  rep.max_deviation = best->dev;
  rep.worst_sum = best->sum;
  rep.worst_basis.emplace(best->basis, "witness");
  return rep;
}

// ---------------------------------------------------------------------------
// Regularity: least-squares fit of a Hermitian form

enum class Verdict { Regular, ViolatesFrame, NotRegular };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Regular: return "REGULAR";
    case Verdict::ViolatesFrame: return "VIOLATES_FRAME";
    case Verdict::NotRegular: return "NOT_REGULAR";
  }
  return "UNKNOWN";
}

template <ScalarType S>
struct RegularityReport {
  DensityMatrix<S> fitted_rho;
  Matrix<S> raw_fit;  // Hermitian least-squares solution before PSD projection
  double max_residual = 0.0;
  std::size_t n_samples = 0;
  Verdict verdict = Verdict::NotRegular;
  double frame_deviation = 0.0;
  std::optional<UnitVector<S>> residual_witness;
  double witness_value = 0.0;  // f at the witness
  double witness_fit = 0.0;    // x†ρx at the witness
  std::optional<OrthonormalBasis<S>> frame_witness;
};

namespace detail {

/// Number of real parameters of a dim x dim Hermitian (or real symmetric) form.
template <ScalarType S>
Eigen::Index hermitian_param_count(Eigen::Index d) {
  if constexpr (std::same_as<S, Real>) return d * (d + 1) / 2;
  else return d * d;
}

/// Row of the linear map H -> x†Hx in the parameterization
/// (diagonal, Re H_ij for i<j, Im H_ij for i<j).
template <ScalarType S>
Eigen::RowVectorXd hermitian_features(const Vector<S>& x) {
  const Eigen::Index d = x.size();
  Eigen::RowVectorXd row(hermitian_param_count<S>(d));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) row(k++) = std::norm(x(i));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) row(k++) = 2.0 * std::real(std::conj(x(i)) * x(j));
  if constexpr (std::same_as<S, Complex>) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j) row(k++) = -2.0 * std::imag(std::conj(x(i)) * x(j));
  }
  return row;
}

template <ScalarType S>
Matrix<S> assemble_hermitian(const Eigen::VectorXd& p, Eigen::Index d) {
  Matrix<S> h = Matrix<S>::Zero(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) h(i, i) = p(k++);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) h(i, j) = p(k++);
  if constexpr (std::same_as<S, Complex>) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j) h(i, j) += Complex(0.0, p(k++));
  }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if constexpr (std::same_as<S, Complex>) h(j, i) = std::conj(h(i, j));
      else h(j, i) = h(i, j);
    }
  return h;
}

}  // namespace detail

/// Nearest density matrix to a Hermitian matrix in the sense used here:
/// eigenvalues clipped at zero, then trace renormalized to one.
template <ScalarType S>
DensityMatrix<S> project_to_density(const Matrix<S>& h) {
  const Matrix<S> herm = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix<S>> es(herm);
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Index d = h.rows();
  if (!(w.sum() > 0.0)) w = Eigen::VectorXd::Constant(d, 1.0);
  w /= w.sum();
  Matrix<S> rho = es.eigenvectors() * w.cast<S>().asDiagonal() * es.eigenvectors().adjoint();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix<S>(std::move(rho));
}

/// Fits the Hermitian form minimizing sum |x†Hx - f(x)|^2 over sampled unit
/// vectors, projects it onto the density-matrix cone, and scores it on a
/// fresh validation sample. Tabulated functions are fitted and validated on
/// their stored directions.
template <ScalarType S>
RegularityReport<S> reconstruct_rho(const FrameFunction<S>& f, std::size_t n_samples, std::uint64_t seed,
                                    const Tolerances& tol = default_tolerances()) {
  const Eigen::Index d = f.dim();
  const bool table = f.kind() == FrameKind::Tabulated;
  if (n_samples < static_cast<std::size_t>(d * d))
    throw Error(ErrorCode::InsufficientSamples, "need at least dim^2 samples");

  std::vector<UnitVector<S>> fit_pts;
  std::vector<UnitVector<S>> check_pts;
  if (table) {
    for (const auto& e : f.entries()) fit_pts.push_back(e.direction);
    if (fit_pts.size() < static_cast<std::size_t>(detail::hermitian_param_count<S>(d)))
      throw Error(ErrorCode::InsufficientSamples, "table too small to determine a quadratic form");
    check_pts = fit_pts;
  } else {
    Rng fit_rng(child_seed(seed, 0));
    Rng val_rng(child_seed(seed, 1));
    for (std::size_t i = 0; i < n_samples; ++i) fit_pts.push_back(random_unit_vector<S>(d, fit_rng));
    for (std::size_t i = 0; i < n_samples; ++i) check_pts.push_back(random_unit_vector<S>(d, val_rng));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(fit_pts.size());
  Eigen::MatrixXd a(n, detail::hermitian_param_count<S>(d));
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i) = detail::hermitian_features<S>(fit_pts[i].components());
    b(i) = f(fit_pts[i]);
  }
  const Eigen::VectorXd params = a.completeOrthogonalDecomposition().solve(b);
  Matrix<S> h = detail::assemble_hermitian<S>(params, d);

  RegularityReport<S> rep{project_to_density<S>(h), h};
  rep.n_samples = fit_pts.size();
  rep.max_residual = -1.0;
  for (const auto& x : check_pts) {
    const double fx = f(x);
    const double fit = rep.fitted_rho.expectation(x.components());
    const double r = std::abs(fit - fx);
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.residual_witness = x;
      rep.witness_value = fx;
      rep.witness_fit = fit;
    }
  }

  // A table without any complete basis leaves the frame condition untested.
  std::optional<FrameReport<S>> frame;
  if (f.kind() != FrameKind::Tabulated || !f.stored_bases(1).empty())
    frame = check_frame_condition(f, std::max<std::size_t>(64, n_samples / 4), child_seed(seed, 2));
  rep.frame_deviation = frame ? frame->max_deviation : 0.0;
  if (frame && frame->max_deviation > tol.regularity) {
    rep.verdict = Verdict::ViolatesFrame;
    rep.frame_witness = frame->worst_basis;
  } else if (rep.max_residual > tol.regularity) {
    rep.verdict = Verdict::NotRegular;
  } else {
    rep.verdict = Verdict::Regular;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// General mixed form on R^3

/// Weights M >= 1-M-m >= m >= 0 on an orthonormal basis {p, q, r} of R^3.
struct GeneralFrameParams {
  double max_value;  // M
  double min_value;  // m
  OrthonormalBasis<Real> axes;  // columns p, q, r

  double middle_value() const { return 1.0 - max_value - min_value; }

  void validate(double tol = default_tolerances().structural) const {
    if (axes.dim() != 3) throw Error(ErrorCode::InvalidParams, "axes must be a basis of R^3");
    const double big = max_value, small = min_value, mid = middle_value();
    if (!(small >= -tol && big <= 1.0 + tol && small <= big + tol))
      throw Error(ErrorCode::InvalidParams, "need 0 <= m <= M <= 1");
    if (big + small > 1.0 + tol) throw Error(ErrorCode::InvalidParams, "need M + m <= 1");
    if (mid > big + tol || mid < small - tol)
      throw Error(ErrorCode::InvalidParams, "M and m must be the extreme weights");
  }
};

/// M cos^2(u,p) + m cos^2(u,q) + (1-M-m) cos^2(u,r).
inline double eval_general_form(const GeneralFrameParams& params, const UnitVector<Real>& u) {
  params.validate();
  detail::require_dim(u.dim(), 3, "eval_general_form");
  const auto& ax = params.axes.matrix();
  const double cp = ax.col(0).dot(u.components());
  const double cq = ax.col(1).dot(u.components());
  const double cr = ax.col(2).dot(u.components());
  return params.max_value * cp * cp + params.min_value * cq * cq + params.middle_value() * cr * cr;
}

inline FrameFunction<Real> general_form_function(const GeneralFrameParams& params) {
  params.validate();
  return FrameFunction<Real>::closed_form(
      3, [params](const Vector<Real>& u) { return eval_general_form(params, UnitVector<Real>(u, 1e-10)); },
      "general_form");
}

// ---------------------------------------------------------------------------
// Extreme values

template <ScalarType S>
struct ExtremeReport {
  double sup_estimate;  // M-hat
  double inf_estimate;  // m-hat
  UnitVector<S> argmax;
  UnitVector<S> argmin;
};

namespace detail {

/// Compass search on the sphere: tries +/- steps along an orthonormal
/// tangent frame (and its i-multiples over C), halving the step on failure.
template <ScalarType S>
std::pair<UnitVector<S>, double> refine_on_sphere(const FrameFunction<S>& f, UnitVector<S> x, double fx,
                                                  bool maximize, double min_step = 1e-9,
                                                  int max_evals = 40000) {
  double step = 0.25;
  int evals = 0;
  const double sgn = maximize ? 1.0 : -1.0;
  while (step > min_step && evals < max_evals) {
    bool moved = false;
    const Matrix<S> t = orthocomplement<S>(x.components());
    std::vector<Vector<S>> dirs;
    for (Eigen::Index k = 0; k < t.cols(); ++k) {
      dirs.push_back(t.col(k));
      if constexpr (std::same_as<S, Complex>) dirs.push_back(Complex(0.0, 1.0) * t.col(k));
    }
    for (const auto& dvec : dirs) {
      for (double s : {1.0, -1.0}) {
        UnitVector<S> y = UnitVector<S>::normalized(x.components() + s * step * dvec);
        const double fy = f(y);
        ++evals;
        if (sgn * (fy - fx) > 0.0) {
          x = y;
          fx = fy;
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved) step *= 0.5;
  }
  return {x, fx};
}

}  // namespace detail

/// Sampled extreme values of f, refined by local compass search from the
/// best few samples. Tabulated functions are scanned over their table only.
template <ScalarType S>
ExtremeReport<S> extreme_values(const FrameFunction<S>& f, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw Error(ErrorCode::InsufficientSamples, "need at least 100 samples");
  std::vector<std::pair<double, UnitVector<S>>> pts;
  if (f.kind() == FrameKind::Tabulated) {
    for (const auto& e : f.entries()) pts.emplace_back(f(e.direction), e.direction);
  } else {
    Rng rng(seed);
    pts.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      auto x = random_unit_vector<S>(f.dim(), rng);
      pts.emplace_back(f(x), x);
    }
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::pair<UnitVector<S>, double> hi{pts.back().second, pts.back().first};
  std::pair<UnitVector<S>, double> lo{pts.front().second, pts.front().first};
  if (f.kind() != FrameKind::Tabulated) {
    constexpr std::size_t kStarts = 3;
    const std::size_t starts = std::min(kStarts, pts.size());
    for (std::size_t k = 0; k < starts; ++k) {
      const auto& top = pts[pts.size() - 1 - k];
      auto r = detail::refine_on_sphere(f, top.second, top.first, true);
      if (r.second > hi.second) hi = r;
      const auto& bottom = pts[k];
      auto q = detail::refine_on_sphere(f, bottom.second, bottom.first, false);
      if (q.second < lo.second) lo = q;
    }
  }
  return ExtremeReport<S>{hi.second, lo.second, hi.first, lo.first};
}

// ---------------------------------------------------------------------------
// Latitude bands on R^3

struct BandBounds {
  double inf_band;
  double sup_band;
  UnitVector<Real> argmin;
  UnitVector<Real> argmax;
};

namespace detail {

/// Point on the latitude circle {u : (u.p)^2 = x} at azimuth phi.
inline Vector<Real> latitude_point(const Vector<Real>& p, const Matrix<Real>& frame, double x, double phi) {
  return std::sqrt(x) * p + std::sqrt(std::max(0.0, 1.0 - x)) * (std::cos(phi) * frame.col(0) + std::sin(phi) * frame.col(1));
}

inline double golden_extremum(const std::function<double(double)>& g, double a, double b, bool maximize) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double sgn = maximize ? 1.0 : -1.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double gc = sgn * g(c), gd = sgn * g(d);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (gc > gd) {
      b = d; d = c; gd = gc;
      c = b - invphi * (b - a); gc = sgn * g(c);
    } else {
      a = c; c = d; gc = gd;
      d = a + invphi * (b - a); gd = sgn * g(d);
    }
  }
  return gc > gd ? c : d;
}

}  // namespace detail

/// Sampled inf and sup of f over the latitude circle cos^2(u,p) = x, each
/// refined by golden-section search around the best sample. For tabulated
/// functions only stored directions at that latitude (within 1e-9) count.
inline BandBounds latitude_band_bounds(const FrameFunction<Real>& f, const UnitVector<Real>& p, double x,
                                       std::size_t n_samples, std::uint64_t seed) {
  detail::require_dim(f.dim(), 3, "latitude_band_bounds");
  detail::require_dim(p.dim(), 3, "latitude_band_bounds pole");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "latitude must lie in [0,1]");
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");

  if (f.kind() == FrameKind::Tabulated) {
    std::optional<BandBounds> out;
    for (const auto& e : f.entries()) {
      const double h = std::pow(e.direction.components().dot(p.components()), 2);
      if (std::abs(h - x) > 1e-9) continue;
      const double v = f(e.direction);
      if (!out) {
        out = BandBounds{v, v, e.direction, e.direction};
        continue;
      }
      if (v < out->inf_band) { out->inf_band = v; out->argmin = e.direction; }
      if (v > out->sup_band) { out->sup_band = v; out->argmax = e.direction; }
    }
    if (!out) throw Error(ErrorCode::OffTable, "no stored direction at this latitude");
    return *out;
  }

  const Matrix<Real> frame = detail::orthocomplement<Real>(p.components());
  auto at = [&](double phi) { return UnitVector<Real>::normalized(detail::latitude_point(p.components(), frame, x, phi)); };
  auto g = [&](double phi) { return f(at(phi)); };

  Rng rng(seed);
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n_samples);
  double lo_phi = 0.0, hi_phi = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double phi = (static_cast<double>(k) + offset) * dphi;
    const double v = g(phi);
    if (v < lo) { lo = v; lo_phi = phi; }
    if (v > hi) { hi = v; hi_phi = phi; }
  }
  const double a_hi = detail::golden_extremum(g, hi_phi - dphi, hi_phi + dphi, true);
  const double a_lo = detail::golden_extremum(g, lo_phi - dphi, lo_phi + dphi, false);
  if (g(a_hi) > hi) { hi = g(a_hi); hi_phi = a_hi; }
  if (g(a_lo) < lo) { lo = g(a_lo); lo_phi = a_lo; }
  return BandBounds{lo, hi, at(lo_phi), at(hi_phi)};
}

struct SqueezeReport {
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();  // min over pairs of inf(x') - sup(x)
  double worst_x = 0.0;
  double worst_x_prime = 0.0;
  std::vector<double> latitudes;
  std::vector<BandBounds> bands;
};

/// Monotone squeeze: sup_band(x) <= inf_band(x') + slack for every pair of
/// tested latitudes with x' - x >= min_gap.
inline SqueezeReport squeeze_check(const FrameFunction<Real>& f, const UnitVector<Real>& p,
                                   const std::vector<double>& latitudes, std::size_t n_samples,
                                   std::uint64_t seed, double min_gap = 0.01,
                                   double slack = default_tolerances().regularity) {
  SqueezeReport rep;
  rep.latitudes = latitudes;
  for (std::size_t i = 0; i < latitudes.size(); ++i)
    rep.bands.push_back(latitude_band_bounds(f, p, latitudes[i], n_samples, child_seed(seed, i)));
  for (std::size_t i = 0; i < latitudes.size(); ++i)
    for (std::size_t j = 0; j < latitudes.size(); ++j) {
      if (!(latitudes[j] - latitudes[i] >= min_gap - 1e-12)) continue;
      const double margin = rep.bands[j].inf_band - rep.bands[i].sup_band;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_x = latitudes[i];
        rep.worst_x_prime = latitudes[j];
      }
      if (margin < -slack) rep.holds = false;
    }
  return rep;
}

}  // namespace gleason
