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


#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gleason/gleason.hpp"

using namespace gleason;
using Catch::Approx;

namespace {

Vector<Real> vec3(double a, double b, double c) { return Vector<Real>(Eigen::Vector3d(a, b, c)); }

template <ScalarType S>
void require_orthonormal(const Matrix<S>& m, double tol = 1e-10) {
  const Matrix<S> g = m.adjoint() * m;
  REQUIRE((g - Matrix<S>::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() < tol);
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// Band of BORN(rho) on the latitude circle, by dense scan.
std::pair<double, double> scanned_band(const Matrix<Real>& rho, const Vector<Real>& p, double x) {
  const Matrix<Real> t = detail::orthocomplement<Real>(p);
  double lo = 1e9, hi = -1e9;
  constexpr int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n;
    const Vector<Real> u = std::sqrt(x) * p + std::sqrt(1.0 - x) * (std::cos(phi) * t.col(0) + std::sin(phi) * t.col(1));
    const double f = u.dot(rho * u);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------------------
// hilbert-core

TEST_CASE("gram_schmidt keeps the first direction", "[hilbert]") {
  SECTION("standard basis is returned unchanged") {
    const auto b = gram_schmidt<Real>(std::vector<Vector<Real>>{vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)});
    REQUIRE((b.matrix() - Matrix<Real>::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("first vector stays parallel") {
    const double s = 1 / std::sqrt(2.0);
    const auto b = gram_schmidt<Real>(std::vector<Vector<Real>>{vec3(s, s, 0), vec3(1, 0, 0), vec3(0, 0, 1)});
    REQUIRE((b.matrix().col(0) - vec3(s, s, 0)).norm() < 1e-15);
    require_orthonormal<Real>(b.matrix());
  }
  SECTION("parallel vectors are degenerate") {
    try {
      gram_schmidt<Real>(std::vector<Vector<Real>>{vec3(1, 0, 0), vec3(2, 0, 0), vec3(0, 0, 1)});
      FAIL("expected DEGENERATE_INPUT");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::DegenerateInput);
    }
  }
}

TEST_CASE("random_basis is deterministic and orthonormal", "[hilbert]") {
  const auto a = random_basis<Complex>(3, 42);
  const auto b = random_basis<Complex>(3, 42);
  REQUIRE(a.matrix() == b.matrix());
  require_orthonormal<Complex>(random_basis<Real>(3, 7).matrix());
  REQUIRE_THROWS_AS(random_basis<Real>(1, 7), Error);
}

TEST_CASE("Haar marginal: |first component|^2 averages 1/3 in dim 3", "[hilbert][statistics]") {
  constexpr int n = 10000;
  Rng rng(2024);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::norm(random_unitary<Complex>(3, rng).matrix()(0, 0));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  REQUIRE(std::abs(mean - 1.0 / 3.0) < 3 * se);
}

TEST_CASE("Haar invariance under a fixed left rotation (two-sample KS)", "[hilbert][statistics]") {
  constexpr int n = 10000;
  const Matrix<Complex> v = random_unitary<Complex>(3, 99).matrix();
  Rng r1(5), r2(6);
  std::vector<double> plain, rotated;
  for (int i = 0; i < n; ++i) {
    plain.push_back(std::norm(random_unitary<Complex>(3, r1).matrix()(0, 0)));
    rotated.push_back(std::norm((v * random_unitary<Complex>(3, r2).matrix())(0, 0)));
  }
  // Critical value at significance 0.01.
  const double crit = 1.628 * std::sqrt(2.0 / n);
  REQUIRE(ks_statistic(plain, rotated) < crit);
}

TEST_CASE("real orthogonal matrices split into det +1 and det -1", "[hilbert]") {
  int plus = 0, minus = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const double d = random_unitary<Real>(4, s).determinant();
    const bool near_plus = std::abs(d - 1.0) < 1e-10, near_minus = std::abs(d + 1.0) < 1e-10;
    REQUIRE((near_plus || near_minus));
    (near_plus ? plus : minus)++;
  }
  REQUIRE(plus > 0);
  REQUIRE(minus > 0);
}

TEST_CASE("basis_containing pins the first vector", "[hilbert]") {
  const auto e1 = UnitVector<Real>(vec3(1, 0, 0));
  REQUIRE(basis_containing(e1, 3).matrix().col(0) == vec3(1, 0, 0));
  const auto v = random_unit_vector<Complex>(4, 11);
  const auto a = basis_containing(v, 1), b = basis_containing(v, 2);
  require_orthonormal<Complex>(a.matrix());
  REQUIRE(std::abs(std::abs(a.vector(0).inner(v)) - 1.0) < 1e-10);
  REQUIRE(a.matrix().col(0) == b.matrix().col(0));
  REQUIRE((a.matrix().rightCols(3) - b.matrix().rightCols(3)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("unitary path to a permutation", "[hilbert]") {
  SECTION("identity permutation gives a constant path") {
    for (const auto& u : unitary_path_to_permutation({0, 1, 2}, 10))
      REQUIRE((u.matrix() - Matrix<Complex>::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("swap in dim 2 needs complex intermediates") {
    const int steps = 100;
    const auto path = unitary_path_to_permutation({1, 0}, steps);
    REQUIRE(path.size() == static_cast<std::size_t>(steps + 1));
    REQUIRE(path.front().matrix() == Matrix<Complex>::Identity(2, 2));
    Matrix<Complex> swap(2, 2);
    swap << 0, 1, 1, 0;
    REQUIRE(path.back().matrix() == swap);
    REQUIRE(std::abs(path.back().determinant() - Complex(-1.0)) < 1e-12);
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto& u = path[k].matrix();
      REQUIRE((u.adjoint() * u - Matrix<Complex>::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
      if (k > 0) REQUIRE(operator_norm(Matrix<Complex>(u - path[k - 1].matrix())) < 2 * std::numbers::pi / steps);
      if (k > 0 && k + 1 < path.size()) REQUIRE(u.imag().cwiseAbs().maxCoeff() > 1e-6);
    }
  }
  SECTION("3-cycle has endpoint det +1") {
    const auto path = unitary_path_to_permutation({1, 2, 0}, 50);
    REQUIRE(std::abs(path.back().determinant() - Complex(1.0)) < 1e-12);
    REQUIRE(path.back().matrix() == permutation_matrix({1, 2, 0}));
  }
  REQUIRE_THROWS_AS(unitary_path_to_permutation({1, 0}, 1), Error);
  REQUIRE_THROWS_AS(unitary_path_to_permutation({1, 1}, 5), Error);
}

TEST_CASE("born_probability", "[hilbert]") {
  const auto x = random_unit_vector<Complex>(3, 4);
  REQUIRE(born_probability(Projector<Complex>::onto(x), DensityMatrix<Complex>::pure(x)) == Approx(1.0).margin(1e-12));
  const auto e = OrthonormalBasis<Real>::standard(3);
  REQUIRE(born_probability(e.projector(0), DensityMatrix<Real>::pure(e.vector(1))) == 0.0);
  const double t = std::numbers::pi / 3;
  const UnitVector<Real> u(vec3(std::sin(t), 0, std::cos(t)));
  REQUIRE(born_probability(e.projector(2), DensityMatrix<Real>::pure(u)) == Approx(0.25).margin(1e-12));
  try {
    born_probability(e.projector(0), DensityMatrix<Real>::maximally_mixed(2));
    FAIL("expected DIMENSION_MISMATCH");
  } catch (const Error& err) {
    REQUIRE(err.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("Born probabilities: frame sum and unitary invariance", "[hilbert]") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto b = random_basis<Complex>(4, child_seed(s, 0));
    const auto rho = DensityMatrix<Complex>::pure(random_unit_vector<Complex>(4, child_seed(s, 1)));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) sum += born_probability(b.projector(i), rho);
    REQUIRE(std::abs(sum - 1.0) < 1e-10);

    const Matrix<Complex> u = random_unitary<Complex>(4, child_seed(s, 2)).matrix();
    const auto mixed = random_density_matrix<Complex>(4, 3, child_seed(s, 3));
    const Matrix<Complex> pu = u * b.projector(0).matrix() * u.adjoint();
    const Matrix<Complex> ru = u * mixed.matrix() * u.adjoint();
    const double before = born_probability(b.projector(0), mixed);
    const double after = born_probability(Projector<Complex>(Matrix<Complex>((pu + pu.adjoint()) / 2.0)),
                                          DensityMatrix<Complex>(Matrix<Complex>((ru + ru.adjoint()) / 2.0)));
    REQUIRE(std::abs(before - after) < 1e-10);
  }
}

TEST_CASE("domain types reject invalid data", "[hilbert]") {
  REQUIRE_THROWS_AS(UnitVector<Real>(vec3(1, 1, 0)), Error);
  Matrix<Real> m = Matrix<Real>::Identity(3, 3);
  m(0, 1) = 0.1;
  REQUIRE_THROWS_AS(Projector<Real>(m), Error);
  REQUIRE_THROWS_AS(DensityMatrix<Real>(Matrix<Real>::Identity(3, 3)), Error);
  try {
    UnitaryMatrix<Real>(Matrix<Real>::Identity(3, 3) * 1.1);
    FAIL("expected NOT_UNITARY");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NotUnitary);
  }
}

// ---------------------------------------------------------------------------
// frame-function

TEST_CASE("check_frame_condition", "[frame]") {
  SECTION("Born functions satisfy it") {
    const auto f = FrameFunction<Complex>::born(random_density_matrix<Complex>(3, 3, 8));
    REQUIRE(check_frame_condition(f, 1000, 1).max_deviation < 1e-10);
  }
  SECTION("|x_1|^4 on C^3 violates it") {
    const auto f = FrameFunction<Complex>::closed_form(3, [](const Vector<Complex>& x) { return std::pow(std::norm(x(0)), 2); });
    const auto rep = check_frame_condition(f, 1000, 1);
    REQUIRE(rep.max_deviation > 0.1);
    REQUIRE(rep.worst_basis.has_value());
    REQUIRE(std::abs(detail::basis_sum(f, rep.worst_basis->matrix()) - rep.worst_sum) < 1e-12);
  }
  SECTION("constant 1/dim") {
    REQUIRE(check_frame_condition(FrameFunction<Real>::constant(3), 1000, 1).max_deviation < 1e-12);
  }
  SECTION("deterministic per seed") {
    const auto f = FrameFunction<Complex>::closed_form(3, [](const Vector<Complex>& x) { return std::norm(x(0)) * 0.9; });
    REQUIRE(check_frame_condition(f, 500, 3).max_deviation == check_frame_condition(f, 500, 3).max_deviation);
  }
  SECTION("out-of-range values raise EVALUATION_RANGE") {
    const auto f = FrameFunction<Real>::closed_form(3, [](const Vector<Real>&) { return 1.5; });
    try {
      check_frame_condition(f, 10, 1);
      FAIL("expected EVALUATION_RANGE");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::EvaluationRange);
    }
  }
}

TEST_CASE("frame functions ignore the global phase", "[frame]") {
  const auto f = FrameFunction<Complex>::closed_form(3, [](const Vector<Complex>& x) { return std::abs(x(0).real()) / 3.0; });
  const auto x = random_unit_vector<Complex>(3, 77);
  REQUIRE(f(x) == Approx(f(UnitVector<Complex>(Vector<Complex>(x.components() * std::polar(1.0, 1.234)), 1e-10))).margin(1e-14));
}

TEST_CASE("reconstruct_rho", "[frame]") {
  SECTION("Born(rho0) in dim 3 recovers rho0") {
    const auto rho0 = random_density_matrix<Complex>(3, 3, 17);
    const auto rep = reconstruct_rho(FrameFunction<Complex>::born(rho0), 200, 7);
    REQUIRE((rep.fitted_rho.matrix() - rho0.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(rep.verdict == Verdict::Regular);
  }
  SECTION("cos^2 to a pole gives the rank-1 projector") {
    const UnitVector<Real> p(vec3(0, 0.6, 0.8));
    const auto f = FrameFunction<Real>::closed_form(3, [p](const Vector<Real>& u) { return std::pow(u.dot(p.components()), 2); });
    const auto rep = reconstruct_rho(f, 200, 3);
    REQUIRE((rep.fitted_rho.matrix() - p.outer()).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(rep.fitted_rho.eigenvalues()(2) >= 1 - 1e-6);
  }
  SECTION("cos^4 is not a quadratic form") {
    const auto f = FrameFunction<Real>::closed_form(3, [](const Vector<Real>& u) { return std::pow(u(2), 4); });
    const auto rep = reconstruct_rho(f, 200, 3);
    REQUIRE(rep.verdict != Verdict::Regular);
    REQUIRE(rep.verdict == Verdict::ViolatesFrame);
    REQUIRE(rep.frame_witness.has_value());
    // Independent brute force: the residual of the fitted form at some point exceeds 1e-3.
    Rng rng(12);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const auto x = random_unit_vector<Real>(3, rng);
      worst = std::max(worst, std::abs(rep.fitted_rho.expectation(x.components()) - f(x)));
    }
    REQUIRE(worst > 1e-3);
    REQUIRE(rep.max_residual > 1e-3);
    REQUIRE(rep.residual_witness.has_value());
  }
  SECTION("sample count below dim^2") {
    try {
      reconstruct_rho(FrameFunction<Real>::constant(3), 8, 1);
      FAIL("expected INSUFFICIENT_SAMPLES");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::InsufficientSamples);
    }
  }
  SECTION("fitted_rho is always a density matrix") {
    const auto f = FrameFunction<Complex>::closed_form(3, [](const Vector<Complex>& x) { return std::norm(x(0)) * std::norm(x(0)); });
    const auto rep = reconstruct_rho(f, 100, 5);
    REQUIRE(rep.fitted_rho.eigenvalues().minCoeff() >= -1e-12);
    REQUIRE(std::abs(rep.fitted_rho.matrix().trace() - Complex(1.0)) < 1e-10);
  }
}

TEST_CASE("project_to_density clips and renormalizes", "[frame]") {
  Matrix<Real> h = Matrix<Real>::Zero(3, 3);
  h.diagonal() << 0.8, 0.4, -0.2;
  const auto rho = project_to_density<Real>(h);
  REQUIRE(rho.matrix()(0, 0) == Approx(2.0 / 3.0));
  REQUIRE(rho.matrix()(2, 2) == Approx(0.0).margin(1e-15));
}

TEST_CASE("general mixed form on R^3", "[frame]") {
  const auto axes = OrthonormalBasis<Real>::standard(3, "pqr");
  const GeneralFrameParams pure{1.0, 0.0, axes};
  REQUIRE(eval_general_form(pure, axes.vector(0)) == Approx(1.0));
  const GeneralFrameParams flat{1.0 / 3, 1.0 / 3, axes};
  REQUIRE(eval_general_form(flat, random_unit_vector<Real>(3, 4)) == Approx(1.0 / 3).margin(1e-12));
  const GeneralFrameParams mixed{0.6, 0.1, axes};
  REQUIRE(eval_general_form(mixed, axes.vector(1)) == Approx(0.1).margin(1e-12));
  REQUIRE(eval_general_form(mixed, axes.vector(2)) == Approx(0.3).margin(1e-12));

  const auto rep = reconstruct_rho(general_form_function(mixed), 200, 2);
  const Eigen::VectorXd ev = rep.fitted_rho.eigenvalues();
  REQUIRE(ev(0) == Approx(0.1).margin(1e-8));
  REQUIRE(ev(1) == Approx(0.3).margin(1e-8));
  REQUIRE(ev(2) == Approx(0.6).margin(1e-8));

  for (const auto& bad : {GeneralFrameParams{0.7, 0.4, axes}, GeneralFrameParams{0.4, 0.5, axes},
                          GeneralFrameParams{0.45, 0.05, axes}}) {
    try {
      eval_general_form(bad, axes.vector(0));
      FAIL("expected INVALID_PARAMS");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::InvalidParams);
    }
  }
}

TEST_CASE("extreme_values", "[frame]") {
  SECTION("rank-1 Born function") {
    const UnitVector<Real> p(vec3(0, 0, 1));
    const auto r = extreme_values(FrameFunction<Real>::born(DensityMatrix<Real>::pure(p)), 500, 1);
    REQUIRE(r.sup_estimate == Approx(1.0).margin(1e-8));
    REQUIRE(r.inf_estimate == Approx(0.0).margin(1e-8));
    REQUIRE(std::abs(r.argmax.inner(p)) == Approx(1.0).margin(1e-4));
  }
  SECTION("spectrum {0.6, 0.3, 0.1} on C^3") {
    Eigen::VectorXd w(3);
    w << 0.6, 0.3, 0.1;
    const auto rho = density_from_spectrum(random_basis<Complex>(3, 9), w);
    const auto r = extreme_values(FrameFunction<Complex>::born(rho), 1000, 2);
    REQUIRE(r.sup_estimate == Approx(0.6).margin(1e-4));
    REQUIRE(r.inf_estimate == Approx(0.1).margin(1e-4));
  }
  SECTION("constant") {
    const auto r = extreme_values(FrameFunction<Real>::constant(3), 200, 1);
    REQUIRE(r.sup_estimate == Approx(1.0 / 3));
    REQUIRE(r.inf_estimate == Approx(1.0 / 3));
  }
  REQUIRE_THROWS_AS(extreme_values(FrameFunction<Real>::constant(3), 99, 1), Error);
}

TEST_CASE("latitude_band_bounds", "[frame]") {
  const UnitVector<Real> p(vec3(0, 0, 1));
  SECTION("x = 1 collapses to f(p)") {
    const auto f = FrameFunction<Real>::born(random_density_matrix<Real>(3, 3, 4));
    const auto b = latitude_band_bounds(f, p, 1.0, 64, 1);
    REQUIRE(b.inf_band == Approx(f(p)).margin(1e-12));
    REQUIRE(b.sup_band == Approx(f(p)).margin(1e-12));
  }
  SECTION("cos^2 is longitude independent") {
    const auto f = FrameFunction<Real>::born(DensityMatrix<Real>::pure(p));
    for (double x : {0.05, 0.3, 0.5, 0.77}) {
      const auto b = latitude_band_bounds(f, p, x, 64, 2);
      REQUIRE(std::abs(b.inf_band - x) < 1e-10);
      REQUIRE(std::abs(b.sup_band - x) < 1e-10);
    }
  }
  SECTION("non-symmetric rho matches a dense scan") {
    const auto rho = random_density_matrix<Real>(3, 3, 21);
    const auto b = latitude_band_bounds(FrameFunction<Real>::born(rho), p, 0.5, 256, 3);
    const auto [lo, hi] = scanned_band(rho.matrix(), p.components(), 0.5);
    REQUIRE(b.sup_band - b.inf_band > 0);
    REQUIRE(b.inf_band == Approx(lo).margin(1e-9));
    REQUIRE(b.sup_band == Approx(hi).margin(1e-9));
  }
}

TEST_CASE("squeeze: sup_band(x) <= inf_band(x') for a pure Born function", "[frame]") {
  const auto p = random_unit_vector<Real>(3, 31);
  const auto f = FrameFunction<Real>::born(DensityMatrix<Real>::pure(p));
  const auto rep = squeeze_check(f, p, {0.1, 0.11, 0.3, 0.5, 0.9}, 64, 5);
  REQUIRE(rep.holds);
  REQUIRE(rep.worst_margin >= 0.01 - 1e-9);
}

TEST_CASE("tabulated frame functions", "[frame]") {
  const auto e = OrthonormalBasis<Real>::standard(3);
  std::vector<TabulatedEntry<Real>> entries;
  for (Eigen::Index i = 0; i < 3; ++i) entries.push_back({e.vector(i), i == 2 ? 1.0 : 0.0});
  const auto f = FrameFunction<Real>::tabulated(3, entries);
  REQUIRE(f(UnitVector<Real>(vec3(0, 0, -1))) == 1.0);
  try {
    f(UnitVector<Real>::normalized(vec3(1, 1, 0)));
    FAIL("expected OFF_TABLE");
  } catch (const Error& err) {
    REQUIRE(err.code() == ErrorCode::OffTable);
  }
  const auto rep = check_frame_condition(f, 10, 1);
  REQUIRE(rep.used_stored_bases);
  REQUIRE(rep.n_bases == 1);
  REQUIRE(rep.max_deviation < 1e-15);

  auto bad = entries;
  bad[0].value = 1.2;
  try {
    FrameFunction<Real>::tabulated(3, bad)(e.vector(0));
    FAIL("expected EVALUATION_RANGE");
  } catch (const Error& err) {
    REQUIRE(err.code() == ErrorCode::EvaluationRange);
  }
}

TEST_CASE("dim-2 classical qubit: frame condition holds, regularity fails", "[frame]") {
  std::vector<TabulatedEntry<Real>> entries;
  for (int k = 0; k < 36; ++k) {
    const double t = k * std::numbers::pi / 36;
    entries.push_back({UnitVector<Real>::normalized(Vector<Real>(Eigen::Vector2d(std::cos(t), std::sin(t)))),
                       0.5 + 0.3 * std::cos(2 * t) + 0.15 * std::cos(6 * t)});
  }
  const auto f = FrameFunction<Real>::tabulated(2, entries);
  const auto frame = check_frame_condition(f, 1, 0);
  REQUIRE(frame.n_bases == 18);
  REQUIRE(frame.max_deviation < 1e-12);
  const auto rep = reconstruct_rho(f, 36, 1);
  REQUIRE(rep.verdict == Verdict::NotRegular);
  REQUIRE(rep.max_residual > 0.1);
}
