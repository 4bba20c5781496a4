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
/// Geometry of the real unit 2-sphere around a pole p: latitudes
/// h(u) = cos^2(u,p), descents (great circles through u that meet the
/// equator orthogonally to u), the central projection onto the tangent plane
/// at the pole, and chains of successive descents joining two latitudes.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gleason/frame_function.hpp"

namespace gleason::sphere {

using Vec3 = Eigen::Vector3d;

namespace detail {

inline Vec3 as3(const UnitVector<Real>& u) {
  gleason::detail::require_dim(u.dim(), 3, "sphere geometry works in R^3");
  return Vec3(u.components());
}

inline UnitVector<Real> unit(const Vec3& v) { return UnitVector<Real>::normalized(Vector<Real>(v)); }

}  // namespace detail

/// The direction where f attains 1, with a fixed orthonormal frame of the
/// tangent plane used for central projection.
class Pole {
 public:
  explicit Pole(UnitVector<Real> p) : p_(std::move(p)) {
    const Vec3 pv = detail::as3(p_);
    const Matrix<Real> t = gleason::detail::orthocomplement<Real>(Vector<Real>(pv));
    e1_ = t.col(0);
    e2_ = pv.cross(e1_);
  }

  const UnitVector<Real>& direction() const { return p_; }
  Vec3 vec() const { return Vec3(p_.components()); }
  const Vec3& e1() const { return e1_; }
  const Vec3& e2() const { return e2_; }

 private:
  UnitVector<Real> p_;
  Vec3 e1_, e2_;
};

inline double latitude(const UnitVector<Real>& u, const UnitVector<Real>& p) {
  const double c = u.components().dot(p.components());
  return std::clamp(c * c, 0.0, 1.0);
}

inline double latitude(const UnitVector<Real>& u, const Pole& p) { return latitude(u, p.direction()); }

/// D_u: the great circle through u whose plane contains the equatorial
/// direction e ∝ u × p. u is the northernmost point of the circle.
struct Descent {
  UnitVector<Real> u;
  UnitVector<Real> plane_normal;
  UnitVector<Real> equator_dir;

  /// cos(a) u + sin(a) e.
  UnitVector<Real> point_at(double angle) const {
    return UnitVector<Real>::normalized(std::cos(angle) * u.components() + std::sin(angle) * equator_dir.components());
  }

  double offset(const UnitVector<Real>& x) const { return std::abs(x.components().dot(plane_normal.components())); }
};

inline Descent descent_through(const UnitVector<Real>& u, const Pole& pole,
                               const Tolerances& tol = default_tolerances()) {
  const double h = latitude(u, pole);
  if (h >= 1.0 - tol.structural) throw Error(ErrorCode::AtPole, "descent through the pole is undefined");
  if (h <= tol.structural) throw Error(ErrorCode::AtEquator, "descent through an equatorial vector is degenerate");
  const Vec3 uv = detail::as3(u);
  const Vec3 e = uv.cross(pole.vec()).normalized();
  const Vec3 n = uv.cross(e).normalized();
  return Descent{u, detail::unit(n), detail::unit(e)};
}

inline Descent descent_through(const UnitVector<Real>& u, const UnitVector<Real>& p) {
  return descent_through(u, Pole(p));
}

struct BasicLemmaTerms {
  double f_u;
  double f_uprime;
  double f_vprime;
  double f_v;  // value on the equator, zero for a frame function with f(p) = 1
  double residual;  // |f(u) - f(u') - f(v')|
  UnitVector<Real> v;
  UnitVector<Real> vprime;
  UnitVector<Real> w;
};

/// Splits f(u) along two bases {u, v, w} and {u', v', w} sharing the descent
/// normal w. For a frame function vanishing on the equator, f(u) = f(u') + f(v').
inline BasicLemmaTerms basic_lemma_decomposition(const FrameFunction<Real>& f, const UnitVector<Real>& u,
                                                 const UnitVector<Real>& u_prime, const Pole& pole,
                                                 const Tolerances& tol = default_tolerances()) {
  const Descent d = descent_through(u, pole, tol);
  if (d.offset(u_prime) > tol.chain_vertex) throw Error(ErrorCode::NotOnDescent, "u' is off the descent through u");
  const Vec3 n = detail::as3(d.plane_normal);
  const UnitVector<Real> vprime = detail::unit(n.cross(detail::as3(u_prime)));
  const double fu = f(u), fup = f(u_prime), fvp = f(vprime), fv = f(d.equator_dir);
  return BasicLemmaTerms{fu, fup, fvp, fv, std::abs(fu - fup - fvp), d.equator_dir, vprime, d.plane_normal};
}

// ---------------------------------------------------------------------------
// Central projection

struct PlanePoint {
  double x;
  double y;
  double radius() const { return std::hypot(x, y); }
  double azimuth() const { return std::atan2(y, x); }
};

/// Projection from the sphere's center onto the plane tangent at the pole.
/// Latitude circles map to circles of radius tan(theta) about the origin and
/// descents map to straight lines. u and -u map to the same point.
inline PlanePoint central_projection(const UnitVector<Real>& u, const Pole& pole,
                                     const Tolerances& tol = default_tolerances()) {
  Vec3 uv = detail::as3(u);
  double c = uv.dot(pole.vec());
  if (c * c <= tol.structural) throw Error(ErrorCode::AtEquator, "equator projects to infinity");
  if (c < 0.0) {
    uv = -uv;
    c = -c;
  }
  return PlanePoint{uv.dot(pole.e1()) / c, uv.dot(pole.e2()) / c};
}

/// Inverse of central_projection onto the northern hemisphere.
inline UnitVector<Real> lift(const PlanePoint& q, const Pole& pole) {
  return detail::unit(pole.vec() + q.x * pole.e1() + q.y * pole.e2());
}

// ---------------------------------------------------------------------------
// Piron chains

/// w_0 ... w_N with each w_n on the descent through w_{n-1} and latitude
/// non-increasing along the chain. Validated on construction.
class PironChain {
 public:
  PironChain(std::vector<UnitVector<Real>> vectors, const Pole& pole,
             const Tolerances& tol = default_tolerances())
      : w_(std::move(vectors)) {
    if (w_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a chain needs at least two vectors");
    for (std::size_t n = 1; n < w_.size(); ++n) {
      const Descent d = descent_through(w_[n - 1], pole, tol);
      if (d.offset(w_[n]) > tol.chain_vertex)
        throw Error(ErrorCode::NotOnDescent, "chain vertex " + std::to_string(n) + " is off the previous descent");
      if (latitude(w_[n], pole) >= latitude(w_[n - 1], pole) + tol.derived)
        throw Error(ErrorCode::InvalidArgument, "chain latitude increases at step " + std::to_string(n));
    }
  }

  const std::vector<UnitVector<Real>>& vectors() const { return w_; }
  /// Number of descent steps N.
  std::size_t length() const { return w_.size() - 1; }

 private:
  std::vector<UnitVector<Real>> w_;
};

namespace detail {

inline double step_angle(double log_ratio) { return std::acos(std::exp(-log_ratio)); }

/// Total azimuth swept by N same-direction steps whose log radius ratios are
/// L((1-t) + t/N) for the first step and L t/N for the others.
inline double swept_angle(double total_log, std::size_t n, double t) {
  const double share = total_log * t / static_cast<double>(n);
  return step_angle(total_log * (1.0 - t) + share) + static_cast<double>(n - 1) * step_angle(share);
}

}  // namespace detail

/// Chain of descents from u down to v (h(u) > h(v)), built in the tangent
/// plane at the pole. One step from radius r to r' turns the azimuth by
/// exactly acos(r/r'), so the construction picks the fewest steps whose
/// best-case sweep (equal radius ratios) covers the azimuth gap, then
/// redistributes the radius ratios until the sweep matches it exactly. When
/// the gap is smaller than a single direct descent (e.g. equal longitudes) a
/// two-step zig-zag is used.
inline PironChain build_piron_chain(const UnitVector<Real>& u, const UnitVector<Real>& v, const Pole& pole,
                                    std::size_t max_len, const Tolerances& tol = default_tolerances()) {
  const double hu = latitude(u, pole), hv = latitude(v, pole);
  if (!(hu > hv + tol.min_latitude_gap))
    throw Error(ErrorCode::InvalidArgument, "need h(u) > h(v) + " + std::to_string(tol.min_latitude_gap));
  if (hv <= tol.structural) throw Error(ErrorCode::AtEquator, "v must be strictly northern");
  if (hu >= 1.0 - tol.structural) throw Error(ErrorCode::AtPole, "u must not be the pole");

  const PlanePoint pu = central_projection(u, pole), pv = central_projection(v, pole);
  const double ru = pu.radius(), rv = pv.radius();
  double gap = pv.azimuth() - pu.azimuth();
  gap = std::remainder(gap, 2.0 * std::numbers::pi);
  const double dir = gap < 0.0 ? -1.0 : 1.0;
  const double target = std::abs(gap);
  const double total_log = std::log(rv / ru);
  const double direct = detail::step_angle(total_log);

  std::vector<double> radii{ru};
  std::vector<double> turns;  // signed azimuth increments

  if (std::abs(target - direct) <= 1e-10) {
    radii.push_back(rv);
    turns.push_back(dir * direct);
  } else if (target < direct) {
    if (max_len < 2) throw Error(ErrorCode::ChainTooLong, "two steps needed");
    auto mismatch = [&](double r1) { return std::acos(ru / r1) - std::acos(r1 / rv) - target; };
    double lo = ru, hi = rv;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mismatch(mid) < 0.0 ? lo : hi) = mid;
    }
    const double r1 = 0.5 * (lo + hi);
    radii.push_back(r1);
    radii.push_back(rv);
    turns.push_back(dir * std::acos(ru / r1));
    turns.push_back(-dir * std::acos(r1 / rv));
  } else {
    std::size_t n = 2;
    while (detail::swept_angle(total_log, n, 1.0) < target) {
      if (n >= max_len)
        throw Error(ErrorCode::ChainTooLong, "more than " + std::to_string(max_len) + " steps required");
      ++n;
    }
    if (n > max_len) throw Error(ErrorCode::ChainTooLong, "more than " + std::to_string(max_len) + " steps required");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::swept_angle(total_log, n, mid) < target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double share = total_log * t / static_cast<double>(n);
    double log_r = std::log(ru) + total_log * (1.0 - t) + share;
    radii.push_back(std::exp(log_r));
    turns.push_back(dir * detail::step_angle(total_log * (1.0 - t) + share));
    for (std::size_t k = 1; k < n; ++k) {
      log_r += share;
      radii.push_back(k + 1 == n ? rv : std::exp(log_r));
      turns.push_back(dir * detail::step_angle(share));
    }
  }

  std::vector<UnitVector<Real>> w{u};
  double az = pu.azimuth();
  for (std::size_t k = 0; k < turns.size(); ++k) {
    az += turns[k];
    w.push_back(lift(PlanePoint{radii[k + 1] * std::cos(az), radii[k + 1] * std::sin(az)}, pole));
  }
  if (!w.back().same_ray(v, tol.chain_vertex))
    throw Error(ErrorCode::DegenerateInput, "chain construction missed the target");
  w.back() = v;
  return PironChain(std::move(w), pole, tol);
}

struct MonotonicityReport {
  std::vector<double> values;  // f(w_n)
  std::vector<double> latitudes;
  bool passed = true;
  std::optional<std::size_t> violation_step;  // n with f(w_{n-1}) < f(w_n) - slack
};

/// Evaluates f along the chain without throwing.
inline MonotonicityReport monotonicity_profile(const FrameFunction<Real>& f, const PironChain& chain,
                                               const Pole& pole, const Tolerances& tol = default_tolerances()) {
  MonotonicityReport rep;
  for (const auto& w : chain.vectors()) {
    rep.values.push_back(f(w));
    rep.latitudes.push_back(latitude(w, pole));
  }
  for (std::size_t n = 1; n < rep.values.size(); ++n) {
    if (rep.values[n - 1] < rep.values[n] - tol.monotone_slack) {
      rep.passed = false;
      rep.violation_step = n;
      break;
    }
  }
  if (rep.passed && rep.values.front() < rep.values.back() - tol.monotone_slack) {
    rep.passed = false;
    rep.violation_step = rep.values.size() - 1;
  }
  return rep;
}

class MonotonicityViolation : public Error {
 public:
  MonotonicityViolation(std::size_t step, double before, double after)
      : Error(ErrorCode::MonotonicityViolation,
              "f increases at chain step " + std::to_string(step) + " (" + std::to_string(before) + " -> " +
                  std::to_string(after) + ")"),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Asserts f(w_{n-1}) >= f(w_n) - 1e-8 along the chain; throws
/// MonotonicityViolation naming the first offending step.
inline MonotonicityReport verify_monotonicity(const FrameFunction<Real>& f, const PironChain& chain,
                                              const Pole& pole, const Tolerances& tol = default_tolerances()) {
  auto rep = monotonicity_profile(f, chain, pole, tol);
  if (!rep.passed) {
    const std::size_t n = *rep.violation_step;
    throw MonotonicityViolation(n, rep.values[n - 1], rep.values[n]);
  }
  return rep;
}

}  // namespace gleason::sphere
