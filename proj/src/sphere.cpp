#include "bq/sphere.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace bq {

namespace {

constexpr std::uintmax_t kRootIterations = 200;
constexpr int kSecondPairSweep = 720;

/// Root of f on [lo, hi] given f(lo) <= 0 <= f(hi) (or the reverse). Returns
/// the bracket end with the smaller |f|.
template <class F>
double bracketed_root(F f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t iterations = kRootIterations;
  auto done = [](double l, double h) { return std::abs(h - l) <= 4e-16 * std::max(1.0, std::abs(h)); };
  const auto [l, h] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, done, iterations);
  return std::abs(f(l)) <= std::abs(f(h)) ? l : h;
}

}  // namespace

Side side_of_line(Vec2 a, Vec2 b, Vec2 p) {
  if (a == b) throw PreconditionError("side_of_line requires a != b");
  const Vec2 ab = b - a;
  const Vec2 ap = p - a;
  const double d = det(ab, ap);
  if (std::abs(d) <= 1e-12 * euclid(ab) * euclid(ap)) {
    throw CollinearError("point is collinear with the reference segment");
  }
  return d > 0.0 ? Side::Positive : Side::Negative;
}

Intersection sphere_intersect(const Norm2& n, Vec2 a, double r1, Vec2 b, double r2, Side side,
                              double tol) {
  if (a == b) throw PreconditionError("sphere_intersect requires distinct centers");
  if (!(r1 > 0.0 && r2 > 0.0)) throw PreconditionError("sphere radii must be positive");
  const Vec2 ab = b - a;
  const double dist = n(ab);

  if (std::abs(dist - (r1 + r2)) <= kTangencyTol) {
    return {a + (r1 / dist) * ab, true};
  }
  if (std::abs(dist - std::abs(r1 - r2)) <= kTangencyTol) {
    return {r1 >= r2 ? a + (r1 / dist) * ab : a - (r1 / dist) * ab, true};
  }
  if (dist > r1 + r2 || dist < std::abs(r1 - r2)) {
    throw InfeasibleError("spheres of radii " + std::to_string(r1) + " and " +
                          std::to_string(r2) + " at distance " + std::to_string(dist) +
                          " do not meet");
  }

  const double base = std::atan2(ab.y, ab.x);
  const double s = sign_of(side);
  auto point_at = [&](double t) { return a + sphere_point(n, r1, base + s * t); };
  auto residual = [&](double t) { return n(point_at(t) - b) - r2; };

  // residual(0) = |dist - r1| - r2 < 0 and residual(pi) = dist + r1 - r2 > 0.
  const double t = bracketed_root(residual, 0.0, std::numbers::pi, std::abs(dist - r1) - r2,
                                  dist + r1 - r2);
  const Vec2 c = point_at(t);
  const double err = std::abs(n(c - b) - r2);
  if (!(err <= tol)) {
    throw ConvergenceError("sphere intersection did not converge", err);
  }
  return {c, false};
}

OrientedFrame make_frame(const Norm2& n, Vec2 a, Vec2 b, double tol) {
  const double d = n(a);
  if (!(d > 0.0)) throw PreconditionError("frame needs a nonzero reference vector");
  if (std::abs(n(b) - d) > tol || std::abs(n(a - b) - d) > tol) {
    throw PreconditionError("frame vectors must satisfy n(a) = n(b) = n(a - b)");
  }
  if (std::abs(det(a, b)) <= 1e-12 * euclid(a) * euclid(b)) {
    throw CollinearError("frame orientation is degenerate");
  }
  return {a, b, d};
}

OrientedFrame frame_from_angle(const Norm2& n, double d, double angle, Side orientation) {
  const Vec2 a = sphere_point(n, d, angle);
  const Vec2 b = sphere_intersect(n, Vec2{}, d, a, d, orientation).point;
  return make_frame(n, a, b);
}

Vec2 h_map(const OrientedFrame& frame, const Norm2& n, Vec2 u) {
  if (!n.claims_strictly_convex()) {
    throw PreconditionError("h is only well defined for strictly convex norms");
  }
  if (std::abs(n(u) - frame.d) > kConstructionTol * std::max(1.0, frame.d)) {
    throw PreconditionError("h_map argument is not on the sphere of radius d");
  }
  if (u == frame.a) return frame.b;
  return sphere_intersect(n, Vec2{}, frame.d, u, frame.d, frame.orientation()).point;
}

double pair_sum_gap(const OrientedFrame& frame, const Norm2& n, Vec2 u) {
  return n(u + h_map(frame, n, u) - frame.a - frame.b);
}

SecondPair find_second_pair(const OrientedFrame& frame, const Norm2& n) {
  const double d = frame.d;
  const double start = std::atan2(frame.a.y, frame.a.x);
  const double s = sign_of(frame.orientation());
  auto angle_at = [&](double t) { return start + s * t; };
  auto point_at = [&](double t) { return sphere_point(n, d, angle_at(t)); };
  auto excess = [&](double t) { return pair_sum_gap(frame, n, point_at(t)) - d; };

  // g(a) = 0 and g(-a) = 2 n(a + h(a)) >= 2d bracket the level d.
  int crossings = 0;
  double root = -1.0;
  double prev_t = 0.0;
  double prev = pair_sum_gap(frame, n, frame.a) - d;
  for (int k = 1; k <= kSecondPairSweep; ++k) {
    const double t = std::numbers::pi * k / kSecondPairSweep;
    const double cur = k == kSecondPairSweep ? pair_sum_gap(frame, n, -frame.a) - d : excess(t);
    if ((prev < 0.0) != (cur < 0.0)) {
      ++crossings;
      if (root < 0.0) root = bracketed_root(excess, prev_t, t, prev, cur);
    }
    prev_t = t;
    prev = cur;
  }
  if (root < 0.0) {
    throw ConvergenceError("pair_sum_gap never reaches d between a and -a; norm is not strictly convex",
                           std::abs(prev));
  }
  const Vec2 a2 = point_at(root);
  const Vec2 b2 = h_map(frame, n, a2);
  return {a2, b2, angle_at(root), crossings};
}

}  // namespace bq
