#pragma once

#include "bq/errors.hpp"
#include "bq/norm.hpp"
#include "bq/vec2.hpp"

namespace bq {

/// Side of the oriented line a -> b: the sign of det(b - a, p - a).
enum class Side : int { Negative = -1, Positive = 1 };

inline Side flip(Side s) { return s == Side::Positive ? Side::Negative : Side::Positive; }
inline double sign_of(Side s) { return static_cast<double>(static_cast<int>(s)); }

/// Throws CollinearError when p is (numerically) on the line.
Side side_of_line(Vec2 a, Vec2 b, Vec2 p);

struct Intersection {
  Vec2 point;
  /// The spheres touch; point is the collinear touch point and both sides agree.
  bool tangent = false;
};

/// The point c on the given side of a -> b with n(c - a) = r1 and n(c - b) = r2.
///
/// The sphere around a is traced by angle and the distance to b is solved on
/// the half-turn belonging to `side` with a bracketed root finder. For strictly
/// convex norms the result is the unique such point on that side.
/// Throws InfeasibleError for incompatible radii and ConvergenceError when the
/// residual cannot be brought under tol.
Intersection sphere_intersect(const Norm2& n, Vec2 a, double r1, Vec2 b, double r2, Side side,
                              double tol = kConstructionTol);

/// Reference pair fixing the orientation of h: n(a) = n(b) = n(a - b) = d.
struct OrientedFrame {
  Vec2 a;
  Vec2 b;
  double d = 0.0;

  Side orientation() const { return det(a, b) > 0.0 ? Side::Positive : Side::Negative; }
};

OrientedFrame make_frame(const Norm2& n, Vec2 a, Vec2 b, double tol = kConstructionTol);

/// Frame with a at the given angle on the sphere of radius d and b chosen on
/// the requested side of the line 0 -> a.
OrientedFrame frame_from_angle(const Norm2& n, double d, double angle,
                               Side orientation = Side::Positive);

/// h(u): the point of the sphere of radius d at distance d from u, on the same
/// rotational side of u as b is of a. h(a) is b by definition of the frame.
Vec2 h_map(const OrientedFrame& frame, const Norm2& n, Vec2 u);

/// g(u) = n(u + h(u) - a - h(a)).
double pair_sum_gap(const OrientedFrame& frame, const Norm2& n, Vec2 u);

struct SecondPair {
  Vec2 a;
  Vec2 b;
  /// Angle of `a` (Euclidean atan2 convention).
  double angle = 0.0;
  /// Number of times g crossed d on the coarse sweep from a to -a. More than
  /// one means other roots exist; the first one is returned.
  int crossings = 0;
};

/// Finds (a', b' = h(a')) with n(a') = n(b') = n(a' - b') = n(a' + b' - a - b) = d.
/// Sweeps the half sphere from a to -a in the frame's orientation and bisects
/// the first bracket where g reaches d.
SecondPair find_second_pair(const OrientedFrame& frame, const Norm2& n);

}  // namespace bq
