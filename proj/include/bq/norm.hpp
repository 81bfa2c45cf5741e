#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bq/errors.hpp"
#include "bq/vec2.hpp"

namespace bq {

/// A norm on the real plane.
///
/// Three families are supported: p-norms (1 <= p <= inf), norms whose unit
/// ball is a centrally symmetric convex polygon, and blends
/// v -> (1 - lambda) * base(v) + lambda * |v|_2. Instances are immutable
/// values and cheap to copy.
class Norm2 {
 public:
  enum class Kind { PNorm, Polygonal, Blend };

  /// p must be >= 1; pass +infinity for the max norm.
  static Norm2 p_norm(double p);
  /// Vertices of the unit ball in either orientation, centrally symmetric.
  static Norm2 polygonal(std::vector<Vec2> vertices);
  static Norm2 blend(const Norm2& base, double lambda);
  static Norm2 euclidean() { return p_norm(2.0); }

  double operator()(Vec2 v) const;

  /// A subgradient of the norm at v; zero at the origin.
  Vec2 gradient(Vec2 v) const;

  Kind kind() const;
  bool claims_strictly_convex() const;
  bool is_euclidean() const;

  /// Order of the finite group of linear isometries known to act on the
  /// unit sphere (2 for central symmetry, 8 for the square's dihedral
  /// group). Zero means rotation invariant.
  int symmetry_order() const;

  // Family parameters, for serialization.
  double p() const;
  const std::vector<Vec2>& vertices() const;
  const Norm2& base() const;
  double lambda() const;

  std::string describe() const;

 private:
  struct PNormRep {
    double p;
  };
  struct PolygonRep {
    std::vector<Vec2> vertices;
    std::vector<Vec2> facets;  // f with f.v = 1 on each edge of the ball
  };
  struct BlendRep {
    std::shared_ptr<const Norm2> base;
    double lambda;
  };

  explicit Norm2(std::variant<PNormRep, PolygonRep, BlendRep> rep) : rep_(std::move(rep)) {}

  std::variant<PNormRep, PolygonRep, BlendRep> rep_;
};

inline double eval_norm(const Norm2& n, Vec2 v) { return n(v); }

/// The blend (1 - lambda) n + lambda |.|_2, strictly convex for lambda > 0.
Norm2 strictify(const Norm2& n, double lambda);

/// Point r * u / n(u) on the sphere of radius r, u the Euclidean direction at theta.
inline Vec2 sphere_point(const Norm2& n, double radius, double theta) {
  const Vec2 u = direction(theta);
  return (radius / n(u)) * u;
}

struct ConvexityReport {
  bool is_consistent = true;
  /// Unit vectors a, b whose triangle-inequality slack was smallest.
  std::pair<Vec2, Vec2> worst_pair;
  /// n(a) + n(b) - n(a + b) for the worst pair.
  double worst_deficit = 0.0;
};

/// Randomized search for unit vectors a, b that are not positively parallel
/// yet satisfy n(a + b) >= n(a) + n(b) - tol. Pairs are drawn with angular
/// separation at least min_separation radians.
ConvexityReport strict_convexity_scan(const Norm2& n, std::size_t samples, double tol,
                                      std::uint64_t seed, double min_separation = 0.05);

/// Condition (*) on a single quadruple: if c, d (strictly on the same side of
/// line ab) are equidistant from a and from b within tol, they must coincide.
/// Returns false iff the quadruple violates it. Throws CollinearError or
/// OppositeSidesError when the side precondition fails.
bool check_star_condition(const Norm2& n, Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol);

struct StarReport {
  bool holds = true;
  std::optional<std::array<Vec2, 4>> witness_quadruple;
  double max_violation = 0.0;
};

/// Randomized scan of condition (*): for random a, b, c it sweeps the sphere
/// around a through c on c's side of line ab and reports the farthest point d
/// that matches both distances of c within tol.
StarReport star_condition_scan(const Norm2& n, std::size_t samples, double tol, std::uint64_t seed);

}  // namespace bq
