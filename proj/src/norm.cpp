#include "bq/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace bq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double eval_p(double p, Vec2 v) {
  const double ax = std::abs(v.x);
  const double ay = std::abs(v.y);
  if (p == 2.0) return std::hypot(ax, ay);
  if (p == 1.0) return ax + ay;
  const double m = std::max(ax, ay);
  if (std::isinf(p) || m == 0.0) return m;
  return m * std::pow(std::pow(ax / m, p) + std::pow(ay / m, p), 1.0 / p);
}

Vec2 gradient_p(double p, Vec2 v) {
  if (v == Vec2{}) return {};
  if (p == 1.0) return {sign(v.x), sign(v.y)};
  if (std::isinf(p)) {
    return std::abs(v.x) >= std::abs(v.y) ? Vec2{sign(v.x), 0.0} : Vec2{0.0, sign(v.y)};
  }
  const double n = eval_p(p, v);
  return {sign(v.x) * std::pow(std::abs(v.x) / n, p - 1.0),
          sign(v.y) * std::pow(std::abs(v.y) / n, p - 1.0)};
}

std::string format_real(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Norm2 Norm2::p_norm(double p) {
  if (!(p >= 1.0)) throw PreconditionError("p-norm requires p >= 1, got " + format_real(p));
  return Norm2(PNormRep{p});
}

Norm2 Norm2::polygonal(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 4 || n % 2 != 0) {
    throw PreconditionError("polygonal norm needs an even number (>= 4) of vertices");
  }
  double scale = 0.0;
  for (const Vec2& v : vertices) {
    if (!is_finite(v)) throw PreconditionError("polygonal norm vertex is not finite");
    scale = std::max(scale, euclid(v));
  }
  if (scale == 0.0) throw PreconditionError("polygonal norm vertices are all zero");
  const double sym_tol = 1e-12 * scale;
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (euclid(vertices[i] + vertices[i + n / 2]) > sym_tol) {
      throw PreconditionError("polygonal norm vertices are not centrally symmetric");
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += det(vertices[i], vertices[(i + 1) % n]);
  if (std::abs(area2) <= 1e-12 * scale * scale) {
    throw PreconditionError("polygonal norm ball is degenerate");
  }
  if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
    const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (det(e0, e1) < -1e-12 * scale * scale) {
      throw PreconditionError("polygonal norm ball is not convex");
    }
  }
  std::vector<Vec2> facets;
  facets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 v0 = vertices[i];
    const Vec2 e = vertices[(i + 1) % n] - v0;
    const Vec2 normal{e.y, -e.x};
    const double h = dot(normal, v0);
    if (h <= 0.0) throw PreconditionError("origin is not interior to the polygonal ball");
    facets.push_back(normal / h);
  }
  return Norm2(PolygonRep{std::move(vertices), std::move(facets)});
}

Norm2 Norm2::blend(const Norm2& base, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw PreconditionError("blend weight must lie in [0, 1], got " + format_real(lambda));
  }
  return Norm2(BlendRep{std::make_shared<const Norm2>(base), lambda});
}

double Norm2::operator()(Vec2 v) const {
  return std::visit(
      [v](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, PNormRep>) {
          return eval_p(rep.p, v);
        } else if constexpr (std::is_same_v<T, PolygonRep>) {
          double best = 0.0;
          for (const Vec2& f : rep.facets) best = std::max(best, dot(f, v));
          return best;
        } else {
          return (1.0 - rep.lambda) * (*rep.base)(v) + rep.lambda * euclid(v);
        }
      },
      rep_);
}

Vec2 Norm2::gradient(Vec2 v) const {
  if (v == Vec2{}) return {};
  return std::visit(
      [v](const auto& rep) -> Vec2 {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, PNormRep>) {
          return gradient_p(rep.p, v);
        } else if constexpr (std::is_same_v<T, PolygonRep>) {
          std::size_t arg = 0;
          double best = -kInf;
          for (std::size_t i = 0; i < rep.facets.size(); ++i) {
            const double s = dot(rep.facets[i], v);
            if (s > best) {
              best = s;
              arg = i;
            }
          }
          return rep.facets[arg];
        } else {
          return (1.0 - rep.lambda) * rep.base->gradient(v) + (rep.lambda / euclid(v)) * v;
        }
      },
      rep_);
}

Norm2::Kind Norm2::kind() const {
  return static_cast<Kind>(rep_.index());
}

bool Norm2::claims_strictly_convex() const {
  return std::visit(
      [](const auto& rep) -> bool {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, PNormRep>) {
          return rep.p > 1.0 && !std::isinf(rep.p);
        } else if constexpr (std::is_same_v<T, PolygonRep>) {
          return false;
        } else {
          return rep.lambda > 0.0 || rep.base->claims_strictly_convex();
        }
      },
      rep_);
}

bool Norm2::is_euclidean() const {
  return std::visit(
      [](const auto& rep) -> bool {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, PNormRep>) {
          return rep.p == 2.0;
        } else if constexpr (std::is_same_v<T, PolygonRep>) {
          return false;
        } else {
          return rep.lambda == 1.0 || rep.base->is_euclidean();
        }
      },
      rep_);
}

int Norm2::symmetry_order() const {
  if (is_euclidean()) return 0;
  return std::visit(
      [](const auto& rep) -> int {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, PNormRep>) {
          return 8;
        } else if constexpr (std::is_same_v<T, PolygonRep>) {
          return 2;
        } else {
          // The Euclidean part is invariant under every isometry of the base.
          return rep.base->symmetry_order();
        }
      },
      rep_);
}

double Norm2::p() const {
  if (const auto* rep = std::get_if<PNormRep>(&rep_)) return rep->p;
  throw PreconditionError("norm is not a p-norm");
}

const std::vector<Vec2>& Norm2::vertices() const {
  if (const auto* rep = std::get_if<PolygonRep>(&rep_)) return rep->vertices;
  throw PreconditionError("norm is not polygonal");
}

const Norm2& Norm2::base() const {
  if (const auto* rep = std::get_if<BlendRep>(&rep_)) return *rep->base;
  throw PreconditionError("norm is not a blend");
}

double Norm2::lambda() const {
  if (const auto* rep = std::get_if<BlendRep>(&rep_)) return rep->lambda;
  throw PreconditionError("norm is not a blend");
}

std::string Norm2::describe() const {
  switch (kind()) {
    case Kind::PNorm:
      return "p:" + format_real(p());
    case Kind::Polygonal:
      return "poly:" + std::to_string(vertices().size()) + "-gon";
    case Kind::Blend:
      return "blend:" + base().describe() + "," + format_real(lambda());
  }
  return {};
}

Norm2 strictify(const Norm2& n, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw PreconditionError("strictify requires 0 < lambda <= 1, got " + format_real(lambda));
  }
  return Norm2::blend(n, lambda);
}

ConvexityReport strict_convexity_scan(const Norm2& n, std::size_t samples, double tol,
                                      std::uint64_t seed, double min_separation) {
  if (samples < 1) throw PreconditionError("strict_convexity_scan needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> gap(min_separation, std::numbers::pi - min_separation);

  ConvexityReport report;
  report.worst_deficit = kInf;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = angle(rng);
    const Vec2 a = sphere_point(n, 1.0, t);
    const Vec2 b = sphere_point(n, 1.0, t + gap(rng));
    const double deficit = n(a) + n(b) - n(a + b);
    if (deficit < report.worst_deficit) {
      report.worst_deficit = deficit;
      report.worst_pair = {a, b};
    }
  }
  report.is_consistent = report.worst_deficit > tol;
  return report;
}

bool check_star_condition(const Norm2& n, Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  if (a == b) throw PreconditionError("check_star_condition requires a != b");
  const Vec2 ab = b - a;
  const double dc = det(ab, c - a);
  const double dd = det(ab, d - a);
  const double scale = euclid(ab);
  if (std::abs(dc) <= 1e-12 * scale * euclid(c - a) ||
      std::abs(dd) <= 1e-12 * scale * euclid(d - a)) {
    throw CollinearError("c or d lies on the line through a and b");
  }
  if ((dc > 0.0) != (dd > 0.0)) {
    throw OppositeSidesError("c and d lie on opposite sides of the line through a and b");
  }
  const bool hypothesis =
      std::abs(n(a - c) - n(a - d)) <= tol && std::abs(n(b - c) - n(b - d)) <= tol;
  return !hypothesis || n(c - d) <= tol;
}

StarReport star_condition_scan(const Norm2& n, std::size_t samples, double tol,
                               std::uint64_t seed) {
  constexpr int kSweep = 720;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  StarReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec2 a{coord(rng), coord(rng)};
    const Vec2 b{coord(rng), coord(rng)};
    const Vec2 c{coord(rng), coord(rng)};
    const Vec2 ab = b - a;
    const double side = det(ab, c - a);
    if (euclid(ab) < 1e-3 || std::abs(side) < 1e-3) continue;
    const double r1 = n(c - a);
    const double r2 = n(c - b);
    const double base = std::atan2(ab.y, ab.x);
    for (int k = 1; k < kSweep; ++k) {
      const double t = base + (side > 0 ? 1.0 : -1.0) * std::numbers::pi * k / kSweep;
      const Vec2 d = a + sphere_point(n, r1, t);
      if (std::abs(n(d - b) - r2) > tol) continue;
      const double sep = n(c - d);
      if (sep > report.max_violation) {
        report.max_violation = sep;
        // Grid points next to c itself match both distances to first order.
        if (sep > 1e-3 * r1) report.witness_quadruple = std::array<Vec2, 4>{a, b, c, d};
      }
    }
  }
  report.holds = !report.witness_quadruple.has_value();
  return report;
}

}  // namespace bq
