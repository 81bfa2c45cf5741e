#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bq/errors.hpp"
#include "bq/norm.hpp"
#include "bq/rational.hpp"
#include "bq/vec2.hpp"

namespace bq {

/// One step of a recursive construction: the rule applied to the pair (x, y)
/// and the sub-constructions it unions. Rules are "base", "fig1" (doubling),
/// "fig2" (integer multiple), "fig3" (division), "fig4" (approximation),
/// "fig5" (the 11-point configuration) and "union".
struct TraceNode {
  std::string rule;
  std::optional<Rational> ratio;  // distance / rho when exact
  double distance = 0.0;
  Vec2 x;
  Vec2 y;
  std::optional<double> eps;  // fig4 only
  std::vector<std::string> notes;
  std::vector<TraceNode> children;

  std::size_t depth() const;
  std::size_t size() const;
};

/// The abstract 11-vertex, 19-edge graph of the doubling configuration that
/// does not need injectivity.
struct ConfigGraph {
  static constexpr std::size_t kVertices = 11;

  std::array<std::string, kVertices> labels;
  std::array<std::array<int, kVertices>, kVertices> adjacency;

  static const ConfigGraph& figure5();

  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  friend bool operator==(const ConfigGraph&, const ConfigGraph&) = default;
};

/// Finite point set S_xy whose rho-edges force the distance between its two
/// anchors under every (injective) rho-preserving map into a strictly convex
/// plane.
struct WitnessSet {
  Norm2 source_norm = Norm2::euclidean();
  double rho = 1.0;
  std::vector<Vec2> points;
  std::vector<std::string> labels;
  /// Index pairs (i < j), sorted, at source distance rho.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t anchor_x = 0;
  std::size_t anchor_y = 0;
  double target_distance = 0.0;
  bool approximate = false;
  std::optional<double> eps;
  TraceNode trace;
  std::optional<ConfigGraph> config_graph;

  /// Index of the first point carrying the label, if any.
  std::optional<std::size_t> find_label(const std::string& label) const;
};

/// Invariant violations found in w, empty when it is well formed.
std::vector<std::string> check_invariants(const WitnessSet& w, double tol = kConstructionTol);

/// Union of witness sets over the same rho and source norm: points within
/// kDedupTol are merged, edges re-indexed, anchors and labels of the first
/// set win, and the traces become children of a "union" node.
WitnessSet dedup_and_merge(const std::vector<WitnessSet>& sets);

struct BuildOptions {
  double tol = kConstructionTol;
  int max_depth = 64;
};

/// Recursive constructor for witness sets over a fixed source norm and rho.
///
/// Distances are passed as exact ratios to rho. The builder never looks at a
/// target norm: the sets it produces are valid for every strictly convex
/// target plane. Sub-builds are memoized per (ratio, endpoints) for the
/// lifetime of the builder.
class WitnessBuilder {
 public:
  WitnessBuilder(Norm2 source, double rho, BuildOptions options = {});

  const Norm2& source_norm() const { return source_; }
  double rho() const { return rho_; }

  /// n(x - y) in {0, rho}.
  WitnessSet base_pair(Vec2 x, Vec2 y);
  /// n(x - y) = 2 d rho. Midpoint z, apex y1 over (x, z), x1 = y1 + (z - x).
  WitnessSet double_set(Vec2 x, Vec2 y, Rational d);
  /// n(x - y) = k d rho. Collinear chain with sub-sets on d and 2d pairs.
  WitnessSet multiply_set(Vec2 x, Vec2 y, std::int64_t k, Rational d);
  /// n(x - y) = d rho / k. Apex z at distance d from both, then the scaled
  /// copies x~ = x + (k-1)(x - z), y~ = y + (k-1)(y - z).
  WitnessSet divide_set(Vec2 x, Vec2 y, std::int64_t k, Rational d);
  /// Any nonnegative rational q with n(x - y) = q rho.
  WitnessSet build(Vec2 x, Vec2 y, Rational q);

 private:
  using MemoKey = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t,
                             std::int64_t, std::int64_t>;

  void require_distance(Vec2 x, Vec2 y, double expected, const char* rule) const;
  WitnessSet finish(std::vector<WitnessSet> parts, Vec2 x, Vec2 y, TraceNode node,
                    const std::vector<std::pair<Vec2, std::string>>& names);
  WitnessSet build_at_depth(Vec2 x, Vec2 y, Rational q, int depth);

  Norm2 source_;
  double rho_;
  BuildOptions options_;
  int depth_ = 0;
  std::map<MemoKey, WitnessSet> memo_;
};

WitnessSet build_rational(Vec2 x, Vec2 y, Rational q, double rho, const Norm2& source_norm);

/// Choice of the intermediate point for the approximate construction.
struct ApproxChoice {
  Rational q;  // n(x - z) = q rho
  Rational r;  // n(z - y) = r rho <= eps / 2
};

/// Picks the first continued-fraction convergent q of n(x - y) / rho that is
/// within r = 1/N of it, N = ceil(2 rho / eps).
ApproxChoice choose_approximation(double distance, double eps, double rho);

/// T_xy(eps) = S_xz u S_zy; flagged approximate with bound eps.
WitnessSet approx_set(Vec2 x, Vec2 y, double eps, double rho, const Norm2& source_norm);

struct Figure5Options {
  /// Strictification weights tried in order for non-strictly-convex norms.
  std::vector<double> continuation = {1e-1, 1e-2, 1e-3};
  double tol = kConstructionTol;
};

/// The 11-point configuration with all 19 edges of length d = n(x - y) / 2;
/// rho is set to d and the anchors are (x, y) at distance 2d.
WitnessSet figure5_config(Vec2 x, Vec2 y, const Norm2& source_norm,
                          const Figure5Options& options = {});

}  // namespace bq
