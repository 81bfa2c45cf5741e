#include <algorithm>
#include <array>
#include <optional>
#include <random>

#include "bq/parallel.hpp"
#include "bq/sphere.hpp"
#include "bq/verify.hpp"

namespace bq {

namespace {

std::mt19937_64 restart_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Half of the restarts start near the source layout, half anywhere in its box.
std::vector<Vec2> initial_images(const ConstraintGraph& g, std::mt19937_64& rng, bool near_source,
                                 double rho) {
  std::vector<Vec2> pts = g.source_points;
  Vec2 lo = pts.front();
  Vec2 hi = pts.front();
  for (Vec2 p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double pad = rho;
  std::normal_distribution<double> jitter(0.0, 0.3 * rho);
  std::uniform_real_distribution<double> ux(lo.x - pad, hi.x + pad);
  std::uniform_real_distribution<double> uy(lo.y - pad, hi.y + pad);
  for (Vec2& p : pts) {
    p = near_source ? p + Vec2{jitter(rng), jitter(rng)} : Vec2{ux(rng), uy(rng)};
  }
  const Vec2 shift = pts[g.anchor_x];
  for (Vec2& p : pts) p -= shift;
  return pts;
}

}  // namespace

VerifyReport falsify(const WitnessSet& w, const Norm2& target, std::size_t restarts,
                     std::uint64_t seed, double tol, bool require_injective,
                     const FalsifyOptions& options) {
  if (restarts < 1) throw PreconditionError("falsify needs at least one restart");
  const ConstraintGraph g = ConstraintGraph::from_witness(w);
  const std::array<std::size_t, 1> fixed{g.anchor_x};
  const double probe_range = g.target_distance > 0.0 ? 2.0 * g.target_distance : 2.0 * w.rho;

  auto run = [&](std::size_t r) -> std::optional<Placement> {
    auto rng = restart_rng(seed, r);
    std::vector<Vec2> pts = initial_images(g, rng, r % 2 == 0, w.rho);
    std::uniform_real_distribution<double> tau(0.0, probe_range);
    PolishOptions opts;
    opts.max_iterations = options.stage_iterations;
    if (g.anchor_x != g.anchor_y) {
      const DistanceProbe probe{g.anchor_x, g.anchor_y, tau(rng), options.probe_weight};
      pts = polish_placement(target, std::move(pts), g.edges, fixed, opts, probe).points;
    }
    pts = polish_placement(target, std::move(pts), g.edges, fixed, opts).points;
    Placement p = evaluate_placement(g, target, std::move(pts));
    if (p.max_edge_residual > tol) return std::nullopt;
    return p;
  };
  auto results = parallel_map(restarts, run, options.threads);

  VerifyReport report;
  report.mode = VerifyMode::Falsify;
  report.search_budget_used = restarts;
  const double allowance = g.gap_allowance + 10.0 * tol;
  for (auto& res : results) {
    if (!res) continue;
    Placement& p = *res;
    ++report.placements_found;
    const bool big_gap = std::abs(p.anchor_gap) > allowance;
    if (p.injective) {
      ++report.injective_found;
      report.max_abs_gap_injective = std::max(report.max_abs_gap_injective, std::abs(p.anchor_gap));
      if (big_gap) report.violations.push_back(std::move(p));
    } else if (big_gap && !require_injective) {
      report.violations.push_back(std::move(p));
    } else {
      report.non_injective_found.push_back(std::move(p));
    }
  }
  report.notes.push_back(std::to_string(restarts) + " restarts, " +
                         std::to_string(report.placements_found) + " consistent optima");
  return report;
}

EquilateralResult equilateral_search(const Norm2& target, double d, std::size_t n_points,
                                     std::size_t restarts, std::uint64_t seed) {
  if (n_points < 3) throw PreconditionError("equilateral search needs at least 3 points");
  if (!(d > 0.0)) throw PreconditionError("equilateral distance must be positive");
  std::vector<DistanceConstraint> pairs;
  for (std::size_t i = 0; i < n_points; ++i) {
    for (std::size_t j = i + 1; j < n_points; ++j) pairs.push_back({i, j, d});
  }
  const std::array<std::size_t, 1> fixed{0};

  // Greedy start: an equilateral triangle by sphere intersection, further
  // points on alternating sides of its first edge.
  std::vector<Vec2> greedy(n_points);
  greedy[1] = sphere_point(target, d, 0.0);
  for (std::size_t k = 2; k < n_points; ++k) {
    const Side side = k % 2 == 0 ? Side::Positive : Side::Negative;
    greedy[k] = sphere_intersect(target, greedy[0], d, greedy[1], d, side).point;
  }
  EquilateralResult best;
  best.best_points = polish_placement(target, greedy, pairs, fixed).points;
  best.best_residual = max_residual(target, best.best_points, pairs);
  if (n_points == 3) return best;

  PolishOptions opts;
  opts.fallback_sweeps = 50;
  for (std::size_t r = 1; r < restarts && best.best_residual > 1e-12 * d; ++r) {
    auto rng = restart_rng(seed, r);
    std::uniform_real_distribution<double> u(-1.5 * d, 1.5 * d);
    std::vector<Vec2> pts(n_points);
    for (std::size_t k = 1; k < n_points; ++k) pts[k] = {u(rng), u(rng)};
    pts = polish_placement(target, std::move(pts), pairs, fixed, opts).points;
    const double res = max_residual(target, pts, pairs);
    if (res < best.best_residual) {
      best.best_residual = res;
      best.best_points = std::move(pts);
    }
  }
  return best;
}

}  // namespace bq
