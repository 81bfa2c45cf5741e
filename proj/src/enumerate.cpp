#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "bq/parallel.hpp"
#include "bq/sphere.hpp"
#include "bq/verify.hpp"

namespace bq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr Vec2 kNoPoint{kNaN, kNaN};

struct Neighbor {
  std::size_t v;
  double length;
};

/// One placement step: vertex v and its already placed neighbours.
struct Step {
  std::size_t v;
  std::vector<Neighbor> placed;
};

std::vector<Step> make_plan(const ConstraintGraph& g) {
  std::vector<std::vector<Neighbor>> adj(g.vertex_count);
  for (const auto& e : g.edges) {
    adj[e.i].push_back({e.j, e.length});
    adj[e.j].push_back({e.i, e.length});
  }
  std::vector<bool> placed(g.vertex_count, false);
  std::vector<std::size_t> when(g.vertex_count, 0);
  placed[g.anchor_x] = true;
  std::vector<Step> plan;
  for (std::size_t round = 1; round < g.vertex_count; ++round) {
    std::size_t best = g.vertex_count;
    std::size_t best_count = 0;
    for (std::size_t v = 0; v < g.vertex_count; ++v) {
      if (placed[v]) continue;
      std::vector<std::size_t> distinct;
      for (const auto& nb : adj[v]) {
        if (placed[nb.v] && std::find(distinct.begin(), distinct.end(), nb.v) == distinct.end()) {
          distinct.push_back(nb.v);
        }
      }
      if (distinct.size() > best_count) {
        best_count = distinct.size();
        best = v;
      }
    }
    if (best_count == 0) throw PreconditionError("constraint graph is not connected");
    Step step{best, {}};
    for (const auto& nb : adj[best]) {
      if (placed[nb.v]) step.placed.push_back(nb);
    }
    // Earliest placed neighbours first, so parents are chosen near the anchor.
    std::stable_sort(step.placed.begin(), step.placed.end(),
                     [&](const Neighbor& a, const Neighbor& b) { return when[a.v] < when[b.v]; });
    placed[best] = true;
    when[best] = round;
    plan.push_back(std::move(step));
  }
  return plan;
}

/// A one-parameter family: vertex `v` on the sphere of radius r about c,
/// followed by pair steps replayed with fixed sides.
struct Sweep {
  std::size_t start_step;
  std::size_t v;
  Vec2 center;
  double radius;
  std::vector<double> thetas;
  std::vector<std::vector<Vec2>> images;  // per vertex, empty if not swept
  struct Trail {
    std::size_t v;
    Neighbor p1;
    Neighbor p2;
    Side side;
  };
  std::vector<Trail> trail;
};

class Enumerator {
 public:
  Enumerator(const ConstraintGraph& g, const Norm2& target, const EnumerateOptions& options,
             const std::vector<Step>& plan)
      : g_(g), target_(target), options_(options), plan_(plan), img_(g.vertex_count, kNoPoint) {
    double scale = 1.0;
    for (const auto& e : g.edges) scale = std::max(scale, e.length);
    scale_ = scale;
    prune_tol_ = 1e-6 * scale;
    flat_tol_ = 1e-9 * scale;
    report_.mode = VerifyMode::Enumerate;
  }

  VerifyReport run_direction(double theta) {
    img_[g_.anchor_x] = {0.0, 0.0};
    if (plan_.empty()) {
      leaf(img_);
      return std::move(report_);
    }
    const Step& first = plan_.front();
    img_[first.v] = img_[g_.anchor_x] + sphere_point(target_, first.placed.front().length, theta);
    if (closures_hold(first, img_[first.v], 1)) scalar(1);
    return std::move(report_);
  }

 private:
  Vec2 intersect(Vec2 a, double r1, Vec2 b, double r2, Side side, bool* tangent) {
    ++report_.search_budget_used;
    try {
      const Intersection hit = sphere_intersect(target_, a, r1, b, r2, side);
      if (tangent) *tangent = hit.tangent;
      return hit.point;
    } catch (const InfeasibleError&) {
    } catch (const ConvergenceError&) {
    }
    return kNoPoint;
  }

  /// Neighbours of the step beyond the first `skip` parents must already match.
  bool closures_hold(const Step& step, Vec2 p, std::size_t skip) const {
    for (std::size_t k = skip; k < step.placed.size(); ++k) {
      const auto& nb = step.placed[k];
      if (std::abs(target_(p - img_[nb.v]) - nb.length) > prune_tol_) return false;
    }
    return true;
  }

  /// Two placed neighbours with distinct images, moved to the front.
  std::optional<std::pair<Neighbor, Neighbor>> parents(const Step& step,
                                                       std::vector<Neighbor>& rest) const {
    for (std::size_t i = 0; i < step.placed.size(); ++i) {
      for (std::size_t j = i + 1; j < step.placed.size(); ++j) {
        const Vec2 a = img_[step.placed[i].v];
        const Vec2 b = img_[step.placed[j].v];
        if (euclid(a - b) > kDedupTol * scale_) {
          rest.clear();
          for (std::size_t k = 0; k < step.placed.size(); ++k) {
            if (k != i && k != j) rest.push_back(step.placed[k]);
          }
          return std::pair{step.placed[i], step.placed[j]};
        }
      }
    }
    return std::nullopt;
  }

  void scalar(std::size_t k) {
    if (k == plan_.size()) {
      leaf(img_);
      return;
    }
    const Step& step = plan_[k];
    std::vector<Neighbor> rest;
    if (auto pp = parents(step, rest)) {
      const auto [p1, p2] = *pp;
      for (Side side : {Side::Positive, Side::Negative}) {
        bool tangent = false;
        const Vec2 c = intersect(img_[p1.v], p1.length, img_[p2.v], p2.length, side, &tangent);
        if (!is_finite(c)) continue;
        bool ok = true;
        for (const auto& nb : rest) {
          if (std::abs(target_(c - img_[nb.v]) - nb.length) > prune_tol_) ok = false;
        }
        if (ok) {
          img_[step.v] = c;
          scalar(k + 1);
          img_[step.v] = kNoPoint;
        }
        if (tangent) break;
      }
      return;
    }
    // All placed neighbours share one image: a circle of candidates.
    const Neighbor& nb = step.placed.front();
    for (const auto& other : step.placed) {
      if (std::abs(other.length - nb.length) > prune_tol_) return;
    }
    start_sweep(k, img_[nb.v], nb.length);
  }

  void start_sweep(std::size_t k, Vec2 center, double radius) {
    Sweep sw;
    sw.start_step = k;
    sw.v = plan_[k].v;
    sw.center = center;
    sw.radius = radius;
    const std::size_t n = std::max<std::size_t>(options_.sweep_grid, 8);
    sw.thetas.resize(n);
    sw.images.assign(g_.vertex_count, {});
    auto& arr = sw.images[sw.v];
    arr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      sw.thetas[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      arr[i] = center + sphere_point(target_, radius, sw.thetas[i]);
    }
    swept(sw, k + 1);
  }

  Vec2 at(const Sweep& sw, std::size_t v, std::size_t i) const {
    return sw.images[v].empty() ? img_[v] : sw.images[v][i];
  }

  void swept(Sweep& sw, std::size_t k) {
    const std::size_t n = sw.thetas.size();
    if (k == plan_.size()) {
      // The whole remaining family is consistent: sample it.
      report_.notes.push_back("one-parameter family sampled at " + std::to_string(n) + " angles");
      std::vector<Vec2> pts = img_;
      for (std::size_t i = 0; i < n; ++i) {
        bool ok = true;
        for (std::size_t v = 0; v < g_.vertex_count; ++v) {
          if (!sw.images[v].empty()) {
            pts[v] = sw.images[v][i];
            ok = ok && is_finite(pts[v]);
          }
        }
        if (ok) leaf(pts);
      }
      return;
    }
    const Step& step = plan_[k];
    if (step.placed.size() < 2) {
      report_.inconclusive = true;
      report_.notes.push_back("nested one-parameter family at vertex " + std::to_string(step.v) +
                              "; branch not resolved");
      return;
    }
    const Neighbor p1 = step.placed[0];
    const Neighbor p2 = step.placed[1];
    std::vector<Neighbor> rest(step.placed.begin() + 2, step.placed.end());
    for (Side side : {Side::Positive, Side::Negative}) {
      std::vector<Vec2> arr(n, kNoPoint);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = at(sw, p1.v, i);
        const Vec2 b = at(sw, p2.v, i);
        if (!is_finite(a) || !is_finite(b) || euclid(a - b) <= kDedupTol * scale_) continue;
        arr[i] = intersect(a, p1.length, b, p2.length, side, nullptr);
        any = any || is_finite(arr[i]);
      }
      if (!any) continue;
      sw.images[step.v] = std::move(arr);
      sw.trail.push_back({step.v, p1, p2, side});
      close(sw, k, rest);
      sw.trail.pop_back();
      sw.images[step.v].clear();
    }
  }

  /// Checks the extra neighbours of step k along the family and descends.
  void close(Sweep& sw, std::size_t k, const std::vector<Neighbor>& rest) {
    const std::size_t n = sw.thetas.size();
    const std::size_t v = plan_[k].v;
    for (const auto& nb : rest) {
      std::vector<double> s(n, kNaN);
      bool flat = true;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = sw.images[v][i];
        const Vec2 q = at(sw, nb.v, i);
        if (!is_finite(p) || !is_finite(q)) continue;
        s[i] = target_(p - q) - nb.length;
        flat = flat && std::abs(s[i]) <= flat_tol_;
      }
      if (flat) continue;
      for (double theta : roots(sw, s, v, nb)) {
        if (!replay(sw, theta)) continue;
        if (!closures_hold(plan_[k], img_[v], 0)) continue;
        scalar(k + 1);
      }
      for (std::size_t u = 0; u < g_.vertex_count; ++u) {
        if (!sw.images[u].empty()) img_[u] = kNoPoint;
      }
      return;
    }
    swept(sw, k + 1);
  }

  /// Places every swept vertex at angle theta; false if some step fails.
  bool replay(const Sweep& sw, double theta) {
    img_[sw.v] = sw.center + sphere_point(target_, sw.radius, theta);
    for (const auto& t : sw.trail) {
      const Vec2 a = img_[t.p1.v];
      const Vec2 b = img_[t.p2.v];
      if (euclid(a - b) <= kDedupTol * scale_) return false;
      img_[t.v] = intersect(a, t.p1.length, b, t.p2.length, t.side, nullptr);
      if (!is_finite(img_[t.v])) return false;
    }
    return true;
  }

  double closure_at(const Sweep& sw, double theta, std::size_t v, const Neighbor& nb) {
    if (!replay(sw, theta)) return kNaN;
    return target_(img_[v] - img_[nb.v]) - nb.length;
  }

  std::vector<double> roots(const Sweep& sw, const std::vector<double>& s, std::size_t v,
                            const Neighbor& nb) {
    const std::size_t n = s.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    auto f = [&](double t) { return closure_at(sw, t, v, nb); };
    auto near_zero = [&](double x) { return std::isfinite(x) && std::abs(x) <= flat_tol_; };
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (near_zero(s[i])) {
        out.push_back(sw.thetas[i]);
        continue;
      }
      const std::size_t j = (i + 1) % n;
      const double lo_t = sw.thetas[i];
      if (std::isfinite(s[i]) && std::isfinite(s[j]) && !near_zero(s[j]) && s[i] * s[j] < 0.0) {
        double lo = lo_t;
        double hi = lo_t + step;
        double flo = s[i];
        bool ok = true;
        for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if (!std::isfinite(fm)) {
            ok = false;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double t = 0.5 * (lo + hi);
        if (ok && std::abs(f(t)) <= 1e-8 * scale_) out.push_back(t);
        continue;
      }
      // Touching zero without a sign change: refine interior local minima of |s|.
      const std::size_t h = (i + n - 1) % n;
      if (!std::isfinite(s[h]) || !std::isfinite(s[i]) || !std::isfinite(s[j])) continue;
      if (near_zero(s[h]) || near_zero(s[j])) continue;
      if (s[h] * s[i] < 0.0 || s[i] * s[j] < 0.0) continue;
      if (!(std::abs(s[i]) <= std::abs(s[h]) && std::abs(s[i]) < std::abs(s[j]))) continue;
      if (std::abs(s[i]) > 0.1 * scale_) continue;
      double a = lo_t - step;
      double b = lo_t + step;
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - inv_phi * (b - a);
      double d = a + inv_phi * (b - a);
      double fc = std::abs(f(c));
      double fd = std::abs(f(d));
      for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
        if (!(fc >= fd) && std::isfinite(fc)) {
          b = d;
          d = c;
          fd = fc;
          c = b - inv_phi * (b - a);
          fc = std::abs(f(c));
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + inv_phi * (b - a);
          fd = std::abs(f(d));
        }
      }
      const double t = 0.5 * (a + b);
      const double ft = f(t);
      if (std::isfinite(ft) && std::abs(ft) <= 1e-9 * scale_) out.push_back(t);
    }
    return out;
  }

  void leaf(const std::vector<Vec2>& pts) {
    if (++leaves_ > options_.leaf_cap) {
      throw BudgetExceededError("enumeration exceeded the leaf cap of " +
                                std::to_string(options_.leaf_cap));
    }
    Placement p = evaluate_placement(g_, target_, pts);
    if (p.max_edge_residual > 1e-12 * scale_) {
      const std::array<std::size_t, 1> fixed{g_.anchor_x};
      p = evaluate_placement(
          g_, target_, polish_placement(target_, pts, g_.edges, fixed).points);
    }
    if (p.max_edge_residual > options_.tol) return;
    ++report_.placements_found;
    const double allowance = g_.gap_allowance + 10.0 * options_.tol;
    if (p.injective) {
      ++report_.injective_found;
      report_.max_abs_gap_injective = std::max(report_.max_abs_gap_injective, std::abs(p.anchor_gap));
      if (std::abs(p.anchor_gap) > allowance) report_.violations.push_back(std::move(p));
    } else {
      report_.non_injective_found.push_back(std::move(p));
    }
  }

  const ConstraintGraph& g_;
  const Norm2& target_;
  const EnumerateOptions& options_;
  const std::vector<Step>& plan_;
  std::vector<Vec2> img_;
  double scale_ = 1.0;
  double prune_tol_ = 1e-6;
  double flat_tol_ = 1e-9;
  std::size_t leaves_ = 0;
  VerifyReport report_;
};

std::vector<double> first_directions(const Norm2& target, std::size_t grid) {
  grid = std::max<std::size_t>(grid, 8);
  const int order = target.symmetry_order();
  if (order == 0) return {0.0};
  // Fundamental arc of the symmetry group acting on the circle.
  const std::size_t count = order == 8 ? grid / 8 + 1 : grid / 2;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid);
  }
  return out;
}

}  // namespace

const char* to_string(VerifyMode mode) {
  switch (mode) {
    case VerifyMode::Enumerate:
      return "enumerate";
    case VerifyMode::Falsify:
      return "falsify";
    case VerifyMode::Compositional:
      return "compositional";
  }
  return "unknown";
}

ConstraintGraph ConstraintGraph::from_witness(const WitnessSet& w) {
  ConstraintGraph g;
  g.vertex_count = w.points.size();
  for (const auto& [i, j] : w.edges) g.edges.push_back({i, j, w.rho});
  g.anchor_x = w.anchor_x;
  g.anchor_y = w.anchor_y;
  g.target_distance = w.target_distance;
  g.gap_allowance = w.approximate && w.eps ? *w.eps : 0.0;
  g.source_points = w.points;
  return g;
}

Placement evaluate_placement(const ConstraintGraph& g, const Norm2& target,
                             std::vector<Vec2> images) {
  Placement p;
  p.max_edge_residual = max_residual(target, images, g.edges);
  p.anchor_gap = target(images[g.anchor_x] - images[g.anchor_y]) - g.target_distance;
  for (std::size_t i = 0; i < images.size() && p.injective; ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (target(images[i] - images[j]) <= kInjectivityTol) {
        p.injective = false;
        break;
      }
    }
  }
  p.images = std::move(images);
  return p;
}

VerifyReport enumerate_graph(const ConstraintGraph& g, const Norm2& target,
                             const EnumerateOptions& options) {
  if (g.vertex_count == 0) throw PreconditionError("empty constraint graph");
  const std::vector<Step> plan = make_plan(g);
  const std::vector<double> dirs = first_directions(target, options.direction_grid);
  auto parts = parallel_map(
      dirs.size(),
      [&](std::size_t i) {
        Enumerator e(g, target, options, plan);
        return e.run_direction(dirs[i]);
      },
      options.threads);
  VerifyReport out;
  out.mode = VerifyMode::Enumerate;
  std::size_t families = 0;
  for (auto& r : parts) {
    out.placements_found += r.placements_found;
    out.injective_found += r.injective_found;
    out.search_budget_used += r.search_budget_used;
    out.inconclusive = out.inconclusive || r.inconclusive;
    out.max_abs_gap_injective = std::max(out.max_abs_gap_injective, r.max_abs_gap_injective);
    std::move(r.violations.begin(), r.violations.end(), std::back_inserter(out.violations));
    std::move(r.non_injective_found.begin(), r.non_injective_found.end(),
              std::back_inserter(out.non_injective_found));
    for (auto& note : r.notes) {
      if (note.starts_with("one-parameter family")) {
        ++families;
      } else if (std::find(out.notes.begin(), out.notes.end(), note) == out.notes.end()) {
        out.notes.push_back(std::move(note));
      }
    }
  }
  out.notes.insert(out.notes.begin(),
                   std::to_string(dirs.size()) + " first-edge directions, " +
                       std::to_string(options.sweep_grid) + "-angle sweeps");
  if (families > 0) {
    out.notes.push_back(std::to_string(families) + " flexible one-parameter families sampled");
  }
  return out;
}

VerifyReport enumerate_placements(const WitnessSet& w, const Norm2& target,
                                  std::size_t direction_grid, double tol) {
  EnumerateOptions options;
  options.direction_grid = direction_grid;
  options.tol = tol;
  return enumerate_graph(ConstraintGraph::from_witness(w), target, options);
}

}  // namespace bq
