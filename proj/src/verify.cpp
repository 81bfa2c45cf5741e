#include <cmath>
#include <map>
#include <sstream>

#include "bq/verify.hpp"

namespace bq {

namespace {

struct Skeleton {
  ConstraintGraph graph;
  std::string signature;
};

std::size_t intern(std::vector<Vec2>& pts, Vec2 p) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (euclid(pts[i] - p) <= kDedupTol) return i;
  }
  pts.push_back(p);
  return pts.size() - 1;
}

Skeleton skeleton_of(const TraceNode& node) {
  Skeleton sk;
  auto& g = sk.graph;
  std::vector<Vec2> pts;
  g.anchor_x = intern(pts, node.x);
  g.anchor_y = intern(pts, node.y);
  for (const auto& c : node.children) {
    const std::size_t a = intern(pts, c.x);
    const std::size_t b = intern(pts, c.y);
    if (a != b && c.distance > 0.0) g.edges.push_back({std::min(a, b), std::max(a, b), c.distance});
  }
  g.vertex_count = pts.size();
  g.target_distance = node.distance;
  g.gap_allowance = node.eps.value_or(0.0);
  g.source_points = pts;

  std::ostringstream sig;
  auto q = [](double v) { return std::llround(v * 1e9); };
  sig << node.rule << '|' << q(node.distance) << '|' << q(g.gap_allowance);
  for (Vec2 p : pts) sig << '|' << q(p.x - node.x.x) << ',' << q(p.y - node.x.y);
  for (const auto& e : g.edges) sig << '|' << e.i << '-' << e.j << ':' << q(e.length);
  sk.signature = sig.str();
  return sk;
}

struct NodeOutcome {
  double max_abs_gap = 0.0;
};

class Compositor {
 public:
  Compositor(const Norm2& target, const EnumerateOptions& options)
      : target_(target), options_(options) {
    report_.mode = VerifyMode::Compositional;
  }

  NodeOutcome visit(const TraceNode& node) {
    for (const auto& c : node.children) visit(c);
    if (node.rule == "base" || node.rule == "union" || node.children.empty()) return {};
    Skeleton sk = skeleton_of(node);
    if (sk.graph.anchor_x == sk.graph.anchor_y) return {};
    if (auto it = memo_.find(sk.signature); it != memo_.end()) return it->second;
    VerifyReport r = enumerate_graph(sk.graph, target_, options_);
    ++steps_;
    report_.placements_found += r.placements_found;
    report_.injective_found += r.injective_found;
    report_.search_budget_used += r.search_budget_used;
    if (r.inconclusive) {
      report_.inconclusive = true;
      report_.notes.push_back(node.rule + " step unresolved: " +
                              (r.notes.empty() ? std::string() : r.notes.back()));
    }
    if (r.injective_found == 0) {
      report_.notes.push_back(node.rule + " step has no injective placement");
    }
    for (auto& v : r.violations) {
      std::ostringstream os;
      os << node.rule << " step from " << node.x << " to " << node.y << " moves its anchors by "
         << v.anchor_gap;
      report_.notes.push_back(os.str());
      report_.violations.push_back(std::move(v));
    }
    NodeOutcome out{r.max_abs_gap_injective};
    memo_.emplace(std::move(sk.signature), out);
    return out;
  }

  VerifyReport finish(const NodeOutcome& root) {
    report_.max_abs_gap_injective = root.max_abs_gap;
    report_.notes.insert(report_.notes.begin(),
                         std::to_string(steps_) + " distinct construction steps enumerated");
    return std::move(report_);
  }

 private:
  const Norm2& target_;
  const EnumerateOptions& options_;
  std::map<std::string, NodeOutcome> memo_;
  std::size_t steps_ = 0;
  VerifyReport report_;
};

}  // namespace

VerifyReport enumerate_compositional(const WitnessSet& w, const Norm2& target,
                                     const EnumerateOptions& options) {
  if (!target.claims_strictly_convex()) {
    throw PreconditionError(
        "compositional verification relies on forced sub-distances and needs a strictly convex "
        "target");
  }
  Compositor c(target, options);
  const NodeOutcome root = c.visit(w.trace);
  return c.finish(root);
}

bool check_non_collapse(const WitnessSet& w, const Norm2& target, const VerifyReport& report,
                        double tol) {
  const auto x1 = w.find_label("x1");
  const auto y1 = w.find_label("y1");
  if (!x1 || !y1 || (w.trace.rule != "fig5" && w.trace.rule != "fig1")) {
    throw PreconditionError("non-collapse check needs the 11-point or the doubling configuration");
  }
  if (report.mode == VerifyMode::Compositional) {
    throw PreconditionError("non-collapse check needs a report over the witness points");
  }
  if (report.inconclusive) return false;
  auto collapses = [&](const Placement& p) {
    if (p.images.size() != w.points.size()) {
      throw PreconditionError("report does not belong to this witness set");
    }
    const auto& f = p.images;
    return target(f[w.anchor_x] - f[*x1]) <= tol || target(f[w.anchor_y] - f[*y1]) <= tol;
  };
  for (const auto& p : report.violations) {
    if (collapses(p)) return false;
  }
  for (const auto& p : report.non_injective_found) {
    if (collapses(p)) return false;
  }
  return true;
}

bool approx_gap_check(const WitnessSet& w, const Norm2& /*target*/, const VerifyReport& report,
                      double tol) {
  if (!w.approximate || !w.eps) throw PreconditionError("witness set is not approximate");
  if (report.inconclusive) return false;
  return report.violations.empty() && report.max_abs_gap_injective <= *w.eps + tol;
}

}  // namespace bq
