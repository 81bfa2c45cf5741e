#include "bq/witness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "bq/least_squares.hpp"
#include "bq/sphere.hpp"

namespace bq {

namespace {

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const noexcept {
    return std::hash<std::int64_t>()(c.first) * 1000003u ^ std::hash<std::int64_t>()(c.second);
  }
};

/// Point list with tolerance-based deduplication on a hash grid.
class PointPool {
 public:
  std::size_t insert(Vec2 p, const std::string& label) {
    if (auto hit = find(p)) return *hit;
    const std::size_t idx = points_.size();
    points_.push_back(p);
    labels_.push_back(label);
    grid_[cell(p)].push_back(idx);
    return idx;
  }

  std::optional<std::size_t> find(Vec2 p) const {
    const auto [cx, cy] = cell(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find({cx + dx, cy + dy});
        if (it == grid_.end()) continue;
        for (std::size_t idx : it->second) {
          if (euclid(points_[idx] - p) <= kDedupTol) return idx;
        }
      }
    }
    return std::nullopt;
  }

  std::vector<Vec2>& points() { return points_; }
  std::vector<std::string>& labels() { return labels_; }

 private:
  static std::pair<std::int64_t, std::int64_t> cell(Vec2 p) {
    return {static_cast<std::int64_t>(std::floor(p.x / kDedupTol)),
            static_cast<std::int64_t>(std::floor(p.y / kDedupTol))};
  }

  std::vector<Vec2> points_;
  std::vector<std::string> labels_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, CellHash>
      grid_;
};

std::int64_t round_key(double v) { return std::llround(v * 1e12); }

TraceNode make_node(std::string rule, std::optional<Rational> ratio, double distance, Vec2 x,
                    Vec2 y) {
  TraceNode node;
  node.rule = std::move(rule);
  node.ratio = ratio;
  node.distance = distance;
  node.x = x;
  node.y = y;
  return node;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::size_t TraceNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::size_t TraceNode::size() const {
  std::size_t s = 1;
  for (const auto& c : children) s += c.size();
  return s;
}

const ConfigGraph& ConfigGraph::figure5() {
  static const ConfigGraph graph = [] {
    ConfigGraph g;
    g.labels = {"x", "y", "z", "xt", "x1", "xt1", "yt", "y1", "yt1", "zx", "zy"};
    // Rows v0..v10 in the order x, y, (x+y)/2, x~, x1, x~1, y~, y1, y~1, z_x, z_y.
    g.adjacency = {{
        {0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0},
        {1, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0},
        {1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1},
        {0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1},
        {0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 0},
        {0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0},
        {1, 0, 1, 0, 1, 1, 0, 0, 0, 1, 0},
        {0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1},
        {0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0},
        {0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0},
    }};
    return g;
  }();
  return graph;
}

std::vector<std::pair<std::size_t, std::size_t>> ConfigGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < kVertices; ++i) {
    for (std::size_t j = i + 1; j < kVertices; ++j) {
      if (adjacency[i][j]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::optional<std::size_t> WitnessSet::find_label(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

std::vector<std::string> check_invariants(const WitnessSet& w, double tol) {
  std::vector<std::string> problems;
  const std::size_t n = w.points.size();
  if (w.labels.size() != n) problems.push_back("label count differs from point count");
  if (w.anchor_x >= n || w.anchor_y >= n) {
    problems.push_back("anchor index out of range");
    return problems;
  }
  const double edge_tol = tol * std::max(1.0, w.rho);
  for (const auto& [i, j] : w.edges) {
    if (i >= n || j >= n || i >= j) {
      problems.push_back("malformed edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
      continue;
    }
    const double r = std::abs(w.source_norm(w.points[i] - w.points[j]) - w.rho);
    if (r > edge_tol) {
      problems.push_back("edge (" + std::to_string(i) + "," + std::to_string(j) +
                         ") off rho by " + fmt(r));
    }
  }
  const double anchor =
      std::abs(w.source_norm(w.points[w.anchor_x] - w.points[w.anchor_y]) - w.target_distance);
  if (anchor > tol * std::max(1.0, w.target_distance)) {
    problems.push_back("anchor distance off target by " + fmt(anchor));
  }
  if (w.anchor_x == w.anchor_y && w.target_distance != 0.0) {
    problems.push_back("anchors coincide but target distance is nonzero");
  }
  // Vertices of the 11-point graph may coincide in the limit of a
  // non-strictly-convex norm; the construction notes them in the trace.
  const bool graph_vertices = w.config_graph.has_value();
  for (std::size_t i = 0; i < n && !graph_vertices; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (euclid(w.points[i] - w.points[j]) <= kDedupTol) {
        problems.push_back("points " + std::to_string(i) + " and " + std::to_string(j) +
                           " coincide");
      }
    }
  }
  if (w.approximate && !w.eps) problems.push_back("approximate set without eps");
  return problems;
}

WitnessSet dedup_and_merge(const std::vector<WitnessSet>& sets) {
  if (sets.empty()) throw PreconditionError("dedup_and_merge needs at least one set");
  const WitnessSet& first = sets.front();
  PointPool pool;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  WitnessSet out;
  out.source_norm = first.source_norm;
  out.rho = first.rho;
  out.trace = make_node("union", first.trace.ratio, first.target_distance,
                        first.points.at(first.anchor_x), first.points.at(first.anchor_y));
  for (const WitnessSet& s : sets) {
    if (std::abs(s.rho - first.rho) > 1e-15 * first.rho) {
      throw PreconditionError("cannot merge witness sets with conflicting rho");
    }
    if (s.source_norm.describe() != first.source_norm.describe()) {
      throw PreconditionError("cannot merge witness sets over different source norms");
    }
    std::vector<std::size_t> remap(s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      remap[i] = pool.insert(s.points[i], s.labels.at(i));
    }
    for (const auto& [i, j] : s.edges) {
      const std::size_t a = remap[i];
      const std::size_t b = remap[j];
      if (a != b) edges.insert(std::minmax(a, b));
    }
    out.trace.children.push_back(s.trace);
  }
  out.points = std::move(pool.points());
  out.labels = std::move(pool.labels());
  out.edges.assign(edges.begin(), edges.end());
  // The first set's points were inserted first, so its indices are unchanged.
  out.anchor_x = first.anchor_x;
  out.anchor_y = first.anchor_y;
  out.target_distance = first.target_distance;
  out.approximate = first.approximate;
  out.eps = first.eps;
  out.config_graph = first.config_graph;
  return out;
}

WitnessBuilder::WitnessBuilder(Norm2 source, double rho, BuildOptions options)
    : source_(std::move(source)), rho_(rho), options_(options) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("rho must be positive");
}

void WitnessBuilder::require_distance(Vec2 x, Vec2 y, double expected, const char* rule) const {
  const double got = source_(x - y);
  if (std::abs(got - expected) > options_.tol * std::max(1.0, expected)) {
    throw PreconditionError(std::string(rule) + ": endpoints are at distance " + fmt(got) +
                            ", expected " + fmt(expected));
  }
}

WitnessSet WitnessBuilder::finish(std::vector<WitnessSet> parts, Vec2 x, Vec2 y, TraceNode node,
                                  const std::vector<std::pair<Vec2, std::string>>& names) {
  // Seed the union with the anchors so they take indices 0 and 1.
  WitnessSet seed;
  seed.source_norm = source_;
  seed.rho = rho_;
  seed.points = {x};
  seed.labels = {"x"};
  if (euclid(x - y) > kDedupTol) {
    seed.points.push_back(y);
    seed.labels.push_back("y");
    seed.anchor_y = 1;
  }
  parts.insert(parts.begin(), std::move(seed));
  WitnessSet out = dedup_and_merge(parts);
  for (const auto& [p, name] : names) {
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      if (euclid(out.points[i] - p) <= kDedupTol) {
        out.labels[i] = name;
        break;
      }
    }
  }
  out.target_distance = node.distance;
  node.children = std::move(out.trace.children);
  node.children.erase(node.children.begin());  // the seed's empty trace
  out.trace = std::move(node);
  return out;
}

WitnessSet WitnessBuilder::base_pair(Vec2 x, Vec2 y) {
  const double dist = source_(x - y);
  WitnessSet w;
  w.source_norm = source_;
  w.rho = rho_;
  if (dist <= options_.tol) {
    w.points = {x};
    w.labels = {"x"};
    w.trace = make_node("base", Rational(0), 0.0, x, y);
    return w;
  }
  require_distance(x, y, rho_, "base");
  w.points = {x, y};
  w.labels = {"x", "y"};
  w.edges = {{0, 1}};
  w.anchor_y = 1;
  w.target_distance = rho_;
  w.trace = make_node("base", Rational(1), rho_, x, y);
  return w;
}

WitnessSet WitnessBuilder::double_set(Vec2 x, Vec2 y, Rational d) {
  const double len = d.value() * rho_;
  require_distance(x, y, 2.0 * len, "fig1");
  const Vec2 z = 0.5 * (x + y);
  const Vec2 y1 = sphere_intersect(source_, x, len, z, len, Side::Positive, options_.tol).point;
  const Vec2 x1 = y1 + (z - x);
  std::vector<WitnessSet> parts;
  const std::array<std::pair<Vec2, Vec2>, 7> pairs{
      {{x, z}, {z, y}, {y1, x1}, {x, y1}, {z, x1}, {z, y1}, {y, x1}}};
  for (const auto& [a, b] : pairs) {
    parts.push_back(build_at_depth(a, b, d, depth_ + 1));
  }
  const Rational ratio = d * Rational(2);
  return finish(std::move(parts), x, y, make_node("fig1", ratio, ratio.value() * rho_, x, y),
                {{z, "z"}, {y1, "y1"}, {x1, "x1"}, {x, "x"}, {y, "y"}});
}

WitnessSet WitnessBuilder::multiply_set(Vec2 x, Vec2 y, std::int64_t k, Rational d) {
  if (k < 1) throw PreconditionError("fig2: multiplier must be positive");
  if (k == 1) return build_at_depth(x, y, d, depth_ + 1);
  const double len = d.value() * rho_;
  require_distance(x, y, static_cast<double>(k) * len, "fig2");
  std::vector<Vec2> chain(static_cast<std::size_t>(k) + 1);
  std::vector<std::pair<Vec2, std::string>> names;
  for (std::int64_t i = 0; i <= k; ++i) {
    chain[i] = i == k ? y : x + (static_cast<double>(i) / static_cast<double>(k)) * (y - x);
    if (i > 0 && i < k) names.emplace_back(chain[i], "w" + std::to_string(i));
  }
  names.emplace_back(x, "x");
  names.emplace_back(y, "y");
  std::vector<WitnessSet> parts;
  for (std::int64_t i = 0; i < k; ++i) parts.push_back(build_at_depth(chain[i], chain[i + 1], d, depth_ + 1));
  for (std::int64_t i = 0; i + 2 <= k; ++i) {
    const int saved = depth_;
    ++depth_;
    parts.push_back(double_set(chain[i], chain[i + 2], d));
    depth_ = saved;
  }
  const Rational ratio = d * Rational(k);
  return finish(std::move(parts), x, y, make_node("fig2", ratio, ratio.value() * rho_, x, y),
                names);
}

WitnessSet WitnessBuilder::divide_set(Vec2 x, Vec2 y, std::int64_t k, Rational d) {
  if (k < 1) throw PreconditionError("fig3: divisor must be positive");
  if (k == 1) return build_at_depth(x, y, d, depth_ + 1);
  const double len = d.value() * rho_;
  require_distance(x, y, len / static_cast<double>(k), "fig3");
  Vec2 z;
  try {
    z = sphere_intersect(source_, x, len, y, len, Side::Positive, options_.tol).point;
  } catch (const std::exception& e) {
    throw BuildError(std::string("fig3: no apex at distance d from both endpoints: ") + e.what());
  }
  const double km1 = static_cast<double>(k - 1);
  const Vec2 xt = x + km1 * (x - z);
  const Vec2 yt = y + km1 * (y - z);
  const Rational dk = d * Rational(k);
  const Rational dkm1 = d * Rational(k - 1);
  std::vector<WitnessSet> parts;
  parts.push_back(build_at_depth(xt, yt, d, depth_ + 1));
  parts.push_back(build_at_depth(xt, x, dkm1, depth_ + 1));
  parts.push_back(build_at_depth(yt, y, dkm1, depth_ + 1));
  parts.push_back(build_at_depth(x, z, d, depth_ + 1));
  parts.push_back(build_at_depth(y, z, d, depth_ + 1));
  parts.push_back(build_at_depth(xt, z, dk, depth_ + 1));
  parts.push_back(build_at_depth(yt, z, dk, depth_ + 1));
  const Rational ratio = d / k;
  return finish(std::move(parts), x, y, make_node("fig3", ratio, ratio.value() * rho_, x, y),
                {{z, "z"}, {xt, "xt"}, {yt, "yt"}, {x, "x"}, {y, "y"}});
}

WitnessSet WitnessBuilder::build(Vec2 x, Vec2 y, Rational q) { return build_at_depth(x, y, q, 0); }

WitnessSet WitnessBuilder::build_at_depth(Vec2 x, Vec2 y, Rational q, int depth) {
  if (depth > options_.max_depth) {
    throw BuildError("recursion depth cap exceeded while building " + q.str());
  }
  const MemoKey key{q.num(), q.den(), round_key(x.x), round_key(x.y), round_key(y.x),
                    round_key(y.y)};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const int saved = depth_;
  depth_ = depth;
  WitnessSet out;
  const std::int64_t m = q.num();
  const std::int64_t n = q.den();
  if (m == 0 || q == Rational(1)) {
    out = base_pair(x, y);
  } else if (n == 1) {
    out = m == 2 ? double_set(x, y, Rational(1)) : multiply_set(x, y, m, Rational(1));
  } else if (m == 1) {
    out = divide_set(x, y, n, Rational(1));
  } else {
    // Multiples of rho/n, each unit sub-segment obtained by division of rho.
    out = m == 2 ? double_set(x, y, Rational(1, n)) : multiply_set(x, y, m, Rational(1, n));
  }
  depth_ = saved;
  memo_.emplace(key, out);
  return out;
}

WitnessSet build_rational(Vec2 x, Vec2 y, Rational q, double rho, const Norm2& source_norm) {
  WitnessBuilder builder(source_norm, rho);
  return builder.build(x, y, q);
}

ApproxChoice choose_approximation(double distance, double eps, double rho) {
  if (!(eps > 0.0)) throw PreconditionError("approximation bound eps must be positive");
  const double ratio = distance / rho;
  const auto big_n = static_cast<std::int64_t>(std::ceil(2.0 * rho / eps - 1e-12));
  const Rational r(1, std::max<std::int64_t>(big_n, 1));
  const double rv = r.value();
  for (const Rational& c : convergents(ratio, r.den())) {
    const double cv = c.value();
    if (cv > 0.0 && std::abs(cv - ratio) <= rv && rv <= cv + ratio) return {c, r};
  }
  // Only reached when the distance is below r: step out by r and come back.
  return {r, r};
}

WitnessSet approx_set(Vec2 x, Vec2 y, double eps, double rho, const Norm2& source_norm) {
  if (!(eps > 0.0)) throw PreconditionError("approx_set requires eps > 0");
  WitnessBuilder builder(source_norm, rho);
  const double dist = source_norm(x - y);
  WitnessSet out;
  if (dist <= kConstructionTol) {
    out = builder.base_pair(x, x);
    out.trace = make_node("fig4", std::nullopt, 0.0, x, y);
  } else {
    const ApproxChoice choice = choose_approximation(dist, eps, rho);
    const Vec2 z = sphere_intersect(source_norm, x, choice.q.value() * rho, y,
                                    choice.r.value() * rho, Side::Positive)
                       .point;
    std::vector<WitnessSet> parts;
    parts.push_back(builder.build(x, z, choice.q));
    parts.push_back(builder.build(z, y, choice.r));
    WitnessSet seed;
    seed.source_norm = source_norm;
    seed.rho = rho;
    seed.points = {x, y};
    seed.labels = {"x", "y"};
    seed.anchor_y = 1;
    parts.insert(parts.begin(), std::move(seed));
    out = dedup_and_merge(parts);
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      if (euclid(out.points[i] - z) <= kDedupTol) out.labels[i] = "z";
    }
    TraceNode node = make_node("fig4", std::nullopt, dist, x, y);
    node.children.assign(out.trace.children.begin() + 1, out.trace.children.end());
    node.notes = {"q=" + choice.q.str(), "r=" + choice.r.str()};
    out.trace = std::move(node);
  }
  out.target_distance = dist;
  out.approximate = true;
  out.eps = eps;
  out.trace.eps = eps;
  return out;
}

namespace {

std::array<Vec2, ConfigGraph::kVertices> figure5_points(Vec2 x, Vec2 y, const Norm2& n, double d,
                                                        double tol) {
  const Vec2 z = 0.5 * (x + y);
  const Vec2 y1 = sphere_intersect(n, x, d, z, d, Side::Positive, tol).point;
  const Vec2 x1 = y1 + (z - x);

  const OrientedFrame fx = make_frame(n, z - x, y1 - x, 10 * tol);
  const SecondPair px = find_second_pair(fx, n);
  const Vec2 xt = x + fx.a + fx.b - px.a - px.b;

  const OrientedFrame fy = make_frame(n, z - y, x1 - y, 10 * tol);
  const SecondPair py = find_second_pair(fy, n);
  const Vec2 yt = y + fy.a + fy.b - py.a - py.b;

  // x, y, z, x~, x1, x~1, y~, y1, y~1, z_x, z_y
  return {x, y, z, xt, x1, yt + py.b, yt, y1, xt + px.b, yt + py.a, xt + px.a};
}

}  // namespace

WitnessSet figure5_config(Vec2 x, Vec2 y, const Norm2& source_norm,
                          const Figure5Options& options) {
  if (euclid(x - y) <= kDedupTol) throw PreconditionError("fig5 requires x != y");
  const double d = 0.5 * source_norm(x - y);
  const ConfigGraph& graph = ConfigGraph::figure5();
  const auto edge_list = graph.edges();
  auto constraints_for = [&](double len) {
    std::vector<DistanceConstraint> out;
    for (const auto& [i, j] : edge_list) out.push_back({i, j, len});
    return out;
  };
  const std::vector<DistanceConstraint> constraints = constraints_for(d);
  const std::array<std::size_t, 3> fixed{0, 1, 2};
  PolishOptions polish_opts;
  polish_opts.residual_tol = 1e-15 * std::max(1.0, d);

  std::vector<std::string> notes;
  std::vector<Vec2> pts;
  if (source_norm.claims_strictly_convex()) {
    const auto raw = figure5_points(x, y, source_norm, d, options.tol);
    pts.assign(raw.begin(), raw.end());
    pts = polish_placement(source_norm, pts, constraints, fixed, polish_opts).points;
  } else {
    if (options.continuation.empty()) {
      throw PreconditionError("fig5 over a non-strictly-convex norm needs a continuation schedule");
    }
    // Each blended norm has its own half distance; x, y and z stay put.
    const Norm2 first = strictify(source_norm, options.continuation.front());
    const auto raw = figure5_points(x, y, first, 0.5 * first(x - y), options.tol);
    pts.assign(raw.begin(), raw.end());
    for (double lambda : options.continuation) {
      const Norm2 blended = strictify(source_norm, lambda);
      pts = polish_placement(blended, pts, constraints_for(0.5 * blended(x - y)), fixed,
                             polish_opts)
                .points;
      notes.push_back("continuation lambda=" + fmt(lambda) +
                      " residual=" + fmt(max_residual(source_norm, pts, constraints)));
    }
    pts = polish_placement(source_norm, pts, constraints, fixed, polish_opts).points;
    notes.push_back("final polish residual=" + fmt(max_residual(source_norm, pts, constraints)));
  }

  const double residual = max_residual(source_norm, pts, constraints);
  if (residual > options.tol * std::max(1.0, d)) {
    throw ConvergenceError("fig5: edge residual " + fmt(residual) + " above tolerance", residual);
  }

  WitnessSet w;
  w.source_norm = source_norm;
  w.rho = d;
  w.points = pts;
  w.labels.assign(graph.labels.begin(), graph.labels.end());
  w.edges.assign(edge_list.begin(), edge_list.end());
  w.anchor_x = 0;
  w.anchor_y = 1;
  w.target_distance = 2.0 * d;
  w.config_graph = graph;
  w.trace = make_node("fig5", Rational(2), 2.0 * d, x, y);
  for (const auto& [i, j] : edge_list) {
    w.trace.children.push_back(make_node("base", Rational(1), d, pts[i], pts[j]));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (euclid(pts[i] - pts[j]) <= kDedupTol) {
        notes.push_back("coincident vertices " + graph.labels[i] + "=" + graph.labels[j]);
        continue;
      }
      if (graph.adjacency[i][j]) continue;
      if (std::abs(source_norm(pts[i] - pts[j]) - d) <= options.tol * std::max(1.0, d)) {
        notes.push_back("extra d-pair " + graph.labels[i] + "-" + graph.labels[j]);
      }
    }
  }
  w.trace.notes = std::move(notes);
  return w;
}

}  // namespace bq
