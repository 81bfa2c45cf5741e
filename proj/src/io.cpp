#include "bq/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace bq {

using nlohmann::json;

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError("expected a coordinate pair [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field \"") + key + "\"");
  return *it;
}

double real_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw SchemaError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::size_t index_field(const json& v, std::size_t bound, const char* what) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw SchemaError(std::string(what) + " must be a nonnegative integer");
  }
  const auto i = v.get<std::size_t>();
  if (i >= bound) throw SchemaError(std::string(what) + " out of range");
  return i;
}

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json trace_to_json(const TraceNode& t) {
  json j;
  j["rule"] = t.rule;
  j["ratio"] = t.ratio ? json(t.ratio->str()) : json(nullptr);
  j["distance"] = t.distance;
  j["x"] = vec_json(t.x);
  j["y"] = vec_json(t.y);
  j["eps"] = optional_real(t.eps);
  j["notes"] = t.notes;
  j["children"] = json::array();
  for (const auto& c : t.children) j["children"].push_back(trace_to_json(c));
  return j;
}

TraceNode trace_from_json(const json& j) {
  TraceNode t;
  const json& rule = field(j, "rule");
  if (!rule.is_string()) throw SchemaError("trace rule must be a string");
  t.rule = rule.get<std::string>();
  const json& ratio = field(j, "ratio");
  if (!ratio.is_null()) {
    if (!ratio.is_string()) throw SchemaError("trace ratio must be \"m/n\" or null");
    t.ratio = Rational::parse(ratio.get<std::string>());
  }
  t.distance = real_field(j, "distance");
  t.x = vec_from(field(j, "x"));
  t.y = vec_from(field(j, "y"));
  if (const json& e = field(j, "eps"); !e.is_null()) t.eps = real_field(j, "eps");
  for (const auto& n : field(j, "notes")) t.notes.push_back(n.get<std::string>());
  for (const auto& c : field(j, "children")) t.children.push_back(trace_from_json(c));
  return t;
}

json placement_to_json(const Placement& p) {
  json images = json::array();
  for (Vec2 v : p.images) images.push_back(vec_json(v));
  return {{"images", images},
          {"max_edge_residual", p.max_edge_residual},
          {"anchor_gap", p.anchor_gap},
          {"injective", p.injective}};
}

Placement placement_from_json(const json& j) {
  Placement p;
  for (const auto& v : field(j, "images")) p.images.push_back(vec_from(v));
  p.max_edge_residual = real_field(j, "max_edge_residual");
  p.anchor_gap = real_field(j, "anchor_gap");
  p.injective = field(j, "injective").get<bool>();
  return p;
}

}  // namespace

json norm_to_json(const Norm2& n) {
  switch (n.kind()) {
    case Norm2::Kind::PNorm:
      return {{"kind", "p"}, {"p", std::isinf(n.p()) ? json("inf") : json(n.p())}};
    case Norm2::Kind::Polygonal: {
      json verts = json::array();
      for (Vec2 v : n.vertices()) verts.push_back(vec_json(v));
      return {{"kind", "polygonal"}, {"vertices", verts}};
    }
    case Norm2::Kind::Blend:
      return {{"kind", "blend"}, {"base", norm_to_json(n.base())}, {"lambda", n.lambda()}};
  }
  throw SchemaError("unknown norm kind");
}

Norm2 construct_norm(const json& d) {
  const json& kind = field(d, "kind");
  if (!kind.is_string()) throw SchemaError("norm kind must be a string");
  const auto k = kind.get<std::string>();
  if (k == "p") {
    const json& p = field(d, "p");
    if (p.is_string()) {
      if (p.get<std::string>() != "inf") throw SchemaError("p must be a number or \"inf\"");
      return Norm2::p_norm(std::numeric_limits<double>::infinity());
    }
    return Norm2::p_norm(real_field(d, "p"));
  }
  if (k == "polygonal") {
    std::vector<Vec2> verts;
    const json& vs = field(d, "vertices");
    if (!vs.is_array()) throw SchemaError("polygon vertices must be an array");
    for (const auto& v : vs) verts.push_back(vec_from(v));
    return Norm2::polygonal(std::move(verts));
  }
  if (k == "blend") {
    return Norm2::blend(construct_norm(field(d, "base")), real_field(d, "lambda"));
  }
  throw SchemaError("unknown norm kind \"" + k + "\"");
}

Norm2 parse_norm_flag(std::string_view flag) {
  if (flag.starts_with("p:")) {
    const std::string value(flag.substr(2));
    if (value == "inf") return Norm2::p_norm(std::numeric_limits<double>::infinity());
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw PreconditionError("bad p-norm exponent in \"" + std::string(flag) + "\"");
    }
    return Norm2::p_norm(p);
  }
  if (flag.starts_with("poly:@")) {
    const json doc = load_json_file(std::string(flag.substr(6)));
    if (doc.is_array()) return construct_norm({{"kind", "polygonal"}, {"vertices", doc}});
    return construct_norm(doc);
  }
  if (flag.starts_with("blend:")) {
    const std::string_view rest = flag.substr(6);
    const auto comma = rest.rfind(',');
    if (comma == std::string_view::npos) {
      throw PreconditionError("blend needs the form blend:<norm>,<lambda>");
    }
    const std::string lam(rest.substr(comma + 1));
    std::size_t used = 0;
    double lambda = 0.0;
    try {
      lambda = std::stod(lam, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != lam.size()) throw PreconditionError("bad blend weight \"" + lam + "\"");
    return Norm2::blend(parse_norm_flag(rest.substr(0, comma)), lambda);
  }
  throw PreconditionError("unknown norm \"" + std::string(flag) + "\"");
}

json witness_to_json(const WitnessSet& w) {
  json j;
  j["rho"] = w.rho;
  j["source_norm"] = norm_to_json(w.source_norm);
  j["points"] = json::array();
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    j["points"].push_back({{"id", i}, {"label", w.labels[i]}, {"xy", vec_json(w.points[i])}});
  }
  j["edges"] = json::array();
  for (const auto& [a, b] : w.edges) j["edges"].push_back({a, b});
  j["anchors"] = {{"x", w.anchor_x}, {"y", w.anchor_y}};
  j["target_distance"] = w.target_distance;
  j["approximate"] = w.approximate;
  j["eps"] = optional_real(w.eps);
  j["trace"] = trace_to_json(w.trace);
  if (w.config_graph) {
    j["config_graph"] = {{"labels", w.config_graph->labels},
                         {"adjacency", w.config_graph->adjacency}};
  }
  return j;
}

WitnessSet witness_from_json(const json& j) {
  try {
    WitnessSet w;
    if (!j.is_object()) throw SchemaError("witness set must be a JSON object");
    static const std::vector<std::string> known = {
        "rho",         "source_norm", "points", "edges", "anchors",     "target_distance",
        "approximate", "eps",         "trace",  "config_graph"};
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw SchemaError("unknown field \"" + key + "\"");
      }
    }
    w.rho = real_field(j, "rho");
    if (!(w.rho > 0.0)) throw SchemaError("rho must be positive");
    w.source_norm = construct_norm(field(j, "source_norm"));
    const json& pts = field(j, "points");
    if (!pts.is_array() || pts.empty()) throw SchemaError("points must be a nonempty array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (index_field(field(pts[i], "id"), pts.size(), "point id") != i) {
        throw SchemaError("point ids must be 0, 1, 2, ... in order");
      }
      w.labels.push_back(field(pts[i], "label").get<std::string>());
      w.points.push_back(vec_from(field(pts[i], "xy")));
    }
    for (const auto& e : field(j, "edges")) {
      if (!e.is_array() || e.size() != 2) throw SchemaError("edges must be index pairs");
      const std::size_t a = index_field(e[0], pts.size(), "edge endpoint");
      const std::size_t b = index_field(e[1], pts.size(), "edge endpoint");
      if (a >= b) throw SchemaError("edge endpoints must be increasing");
      w.edges.emplace_back(a, b);
    }
    const json& anchors = field(j, "anchors");
    w.anchor_x = index_field(field(anchors, "x"), pts.size(), "anchor x");
    w.anchor_y = index_field(field(anchors, "y"), pts.size(), "anchor y");
    w.target_distance = real_field(j, "target_distance");
    w.approximate = field(j, "approximate").get<bool>();
    if (const json& e = field(j, "eps"); !e.is_null()) w.eps = real_field(j, "eps");
    w.trace = trace_from_json(field(j, "trace"));
    if (auto it = j.find("config_graph"); it != j.end()) {
      ConfigGraph g;
      g.labels = field(*it, "labels").get<std::array<std::string, ConfigGraph::kVertices>>();
      g.adjacency = field(*it, "adjacency")
                        .get<std::array<std::array<int, ConfigGraph::kVertices>,
                                        ConfigGraph::kVertices>>();
      w.config_graph = g;
    }
    return w;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed witness set: ") + e.what());
  }
}

json report_to_json(const VerifyReport& r) {
  json j;
  j["mode"] = to_string(r.mode);
  j["placements_found"] = r.placements_found;
  j["injective_found"] = r.injective_found;
  j["violations"] = json::array();
  for (const auto& p : r.violations) j["violations"].push_back(placement_to_json(p));
  j["non_injective_found"] = json::array();
  for (const auto& p : r.non_injective_found) j["non_injective_found"].push_back(placement_to_json(p));
  j["search_budget_used"] = r.search_budget_used;
  j["inconclusive"] = r.inconclusive;
  j["max_abs_gap_injective"] = r.max_abs_gap_injective;
  j["notes"] = r.notes;
  return j;
}

VerifyReport report_from_json(const json& j) {
  try {
    VerifyReport r;
    const auto mode = field(j, "mode").get<std::string>();
    if (mode == "enumerate") {
      r.mode = VerifyMode::Enumerate;
    } else if (mode == "falsify") {
      r.mode = VerifyMode::Falsify;
    } else if (mode == "compositional") {
      r.mode = VerifyMode::Compositional;
    } else {
      throw SchemaError("unknown report mode \"" + mode + "\"");
    }
    r.placements_found = field(j, "placements_found").get<std::size_t>();
    r.injective_found = field(j, "injective_found").get<std::size_t>();
    for (const auto& p : field(j, "violations")) r.violations.push_back(placement_from_json(p));
    for (const auto& p : field(j, "non_injective_found")) {
      r.non_injective_found.push_back(placement_from_json(p));
    }
    r.search_budget_used = field(j, "search_budget_used").get<std::size_t>();
    r.inconclusive = field(j, "inconclusive").get<bool>();
    r.max_abs_gap_injective = real_field(j, "max_abs_gap_injective");
    r.notes = field(j, "notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << text;
  if (!out) throw PreconditionError("write failed for " + path.string());
}

std::string render_svg(const WitnessSet& w) {
  constexpr double kMargin = 40.0;
  constexpr double kRadius = 5.0;
  const double scale = 100.0 / w.rho;
  Vec2 lo = w.points.front();
  Vec2 hi = w.points.front();
  for (Vec2 p : w.points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double width = (hi.x - lo.x) * scale + 2 * kMargin;
  const double legend_h = 20.0 * 4;
  const double height = (hi.y - lo.y) * scale + 2 * kMargin + legend_h;
  auto sx = [&](Vec2 p) { return (p.x - lo.x) * scale + kMargin; };
  auto sy = [&](Vec2 p) { return (hi.y - p.y) * scale + kMargin; };

  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<g class=\"edges\" stroke=\"#444\" stroke-width=\"1\">\n";
  for (const auto& [i, j] : w.edges) {
    os << "<line x1=\"" << sx(w.points[i]) << "\" y1=\"" << sy(w.points[i]) << "\" x2=\""
       << sx(w.points[j]) << "\" y2=\"" << sy(w.points[j]) << "\"/>\n";
  }
  os << "</g>\n";
  const Vec2 ax = w.points[w.anchor_x];
  const Vec2 ay = w.points[w.anchor_y];
  os << "<path class=\"anchor-link\" d=\"M " << sx(ax) << ' ' << sy(ax) << " L " << sx(ay) << ' '
     << sy(ay) << "\" stroke=\"#c00\" stroke-dasharray=\"6 4\" fill=\"none\"/>\n";
  os << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    const bool is_x = i == w.anchor_x;
    const bool is_y = i == w.anchor_y;
    os << "<circle cx=\"" << sx(w.points[i]) << "\" cy=\"" << sy(w.points[i]) << "\" r=\""
       << kRadius << '"';
    if (is_x || is_y) {
      os << " class=\"anchor\" data-anchor=\"" << (is_x ? "x" : "y") << "\" fill=\"#c00\"";
    } else {
      os << " fill=\"#000\"";
    }
    os << "><title>" << i << ' ' << w.labels[i] << "</title></circle>\n";
  }
  os << "</g>\n";
  double ty = (hi.y - lo.y) * scale + 2 * kMargin;
  auto text = [&](const std::string& s) {
    os << "<text x=\"" << kMargin << "\" y=\"" << ty << "\" font-family=\"monospace\" "
       << "font-size=\"12\">" << s << "</text>\n";
    ty += 20.0;
  };
  std::ostringstream line;
  line << "rule " << w.trace.rule;
  if (w.trace.ratio) line << ", ratio " << w.trace.ratio->str();
  text(line.str());
  text(std::to_string(w.points.size()) + " points, " + std::to_string(w.edges.size()) +
       " rho-edges, trace depth " + std::to_string(w.trace.depth()));
  std::ostringstream dist;
  dist.precision(12);
  dist << "|x - y| = " << w.target_distance << ", rho = " << w.rho;
  if (w.approximate && w.eps) dist << ", approximate within " << *w.eps;
  text(dist.str());
  text("source norm " + w.source_norm.describe());
  os << "</svg>\n";
  return os.str();
}

std::vector<StatsRow> stats_table(std::int64_t max_m, std::int64_t max_n, const Norm2& source,
                                  double rho) {
  if (max_m < 1 || max_n < 1) throw PreconditionError("stats bounds must be at least 1");
  std::vector<StatsRow> rows;
  const Vec2 unit = Vec2{1.0, 0.0} / source(Vec2{1.0, 0.0});
  for (std::int64_t m = 1; m <= max_m; ++m) {
    for (std::int64_t n = 1; n <= max_n; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const Rational q(m, n);
      const WitnessSet w = build_rational({0.0, 0.0}, (q.value() * rho) * unit, q, rho, source);
      rows.push_back({q, w.points.size(), w.edges.size(), w.trace.depth()});
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const StatsRow& a, const StatsRow& b) { return a.q < b.q; });
  return rows;
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::ostringstream os;
  os << "q,points,edges,depth\n";
  for (const auto& r : rows) {
    os << r.q.str() << ',' << r.points << ',' << r.edges << ',' << r.depth << '\n';
  }
  return os.str();
}

}  // namespace bq
