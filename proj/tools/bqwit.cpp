// bqwit: build and check finite witness sets for distance-preserving maps
// between normed planes.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bq/io.hpp"
#include "bq/sphere.hpp"
#include "bq/verify.hpp"
#include "bq/witness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;
constexpr int kExitInconclusive = 3;

bq::Vec2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw bq::PreconditionError("expected a point as x,y: " + text);
  std::size_t ua = 0;
  std::size_t ub = 0;
  const std::string a = text.substr(0, comma);
  const std::string b = text.substr(comma + 1);
  double x = 0.0;
  double y = 0.0;
  try {
    x = std::stod(a, &ua);
    y = std::stod(b, &ub);
  } catch (const std::exception&) {
    throw bq::PreconditionError("expected a point as x,y: " + text);
  }
  if (ua != a.size() || ub != b.size()) throw bq::PreconditionError("expected a point as x,y: " + text);
  return {x, y};
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BQWIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw bq::PreconditionError(std::string("BQWIT_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

/// Point at norm distance `dist` from x along the positive x-axis.
bq::Vec2 along_axis(const bq::Norm2& n, bq::Vec2 x, double dist) {
  return x + (dist / n(bq::Vec2{1.0, 0.0})) * bq::Vec2{1.0, 0.0};
}

void emit(const bq::WitnessSet& w, const std::string& out, const std::string& svg) {
  const std::string text = bq::dump_json(bq::witness_to_json(w));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    bq::write_text_file(out, text);
  }
  if (!svg.empty()) bq::write_text_file(svg, bq::render_svg(w));
}

struct BuildArgs {
  std::string q;
  std::optional<double> eps;
  double rho = 1.0;
  std::string source = "p:2";
  std::string x = "0,0";
  std::string y;
  std::string out;
  std::string svg;
};

int cmd_build(const BuildArgs& a) {
  if (a.q.empty() == !a.eps.has_value()) throw bq::PreconditionError("give exactly one of --q and --eps");
  const bq::Norm2 source = bq::parse_norm_flag(a.source);
  const bq::Vec2 x = parse_point(a.x);
  bq::WitnessSet w;
  if (!a.q.empty()) {
    const bq::Rational q = bq::Rational::parse(a.q);
    const bq::Vec2 y = a.y.empty() ? along_axis(source, x, q.value() * a.rho) : parse_point(a.y);
    w = bq::build_rational(x, y, q, a.rho, source);
  } else {
    if (a.y.empty()) throw bq::PreconditionError("--eps needs --y");
    w = bq::approx_set(x, parse_point(a.y), *a.eps, a.rho, source);
  }
  emit(w, a.out, a.svg);
  std::cerr << w.points.size() << " points, " << w.edges.size() << " edges\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string in;
  std::string target = "p:2";
  std::string mode = "enumerate";
  std::size_t restarts = 1000;
  std::optional<std::uint64_t> seed;
  double tol = bq::kVerificationTol;
  std::size_t grid = 720;
  bool allow_non_injective = false;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const bq::WitnessSet w = bq::witness_from_json(bq::load_json_file(a.in));
  if (auto problems = bq::check_invariants(w); !problems.empty()) {
    throw bq::SchemaError("witness set fails its invariants: " + problems.front());
  }
  const bq::Norm2 target = bq::parse_norm_flag(a.target);
  bq::VerifyReport report;
  if (a.mode == "enumerate") {
    report = bq::enumerate_placements(w, target, a.grid, a.tol);
  } else if (a.mode == "compositional") {
    bq::EnumerateOptions opts;
    opts.direction_grid = a.grid;
    opts.tol = a.tol;
    report = bq::enumerate_compositional(w, target, opts);
  } else {
    report = bq::falsify(w, target, a.restarts, a.seed.value_or(default_seed()), a.tol,
                         !a.allow_non_injective);
  }
  const std::string text = bq::dump_json(bq::report_to_json(report));
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    bq::write_text_file(a.out, text);
  }
  std::size_t bad = report.violations.size();
  if (a.allow_non_injective && report.mode != bq::VerifyMode::Falsify) {
    const double allowance = (w.approximate && w.eps ? *w.eps : 0.0) + 10.0 * a.tol;
    for (const auto& p : report.non_injective_found) {
      if (std::abs(p.anchor_gap) > allowance) ++bad;
    }
  }
  std::cerr << report.placements_found << " consistent placements, " << bad << " violations"
            << (report.inconclusive ? ", inconclusive" : "") << '\n';
  if (bad > 0) return kExitViolation;
  if (report.inconclusive) return kExitInconclusive;
  return kExitOk;
}

struct Figure5Args {
  std::string source = "p:2";
  double d = 1.0;
  std::string x = "0,0";
  std::string out;
  std::string svg;
};

int cmd_figure5(const Figure5Args& a) {
  if (!(a.d > 0.0)) throw bq::PreconditionError("--d must be positive");
  const bq::Norm2 source = bq::parse_norm_flag(a.source);
  const bq::Vec2 x = parse_point(a.x);
  const bq::WitnessSet w = bq::figure5_config(x, along_axis(source, x, 2.0 * a.d), source);
  emit(w, a.out, a.svg);
  std::vector<bq::DistanceConstraint> cons;
  for (const auto& [i, j] : w.edges) cons.push_back({i, j, w.rho});
  for (const auto& note : w.trace.notes) std::cerr << note << '\n';
  std::cerr << w.points.size() << " points, " << w.edges.size()
            << " edges, max edge residual " << bq::max_residual(source, w.points, cons) << '\n';
  return kExitOk;
}

struct StatsArgs {
  std::int64_t max_m = 4;
  std::int64_t max_n = 4;
  std::string source = "p:2";
  double rho = 1.0;
  std::string out;
};

int cmd_stats(const StatsArgs& a) {
  const std::string csv =
      bq::stats_csv(bq::stats_table(a.max_m, a.max_n, bq::parse_norm_flag(a.source), a.rho));
  if (a.out.empty() || a.out == "-") {
    std::cout << csv;
  } else {
    bq::write_text_file(a.out, csv);
  }
  return kExitOk;
}

struct EquilateralArgs {
  std::string target = "p:2";
  double d = 1.0;
  std::size_t n = 4;
  std::size_t restarts = 10000;
  std::optional<std::uint64_t> seed;
};

int cmd_equilateral(const EquilateralArgs& a) {
  const bq::Norm2 target = bq::parse_norm_flag(a.target);
  const auto r =
      bq::equilateral_search(target, a.d, a.n, a.restarts, a.seed.value_or(default_seed()));
  nlohmann::json j;
  j["target_norm"] = bq::norm_to_json(target);
  j["d"] = a.d;
  j["n_points"] = a.n;
  j["best_residual"] = r.best_residual;
  j["best_points"] = nlohmann::json::array();
  for (bq::Vec2 p : r.best_points) j["best_points"].push_back({p.x, p.y});
  std::cout << bq::dump_json(j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Witness sets for maps that preserve one distance between normed planes"};
  app.require_subcommand(1);
  int code = kExitOk;

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build an exact or approximate witness set");
  b->add_option("--q", build.q, "Distance ratio m/n to force");
  b->add_option("--eps", build.eps, "Approximation bound (needs --y)");
  b->add_option("--rho", build.rho, "Preserved distance")->check(CLI::PositiveNumber);
  b->add_option("--source-norm", build.source, "p:2, p:inf, poly:@file, blend:<norm>,<lambda>");
  b->add_option("--x", build.x, "Anchor x as x,y");
  b->add_option("--y", build.y, "Anchor y as x,y (default: on the x-axis at q*rho)");
  b->add_option("--out", build.out, "Output JSON (default stdout)");
  b->add_option("--svg", build.svg, "Also write an SVG drawing");
  b->callback([&] { code = cmd_build(build); });

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a witness set against a target norm");
  v->add_option("--in", verify.in, "Witness set JSON")->required();
  v->add_option("--target-norm", verify.target, "Target norm");
  v->add_option("--mode", verify.mode, "enumerate, falsify or compositional")
      ->check(CLI::IsMember({"enumerate", "falsify", "compositional"}));
  v->add_option("--restarts", verify.restarts, "Falsification restarts")->check(CLI::PositiveNumber);
  v->add_option("--seed", verify.seed, "Random seed (default $BQWIT_SEED or 0)");
  v->add_option("--tol", verify.tol, "Edge tolerance")->check(CLI::PositiveNumber);
  v->add_option("--grid", verify.grid, "Direction grid on the full circle")->check(CLI::PositiveNumber);
  v->add_flag("--allow-non-injective", verify.allow_non_injective,
              "Count non-injective placements as counterexamples too");
  v->add_option("--out", verify.out, "Report JSON (default stdout)");
  v->callback([&] { code = cmd_verify(verify); });

  Figure5Args fig5;
  auto* f = app.add_subcommand("figure5", "Build the 11-point doubling configuration");
  f->add_option("--source-norm", fig5.source, "Source norm");
  f->add_option("--d", fig5.d, "Edge length");
  f->add_option("--x", fig5.x, "Anchor x as x,y");
  f->add_option("--out", fig5.out, "Output JSON (default stdout)");
  f->add_option("--svg", fig5.svg, "Also write an SVG drawing");
  f->callback([&] { code = cmd_figure5(fig5); });

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Witness set sizes for q = m/n");
  s->add_option("--max-m", stats.max_m, "Largest numerator")->check(CLI::PositiveNumber);
  s->add_option("--max-n", stats.max_n, "Largest denominator")->check(CLI::PositiveNumber);
  s->add_option("--source-norm", stats.source, "Source norm");
  s->add_option("--rho", stats.rho, "Preserved distance")->check(CLI::PositiveNumber);
  s->add_option("--out", stats.out, "Output CSV (default stdout)");
  s->callback([&] { code = cmd_stats(stats); });

  EquilateralArgs eq;
  auto* e = app.add_subcommand("equilateral4", "Search for pairwise equidistant points");
  e->add_option("--target-norm", eq.target, "Target norm");
  e->add_option("--d", eq.d, "Common distance")->check(CLI::PositiveNumber);
  e->add_option("--n", eq.n, "Number of points")->check(CLI::Range(3, 64));
  e->add_option("--restarts", eq.restarts, "Random restarts")->check(CLI::PositiveNumber);
  e->add_option("--seed", eq.seed, "Random seed (default $BQWIT_SEED or 0)");
  e->callback([&] { code = cmd_equilateral(eq); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitError;
  } catch (const bq::BudgetExceededError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInconclusive;
  } catch (const bq::ConvergenceError& err) {
    std::cerr << "error: " << err.what() << " (best residual " << err.best_residual() << ")\n";
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitError;
  }
  return code;
}
