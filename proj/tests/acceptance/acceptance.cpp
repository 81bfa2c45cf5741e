// Acceptance criteria 1-9: one PASS/FAIL line per criterion, with timings.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "bq/io.hpp"
#include "bq/sphere.hpp"
#include "bq/verify.hpp"
#include "bq/witness.hpp"

namespace {

using namespace bq;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

WitnessSet euclid_set(const std::string& q) {
  const Rational r = Rational::parse(q);
  return build_rational({0, 0}, {r.value(), 0}, r, 1.0, Norm2::euclidean());
}

void ac1(Outcome& o) {
  for (const char* q : {"1", "2", "3", "1/2", "1/3", "2/3", "3/2", "5/4"}) {
    const WitnessSet w = euclid_set(q);
    const auto problems = check_invariants(w, 1e-9);
    o.require(problems.empty(), std::string("q=") + q + ": " + (problems.empty() ? "" : problems[0]));
    o.detail << ' ' << q << ":" << w.points.size();
  }
}

void ac2(Outcome& o) {
  for (const char* q : {"1", "2", "1/2"}) {
    const VerifyReport r = enumerate_placements(euclid_set(q), Norm2::euclidean());
    o.require(r.injective_found >= 1, std::string("no injective placement for q=") + q);
    o.require(r.max_abs_gap_injective <= 1e-6, std::string("gap too large for q=") + q);
    o.require(r.violations.empty() && !r.inconclusive, std::string("unresolved q=") + q);
    o.detail << ' ' << q << ": " << r.injective_found << "/" << r.placements_found
             << " injective, max|gap| " << r.max_abs_gap_injective << ';';
  }
}

void ac3(Outcome& o) {
  const WitnessSet w = euclid_set("2");
  const VerifyReport r = enumerate_placements(w, Norm2::euclidean());
  bool found = false;
  for (const auto& p : r.non_injective_found) {
    const double dist = euclid(p.images[w.anchor_x] - p.images[w.anchor_y]);
    if (p.max_edge_residual <= 1e-6 && std::abs(dist - 1.0) <= 1e-6) found = true;
  }
  o.require(found, "no collapsed placement with anchor distance 1");
  o.detail << ' ' << r.placements_found << " leaves, " << r.non_injective_found.size()
           << " non-injective";
}

void ac4(Outcome& o) {
  const WitnessSet w = euclid_set("2");
  const VerifyReport linf = falsify(w, Norm2::p_norm(kInf), 1000, 7);
  std::size_t big = 0;
  for (const auto& v : linf.violations) {
    if (v.injective && std::abs(v.anchor_gap) > 1e-2) ++big;
  }
  o.require(big >= 1, "no injective max-norm violation");
  o.detail << " p=inf: " << big << " violations;";
  for (double p : {1.5, 2.0, 3.0}) {
    const VerifyReport r = falsify(w, Norm2::p_norm(p), 1000, 7);
    o.require(r.violations.empty(), "violation for p=" + std::to_string(p));
    o.detail << " p=" << p << ": " << r.violations.size() << ';';
  }
}

void ac5(Outcome& o) {
  double worst_odd = 0.0, worst_ga = 0.0, worst_pair = 0.0, min_gma = kInf;
  bool h_exact = true;
  for (double p : {1.5, 2.0, 3.0}) {
    const Norm2 n = Norm2::p_norm(p);
    std::mt19937_64 rng(static_cast<std::uint64_t>(p * 1000));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int i = 0; i < 10; ++i) {
      const OrientedFrame f =
          frame_from_angle(n, 1.0, angle(rng), i % 2 ? Side::Negative : Side::Positive);
      h_exact = h_exact && h_map(f, n, f.a) == f.b;
      for (int k = 0; k < 10; ++k) {
        const Vec2 u = sphere_point(n, 1.0, angle(rng));
        worst_odd = std::max(worst_odd, n(h_map(f, n, -u) + h_map(f, n, u)));
      }
      worst_ga = std::max(worst_ga, pair_sum_gap(f, n, f.a));
      min_gma = std::min(min_gma, pair_sum_gap(f, n, -f.a));
      const SecondPair sp = find_second_pair(f, n);
      for (double e : {n(sp.a) - 1.0, n(sp.b) - 1.0, n(sp.a - sp.b) - 1.0,
                       n(sp.a + sp.b - f.a - f.b) - 1.0}) {
        worst_pair = std::max(worst_pair, std::abs(e));
      }
    }
  }
  o.require(h_exact, "h(a) != b");
  o.require(worst_odd <= 1e-9, "h not odd");
  o.require(worst_ga <= 1e-9, "g(a) > 1e-9");
  o.require(min_gma >= 2.0 - 1e-6, "g(-a) < 2");
  o.require(worst_pair <= 1e-9, "second pair residual");
  const Norm2 e = Norm2::euclidean();
  const SecondPair sp = find_second_pair(make_frame(e, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}), e);
  o.require(std::abs(sp.a.x - 5.0 / 6.0) <= 1e-9, "Euclidean a~_x != 5/6");
  o.detail << " |h(-u)+h(u)| " << worst_odd << ", g(a) " << worst_ga << ", min g(-a) " << min_gma
           << ", pair residual " << worst_pair << ", a~_x-5/6 " << sp.a.x - 5.0 / 6.0;
}

void ac6(Outcome& o) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Norm2 n = Norm2::p_norm(p);
    const WitnessSet w = figure5_config({0, 0}, {2, 0}, n);
    double worst = 0.0;
    for (const auto& [i, j] : w.edges) worst = std::max(worst, std::abs(n(w.points[i] - w.points[j]) - w.rho));
    o.require(w.edges.size() == 19 && worst <= 1e-9, "edge residual for p=" + std::to_string(p));
    if (p == 2.0) {
      const ConfigGraph& g = ConfigGraph::figure5();
      bool same = true;
      for (std::size_t i = 0; i < 11; ++i) {
        for (std::size_t j = i + 1; j < 11; ++j) {
          const bool at_d = std::abs(n(w.points[i] - w.points[j]) - w.rho) <= 1e-9;
          same = same && at_d == (g.adjacency[i][j] == 1);
        }
      }
      o.require(same, "Euclidean d-pairs differ from the adjacency matrix");
    }
    const VerifyReport r = enumerate_placements(w, n, 720);
    const bool ok = check_non_collapse(w, n, r);
    o.require(ok, "collapse possible for p=" + std::to_string(p));
    o.detail << " p=" << p << ": residual " << worst << ", " << r.placements_found
             << " placements, non-collapse " << (ok ? "yes" : "no") << ';';
  }
}

void ac7(Outcome& o) {
  const auto linf = equilateral_search(Norm2::p_norm(kInf), 1.0, 4, 10000, 11);
  o.require(linf.best_residual <= 1e-9, "max norm has no 4-point equilateral set");
  o.detail << " inf: " << linf.best_residual << ';';
  for (double p : {1.5, 2.0}) {
    const auto r = equilateral_search(Norm2::p_norm(p), 1.0, 4, 10000, 11);
    o.require(r.best_residual >= 1e-2, "4 points nearly equilateral for p=" + std::to_string(p));
    o.detail << " p=" << p << ": " << r.best_residual << ';';
  }
  double worst3 = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
    worst3 = std::max(worst3, equilateral_search(Norm2::p_norm(p), 1.0, 3, 1, 11).best_residual);
  }
  o.require(worst3 <= 1e-9, "3-point residual");
  o.detail << " n=3 worst " << worst3;
}

void ac8(Outcome& o) {
  const WitnessSet t = approx_set({0, 0}, {std::sqrt(2.0), 0}, 0.1, 1.0, Norm2::euclidean());
  const auto problems = check_invariants(t);
  o.require(problems.empty(), "invariants");
  const VerifyReport r = enumerate_compositional(t, Norm2::euclidean());
  o.require(approx_gap_check(t, Norm2::euclidean(), r), "gap above eps");
  o.detail << ' ' << t.points.size() << " points, " << t.trace.notes.front() << ' '
           << t.trace.notes.back() << ", max|gap| " << r.max_abs_gap_injective;
}

void ac9(Outcome& o) {
  auto text = [](const WitnessSet& w) { return dump_json(witness_to_json(w)); };
  const std::string a = text(euclid_set("3/2"));
  o.require(a == text(euclid_set("3/2")), "repeated builds differ");
  const WitnessSet f5 = figure5_config({0, 0}, {2, 0}, Norm2::p_norm(1.5));
  o.require(text(f5) == text(figure5_config({0, 0}, {2, 0}, Norm2::p_norm(1.5))), "figure5 differs");
  const WitnessSet q2 = euclid_set("2");
  const std::string r1 = dump_json(report_to_json(falsify(q2, Norm2::p_norm(kInf), 200, 42)));
  const std::string r2 = dump_json(report_to_json(falsify(q2, Norm2::p_norm(kInf), 200, 42)));
  o.require(r1 == r2, "falsify reports differ");
  o.require(dump_json(report_to_json(report_from_json(nlohmann::json::parse(r1)))) == r1,
            "report round trip");
  for (const WitnessSet& w :
       {q2, f5, approx_set({0, 0}, {std::sqrt(2.0), 0}, 0.1, 1.0, Norm2::euclidean())}) {
    const std::string s = text(w);
    o.require(text(witness_from_json(nlohmann::json::parse(s))) == s, "witness round trip");
  }
  o.detail << " builds, falsify reports and JSON round trips are byte-identical";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1 rational closure", 5, ac1},
      {"AC2 forcing by enumeration", 10, ac2},
      {"AC3 injectivity is necessary", 1, ac3},
      {"AC4 strict convexity is necessary", 60, ac4},
      {"AC5 pair kernel", 10, ac5},
      {"AC6 11-point configuration", 120, ac6},
      {"AC7 equilateral dichotomy", 120, ac7},
      {"AC8 approximate forcing", 30, ac8},
      {"AC9 determinism and round trip", 60, ac9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail << " [over time limit " << c.limit_s << " s]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << std::fixed
              << std::setprecision(2) << secs << " s)" << std::defaultfloat << o.detail.str()
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
