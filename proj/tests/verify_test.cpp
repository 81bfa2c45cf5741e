#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "bq/verify.hpp"
#include "bq/witness.hpp"

namespace bq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WitnessSet euclid_set(const char* q) {
  const Rational r = Rational::parse(q);
  return build_rational({0, 0}, {r.value(), 0}, r, 1.0, Norm2::euclidean());
}

/// Re-checks a placement without going through evaluate_placement.
double independent_residual(const WitnessSet& w, const Norm2& n, const Placement& p) {
  double worst = 0.0;
  for (const auto& [i, j] : w.edges) {
    const Vec2 d = p.images[i] - p.images[j];
    worst = std::max(worst, std::abs(n(d) - w.rho));
  }
  return worst;
}

TEST(Enumerate, DoublingSetHasEightBranches) {
  const WitnessSet w = euclid_set("2");
  const VerifyReport r = enumerate_placements(w, Norm2::euclidean());
  EXPECT_EQ(r.placements_found, 8u);
  EXPECT_EQ(r.injective_found, 2u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_FALSE(r.inconclusive);
  EXPECT_LE(r.max_abs_gap_injective, 1e-6);
  ASSERT_EQ(r.non_injective_found.size(), 6u);
  // Collapsed branches put f(y) at distance 1 from f(x) instead of 2.
  for (const auto& p : r.non_injective_found) EXPECT_NEAR(p.anchor_gap, -1.0, 1e-6);
}

TEST(Enumerate, BasePairKeepsItsEdge) {
  const VerifyReport r = enumerate_placements(euclid_set("1"), Norm2::p_norm(3.0));
  EXPECT_GT(r.placements_found, 0u);
  EXPECT_LE(r.max_abs_gap_injective, 1e-12);
}

TEST(Enumerate, HalfIsForcedAfterResolvingAFamily) {
  const VerifyReport r = enumerate_placements(euclid_set("1/2"), Norm2::euclidean());
  EXPECT_GE(r.injective_found, 1u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_FALSE(r.inconclusive);
  EXPECT_LE(r.max_abs_gap_injective, 1e-6);
}

TEST(Enumerate, FlexibleLinkageIsCaught) {
  // Two unit bars x-z-y do not force |x - y| = 2.
  WitnessSet w;
  w.points = {{0, 0}, {2, 0}, {1, 0}};
  w.labels = {"x", "y", "z"};
  w.edges = {{0, 2}, {1, 2}};
  w.anchor_y = 1;
  w.target_distance = 2.0;
  const VerifyReport r = enumerate_placements(w, Norm2::euclidean());
  EXPECT_FALSE(r.violations.empty());
  for (const auto& v : r.violations) EXPECT_LE(independent_residual(w, Norm2::euclidean(), v), 1e-6);
}

TEST(Enumerate, ThreadCountDoesNotChangeTheReport) {
  const ConstraintGraph g = ConstraintGraph::from_witness(euclid_set("2"));
  EnumerateOptions one;
  one.threads = 1;
  one.direction_grid = 64;
  EnumerateOptions four = one;
  four.threads = 4;
  const VerifyReport a = enumerate_graph(g, Norm2::p_norm(1.5), one);
  const VerifyReport b = enumerate_graph(g, Norm2::p_norm(1.5), four);
  EXPECT_EQ(a.placements_found, b.placements_found);
  EXPECT_EQ(a.search_budget_used, b.search_budget_used);
  ASSERT_EQ(a.non_injective_found.size(), b.non_injective_found.size());
  for (std::size_t i = 0; i < a.non_injective_found.size(); ++i) {
    EXPECT_EQ(a.non_injective_found[i].images, b.non_injective_found[i].images);
  }
}

TEST(Enumerate, LeafCapIsEnforced) {
  EnumerateOptions opts;
  opts.leaf_cap = 3;
  EXPECT_THROW(enumerate_graph(ConstraintGraph::from_witness(euclid_set("2")), Norm2::euclidean(), opts),
               BudgetExceededError);
}

TEST(Falsify, StrictConvexityDecides) {
  const WitnessSet w = euclid_set("2");
  const VerifyReport linf = falsify(w, Norm2::p_norm(kInf), 300, 7);
  ASSERT_FALSE(linf.violations.empty());
  for (const auto& v : linf.violations) {
    EXPECT_TRUE(v.injective);
    EXPECT_GT(std::abs(v.anchor_gap), 1e-5);
    EXPECT_LE(independent_residual(w, Norm2::p_norm(kInf), v), 1e-6);
  }
  EXPECT_FALSE(falsify(w, Norm2::p_norm(1.0), 300, 7).violations.empty());
  for (double p : {1.5, 2.0, 3.0}) {
    EXPECT_TRUE(falsify(w, Norm2::p_norm(p), 300, 7).violations.empty()) << p;
  }
}

TEST(Falsify, SameSeedSameReport) {
  const WitnessSet w = euclid_set("2");
  const VerifyReport a = falsify(w, Norm2::p_norm(kInf), 50, 99);
  const VerifyReport b = falsify(w, Norm2::p_norm(kInf), 50, 99);
  EXPECT_EQ(a.placements_found, b.placements_found);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) {
    EXPECT_EQ(a.violations[i].images, b.violations[i].images);
    EXPECT_EQ(a.violations[i].anchor_gap, b.violations[i].anchor_gap);
  }
  EXPECT_THROW(falsify(w, Norm2::euclidean(), 0, 1), PreconditionError);
}

TEST(Falsify, AgreesWithEnumerationOnSmallSets) {
  for (const char* q : {"1", "2", "3", "1/2"}) {
    const WitnessSet w = euclid_set(q);
    ASSERT_LE(w.points.size(), 12u);
    const bool enum_found = !enumerate_placements(w, Norm2::euclidean()).violations.empty();
    const bool fals_found = !falsify(w, Norm2::euclidean(), 200, 3).violations.empty();
    EXPECT_EQ(enum_found, fals_found) << q;
  }
}

TEST(Equilateral, ThreePointsAlwaysFit) {
  for (const Norm2& n : {Norm2::euclidean(), Norm2::p_norm(1.5), Norm2::p_norm(3.0),
                         Norm2::p_norm(kInf), Norm2::p_norm(1.0)}) {
    const EquilateralResult r = equilateral_search(n, 1.0, 3, 1, 0);
    EXPECT_LE(r.best_residual, 1e-9) << n.describe();
    EXPECT_EQ(r.best_points.size(), 3u);
  }
  EXPECT_THROW(equilateral_search(Norm2::euclidean(), 1.0, 2, 1, 0), PreconditionError);
}

TEST(Equilateral, FourPointsSplitTheFamilies) {
  EXPECT_LE(equilateral_search(Norm2::p_norm(kInf), 1.0, 4, 500, 1).best_residual, 1e-9);
  for (double p : {1.5, 2.0, 3.0}) {
    const double four = equilateral_search(Norm2::p_norm(p), 1.0, 4, 200, 1).best_residual;
    EXPECT_GE(four, 1e-2) << p;
    EXPECT_LE(equilateral_search(Norm2::p_norm(p), 1.0, 3, 1, 1).best_residual, four);
  }
}

TEST(NonCollapse, DoublingSetCollapsesButFigure5DoesNot) {
  const WitnessSet q2 = euclid_set("2");
  EXPECT_FALSE(check_non_collapse(q2, Norm2::euclidean(), enumerate_placements(q2, Norm2::euclidean())));
  const WitnessSet f5 = figure5_config({0, 0}, {2, 0}, Norm2::euclidean());
  EXPECT_TRUE(check_non_collapse(f5, Norm2::euclidean(), enumerate_placements(f5, Norm2::euclidean())));
  const WitnessSet q3 = euclid_set("3");
  EXPECT_THROW(check_non_collapse(q3, Norm2::euclidean(), VerifyReport{}), PreconditionError);
  VerifyReport unresolved;
  unresolved.inconclusive = true;
  EXPECT_FALSE(check_non_collapse(f5, Norm2::euclidean(), unresolved));
}

TEST(ApproxGap, SqrtTwoWithinTolerance) {
  const WitnessSet t = approx_set({0, 0}, {std::sqrt(2.0), 0}, 0.1, 1.0, Norm2::euclidean());
  const VerifyReport r = enumerate_compositional(t, Norm2::euclidean());
  EXPECT_TRUE(approx_gap_check(t, Norm2::euclidean(), r));
  // |7/5 - sqrt 2| + 1/20 is the largest possible gap.
  EXPECT_NEAR(r.max_abs_gap_injective, std::sqrt(2.0) - 1.4 + 0.05, 1e-9);
}

TEST(ApproxGap, ContractAndVacuousCase) {
  const WitnessSet exact = euclid_set("2");
  EXPECT_THROW(approx_gap_check(exact, Norm2::euclidean(), VerifyReport{}), PreconditionError);
  const WitnessSet loose = approx_set({0, 0}, {1.3, 0}, 5.0, 1.0, Norm2::euclidean());
  EXPECT_TRUE(approx_gap_check(loose, Norm2::euclidean(),
                               enumerate_placements(loose, Norm2::euclidean())));
}

TEST(Compositional, AgreesWithFlatEnumeration) {
  for (const char* q : {"2", "1/2", "3"}) {
    const WitnessSet w = euclid_set(q);
    const VerifyReport c = enumerate_compositional(w, Norm2::euclidean());
    EXPECT_TRUE(c.violations.empty()) << q;
    EXPECT_FALSE(c.inconclusive) << q;
    EXPECT_LE(c.max_abs_gap_injective, 1e-6) << q;
  }
  EXPECT_THROW(enumerate_compositional(euclid_set("2"), Norm2::p_norm(kInf)), PreconditionError);
}

TEST(Compositional, NonEuclideanTargets) {
  const WitnessSet w = build_rational({0, 0}, {2.0 / 3.0, 0}, Rational(2, 3), 1.0, Norm2::euclidean());
  EnumerateOptions opts;
  opts.direction_grid = 72;
  const VerifyReport r = enumerate_compositional(w, Norm2::p_norm(1.5), opts);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_FALSE(r.inconclusive);
}

TEST(Placement, InjectivityFlag) {
  const ConstraintGraph g = ConstraintGraph::from_witness(euclid_set("2"));
  const Placement p = evaluate_placement(g, Norm2::euclidean(), {{0, 0}, {2, 0}, {1, 0}, {0, 0}, {1, 1}});
  EXPECT_FALSE(p.injective);
  EXPECT_DOUBLE_EQ(p.anchor_gap, 0.0);
}

}  // namespace
}  // namespace bq
