#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bq/errors.hpp"
#include "bq/least_squares.hpp"
#include "bq/norm.hpp"
#include "bq/witness.hpp"

namespace bq {

/// Images of the witness points in the target plane.
struct Placement {
  std::vector<Vec2> images;
  double max_edge_residual = 0.0;
  /// n(f(x) - f(y)) - target distance.
  double anchor_gap = 0.0;
  bool injective = true;
};

enum class VerifyMode { Enumerate, Falsify, Compositional };

const char* to_string(VerifyMode mode);

struct VerifyReport {
  VerifyMode mode = VerifyMode::Enumerate;
  /// Consistent placements seen (edge residual within tolerance).
  std::size_t placements_found = 0;
  std::size_t injective_found = 0;
  /// Injective consistent placements whose gap exceeds the allowance
  /// (all consistent ones when injectivity is not required).
  std::vector<Placement> violations;
  std::vector<Placement> non_injective_found;
  /// Branch nodes (enumeration) or restarts (falsification) spent.
  std::size_t search_budget_used = 0;
  /// Some branch could not be resolved (nested one-parameter families).
  bool inconclusive = false;
  /// Largest |anchor_gap| over injective consistent placements.
  double max_abs_gap_injective = 0.0;
  std::vector<std::string> notes;
};

/// Distance constraints on an abstract vertex set with two anchors.
struct ConstraintGraph {
  std::size_t vertex_count = 0;
  std::vector<DistanceConstraint> edges;
  std::size_t anchor_x = 0;
  std::size_t anchor_y = 0;
  double target_distance = 0.0;
  /// Allowed |anchor_gap| before a placement counts as a violation.
  double gap_allowance = 0.0;
  /// Source coordinates, used only for initial guesses and reporting.
  std::vector<Vec2> source_points;

  static ConstraintGraph from_witness(const WitnessSet& w);
};

struct EnumerateOptions {
  /// Angles on the full circle for the first edge (quotiented by the target's
  /// symmetry group; a single angle for the Euclidean target).
  std::size_t direction_grid = 720;
  /// Samples on the full circle for later one-parameter families.
  std::size_t sweep_grid = 720;
  double tol = kVerificationTol;
  std::size_t leaf_cap = std::size_t{1} << 24;
  unsigned threads = 0;
};

/// Exhaustive branch enumeration of placements of g into the target plane.
VerifyReport enumerate_graph(const ConstraintGraph& g, const Norm2& target,
                             const EnumerateOptions& options = {});

VerifyReport enumerate_placements(const WitnessSet& w, const Norm2& target,
                                  std::size_t direction_grid = 720, double tol = kVerificationTol);

/// Verifies each construction step of w's trace separately: the anchors of a
/// step and of its sub-sets form a small skeleton whose sub-set distances are
/// taken as already forced. Sound for injective placements into strictly
/// convex targets; violations carry skeleton coordinates, not witness ones.
VerifyReport enumerate_compositional(const WitnessSet& w, const Norm2& target,
                                     const EnumerateOptions& options = {});

struct FalsifyOptions {
  double probe_weight = 1.0;
  int stage_iterations = 100;
  unsigned threads = 0;
};

/// Random-restart penalty search for placements that keep every edge but move
/// the anchors. Deterministic for a given seed.
VerifyReport falsify(const WitnessSet& w, const Norm2& target, std::size_t restarts,
                     std::uint64_t seed, double tol = kVerificationTol,
                     bool require_injective = true, const FalsifyOptions& options = {});

struct EquilateralResult {
  double best_residual = 0.0;
  std::vector<Vec2> best_points;
};

/// Minimizes max |n(p_i - p_j) - d| over n_points points with p_0 at the origin.
EquilateralResult equilateral_search(const Norm2& target, double d, std::size_t n_points,
                                     std::size_t restarts, std::uint64_t seed);

/// True iff the report resolves every branch and no consistent placement sends
/// x onto x1 or y onto y1. Needs a set labelled like the 11-point
/// configuration or the doubling set.
bool check_non_collapse(const WitnessSet& w, const Norm2& target, const VerifyReport& report,
                        double tol = kVerificationTol);

/// True iff every consistent injective placement keeps |gap| <= eps + tol.
bool approx_gap_check(const WitnessSet& w, const Norm2& target, const VerifyReport& report,
                      double tol = kVerificationTol);

/// Residual, gap and injectivity of the given images.
Placement evaluate_placement(const ConstraintGraph& g, const Norm2& target,
                             std::vector<Vec2> images);

}  // namespace bq
