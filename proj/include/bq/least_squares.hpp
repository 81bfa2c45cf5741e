#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bq/norm.hpp"
#include "bq/vec2.hpp"

namespace bq {

/// n(p[i] - p[j]) should equal length.
struct DistanceConstraint {
  std::size_t i = 0;
  std::size_t j = 0;
  double length = 0.0;
};

/// Soft target for one extra pair distance, weighted into the objective.
struct DistanceProbe {
  std::size_t i = 0;
  std::size_t j = 0;
  double length = 0.0;
  double weight = 0.0;
};

struct PolishOptions {
  int max_iterations = 200;
  /// Stop once every constraint residual is at most this.
  double residual_tol = 1e-14;
  /// Run a pattern-search pass if Levenberg-Marquardt stalls above this.
  double fallback_threshold = 1e-10;
  int fallback_sweeps = 200;
};

struct PolishResult {
  std::vector<Vec2> points;
  double max_residual = 0.0;
  int iterations = 0;
};

/// Largest |n(p[i] - p[j]) - length| over the constraints.
double max_residual(const Norm2& n, std::span<const Vec2> points,
                    std::span<const DistanceConstraint> constraints);

/// Levenberg-Marquardt on the sum of squared constraint residuals, with the
/// points listed in `fixed` held in place. The Jacobian uses the norm's
/// subgradient; if the iteration stalls (kinks of polygonal or max norms) a
/// coordinate pattern search takes over.
PolishResult polish_placement(const Norm2& n, std::vector<Vec2> points,
                              std::span<const DistanceConstraint> constraints,
                              std::span<const std::size_t> fixed, const PolishOptions& options = {},
                              std::optional<DistanceProbe> probe = std::nullopt);

}  // namespace bq
