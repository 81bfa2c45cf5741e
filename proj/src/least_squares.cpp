#include "bq/least_squares.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

namespace bq {

namespace {

constexpr std::size_t kDenseLimit = 64;

struct Problem {
  const Norm2& norm;
  std::span<const DistanceConstraint> constraints;
  std::optional<DistanceProbe> probe;
  std::vector<std::ptrdiff_t> var_of;  // point -> first variable index, or -1 if fixed
  std::size_t nvars = 0;

  std::size_t nres() const { return constraints.size() + (probe ? 1 : 0); }

  double cost(std::span<const Vec2> p) const {
    double c = 0.0;
    for (const auto& k : constraints) {
      const double r = norm(p[k.i] - p[k.j]) - k.length;
      c += r * r;
    }
    if (probe) {
      const double r = probe->weight * (norm(p[probe->i] - p[probe->j]) - probe->length);
      c += r * r;
    }
    return c;
  }

  void apply(std::vector<Vec2>& p, const Eigen::VectorXd& step) const {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (var_of[i] < 0) continue;
      p[i].x += step[var_of[i]];
      p[i].y += step[var_of[i] + 1];
    }
  }
};

void add_row(std::vector<Eigen::Triplet<double>>& trips, const Problem& pb, Eigen::Index row,
             std::size_t i, std::size_t j, Vec2 g, double w) {
  if (pb.var_of[i] >= 0) {
    trips.emplace_back(row, pb.var_of[i], w * g.x);
    trips.emplace_back(row, pb.var_of[i] + 1, w * g.y);
  }
  if (pb.var_of[j] >= 0) {
    trips.emplace_back(row, pb.var_of[j], -w * g.x);
    trips.emplace_back(row, pb.var_of[j] + 1, -w * g.y);
  }
}

void linearize(const Problem& pb, std::span<const Vec2> p, Eigen::SparseMatrix<double>& jac,
               Eigen::VectorXd& res) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(pb.nres() * 4);
  res.resize(static_cast<Eigen::Index>(pb.nres()));
  Eigen::Index row = 0;
  for (const auto& k : pb.constraints) {
    const Vec2 v = p[k.i] - p[k.j];
    res[row] = pb.norm(v) - k.length;
    add_row(trips, pb, row, k.i, k.j, pb.norm.gradient(v), 1.0);
    ++row;
  }
  if (pb.probe) {
    const Vec2 v = p[pb.probe->i] - p[pb.probe->j];
    res[row] = pb.probe->weight * (pb.norm(v) - pb.probe->length);
    add_row(trips, pb, row, pb.probe->i, pb.probe->j, pb.norm.gradient(v), pb.probe->weight);
  }
  jac.resize(static_cast<Eigen::Index>(pb.nres()), static_cast<Eigen::Index>(pb.nvars));
  jac.setFromTriplets(trips.begin(), trips.end());
}

bool solve_damped(const Eigen::SparseMatrix<double>& jtj, const Eigen::VectorXd& rhs, double mu,
                  Eigen::VectorXd& step) {
  Eigen::VectorXd diag = jtj.diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = mu * std::max(diag[i], 1e-12);
  if (static_cast<std::size_t>(jtj.rows()) <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd(jtj);
    a.diagonal() += diag;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) return false;
    step = ldlt.solve(rhs);
  } else {
    Eigen::SparseMatrix<double> a = jtj;
    for (Eigen::Index i = 0; i < diag.size(); ++i) a.coeffRef(i, i) += diag[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
    if (ldlt.info() != Eigen::Success) return false;
    step = ldlt.solve(rhs);
  }
  return step.allFinite();
}

void pattern_search(const Problem& pb, std::vector<Vec2>& p, const PolishOptions& options) {
  double scale = 0.0;
  for (const auto& k : pb.constraints) scale = std::max(scale, k.length);
  double h = 1e-3 * std::max(scale, 1.0);
  double best = pb.cost(p);
  for (int sweep = 0; sweep < options.fallback_sweeps && h > 1e-17; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (pb.var_of[i] < 0) continue;
      for (double* coord : {&p[i].x, &p[i].y}) {
        for (double dir : {1.0, -1.0}) {
          const double saved = *coord;
          *coord = saved + dir * h;
          const double c = pb.cost(p);
          if (c < best) {
            best = c;
            improved = true;
            break;
          }
          *coord = saved;
        }
      }
    }
    if (!improved) h *= 0.5;
    if (max_residual(pb.norm, p, pb.constraints) <= options.residual_tol && !pb.probe) break;
  }
}

}  // namespace

double max_residual(const Norm2& n, std::span<const Vec2> points,
                    std::span<const DistanceConstraint> constraints) {
  double worst = 0.0;
  for (const auto& k : constraints) {
    worst = std::max(worst, std::abs(n(points[k.i] - points[k.j]) - k.length));
  }
  return worst;
}

PolishResult polish_placement(const Norm2& n, std::vector<Vec2> points,
                              std::span<const DistanceConstraint> constraints,
                              std::span<const std::size_t> fixed, const PolishOptions& options,
                              std::optional<DistanceProbe> probe) {
  Problem pb{n, constraints, probe, std::vector<std::ptrdiff_t>(points.size(), 0), 0};
  for (std::size_t f : fixed) pb.var_of.at(f) = -1;
  for (auto& v : pb.var_of) {
    if (v < 0) continue;
    v = static_cast<std::ptrdiff_t>(pb.nvars);
    pb.nvars += 2;
  }

  PolishResult out;
  if (pb.nvars == 0 || pb.nres() == 0) {
    out.max_residual = max_residual(n, points, constraints);
    out.points = std::move(points);
    return out;
  }

  Eigen::SparseMatrix<double> jac;
  Eigen::VectorXd res;
  Eigen::VectorXd step;
  double mu = 1e-3;
  double cost = pb.cost(points);
  int stall = 0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (!probe && max_residual(n, points, constraints) <= options.residual_tol) break;
    linearize(pb, points, jac, res);
    const Eigen::SparseMatrix<double> jtj = Eigen::SparseMatrix<double>(jac.transpose() * jac);
    const Eigen::VectorXd rhs = -(jac.transpose() * res);
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      if (solve_damped(jtj, rhs, mu, step)) {
        std::vector<Vec2> trial = points;
        pb.apply(trial, step);
        const double c = pb.cost(trial);
        if (c < cost) {
          const double gain = cost - c;
          points = std::move(trial);
          stall = gain <= 1e-30 + 1e-14 * cost ? stall + 1 : 0;
          cost = c;
          mu = std::max(mu / 3.0, 1e-15);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted || stall >= 3) break;
  }
  out.iterations = it;

  if (!probe && max_residual(n, points, constraints) > options.fallback_threshold) {
    pattern_search(pb, points, options);
  }
  out.max_residual = max_residual(n, points, constraints);
  out.points = std::move(points);
  return out;
}

}  // namespace bq
