#pragma once

#include <functional>
#include <optional>
#include <span>

#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

/// Dense row-major matrix. Flattened matrices elsewhere in the library use the same order.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  static Matrix from_flat(std::size_t r, std::size_t c, std::span<const double> flat);
  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Matrix transpose() const;
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Thin SVD a = U diag(s) V^T with s nonincreasing; U is rows x k, V is cols x k, k = min dims.
struct SvdResult {
  Matrix u;
  Vec s;
  Matrix v;
};

/// One-sided Jacobi SVD with a fixed cyclic sweep order. Throws InvalidArgument on non-finite
/// input and SolverError if sweeps do not converge.
SvdResult jacobi_svd(const Matrix& a);

/// Row-major flat form of U diag(s) V^T.
Vec svd_compose(const SvdResult& svd, std::span<const double> s);

/// Solves the symmetric positive definite system H x = b in place by Cholesky.
/// Adds a small diagonal shift when H is numerically semidefinite. Returns false on failure.
bool cholesky_solve(Matrix h, Vec& b);

// ---------------------------------------------------------------------------
// Linear programming

/// min c^T x  s.t.  A x = b, x >= 0.
struct LinearProgram {
  Matrix a;
  Vec b;
  Vec c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  Vec x;
  Vec dual;  ///< y with A^T y <= c at optimality, b^T y = objective.
};

/// Dense two-phase tableau simplex with Bland's rule.
LpSolution solve_lp(const LinearProgram& lp);

// ---------------------------------------------------------------------------
// Ellipsoid method

/// Oracle for the central-cut ellipsoid method: returns the objective value and writes a
/// subgradient of the objective into `grad` when `x` is feasible; returns nullopt and writes a
/// separating cut (a subgradient of a violated constraint) into `grad` otherwise.
using EllipsoidOracle = std::function<std::optional<double>(std::span<const double> x, Vec& grad)>;

/// Optional map from an infeasible point to a nearby feasible one (e.g. radial scaling onto a
/// gauge ball). Retracted points are evaluated as extra candidates; they never drive cuts.
using EllipsoidRetraction = std::function<std::optional<Vec>(std::span<const double> x)>;

struct EllipsoidResult {
  Vec best_point;
  double best_value = std::numeric_limits<double>::infinity();
  double lower_bound = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool found_feasible = false;
};

/// Minimizes a convex function over a convex set contained in the Euclidean ball of the given
/// radius around `center`. Stops when the certified gap falls below `gap_tol` (absolute) or the
/// ellipsoid degenerates numerically.
EllipsoidResult ellipsoid_minimize(const EllipsoidOracle& oracle, std::span<const double> center,
                                   double radius, double gap_tol, int max_iterations,
                                   const EllipsoidRetraction& retraction = nullptr);

}  // namespace mirrorgeo
