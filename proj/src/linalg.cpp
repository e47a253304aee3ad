#include "mirrorgeo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

Matrix Matrix::from_flat(std::size_t r, std::size_t c, std::span<const double> flat) {
  require_same_dim(r * c, flat.size(), "Matrix::from_flat");
  Matrix m(r, c);
  std::copy(flat.begin(), flat.end(), m.data.begin());
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require_same_dim(a.cols, b.rows, "multiply");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

namespace {

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
SvdResult jacobi_svd_tall(const Matrix& a) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  constexpr int kMaxSweeps = 80;
  constexpr double kEps = 1e-15;
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = sign_of(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double wi = w(k, i), wj = w(k, j);
          w(k, i) = c * wi - s * wj;
          w(k, j) = s * wi + c * wj;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw SolverError("jacobi_svd: sweeps did not converge", 0.0);

  Vec sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += w(k, j) * w(k, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out{Matrix(m, n), Vec(n), Matrix(n, n)};
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    out.s[jj] = sigma[j];
    for (std::size_t k = 0; k < m; ++k) out.u(k, jj) = sigma[j] > 0.0 ? w(k, j) / sigma[j] : 0.0;
    for (std::size_t k = 0; k < n; ++k) out.v(k, jj) = v(k, j);
  }
  return out;
}

}  // namespace

SvdResult jacobi_svd(const Matrix& a) {
  if (!all_finite(a.data)) throw InvalidArgument("jacobi_svd: non-finite entries");
  if (a.rows >= a.cols) return jacobi_svd_tall(a);
  SvdResult t = jacobi_svd_tall(a.transpose());
  return SvdResult{std::move(t.v), std::move(t.s), std::move(t.u)};
}

bool cholesky_solve(Matrix h, Vec& b) {
  const std::size_t n = h.rows;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += std::abs(h(i, i));
  const double shift = 1e-14 * std::max(trace, 1e-300);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix l(n, n);
    bool ok = true;
    const double extra = attempt == 0 ? 0.0 : shift * std::pow(100.0, attempt - 1);
    for (std::size_t j = 0; j < n && ok; ++j) {
      double d = h(j, j) + extra;
      for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
      if (!(d > 0.0)) {
        ok = false;
        break;
      }
      l(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = h(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / l(j, j);
      }
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
      b[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
      b[ii] = s / l(ii, ii);
    }
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

namespace {

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t width) : m_(m), width_(width), t_((m + 1) * width, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
  }

 private:
  std::size_t m_, width_;
  Vec t_;
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

// Bland's rule over columns [0, enter_limit).
PhaseResult run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t m,
                        std::size_t enter_limit, std::size_t rhs, double eps) {
  constexpr int kMaxPivots = 50000;
  for (int it = 0; it < kMaxPivots; ++it) {
    std::size_t enter = enter_limit;
    for (std::size_t j = 0; j < enter_limit; ++j) {
      if (t.at(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == enter_limit) return PhaseResult::kOptimal;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a > eps) {
        const double ratio = t.at(i, rhs) / a;
        if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && leave < m &&
                                     basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) return PhaseResult::kUnbounded;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
  return PhaseResult::kIterationLimit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t m = lp.a.rows;
  const std::size_t n = lp.a.cols;
  require_same_dim(lp.b.size(), m, "solve_lp b");
  require_same_dim(lp.c.size(), n, "solve_lp c");
  const std::size_t rhs = n + m;
  const std::size_t width = n + m + 1;
  double scale = 1.0;
  for (double x : lp.a.data) scale = std::max(scale, std::abs(x));
  const double eps = 1e-11 * scale;

  Tableau t(m, width);
  std::vector<double> flip(m, 1.0);
  std::vector<std::size_t> basis(m);
  double bnorm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    flip[i] = lp.b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = flip[i] * lp.a(i, j);
    t.at(i, n + i) = 1.0;
    t.at(i, rhs) = flip[i] * lp.b[i];
    bnorm += std::abs(lp.b[i]);
    basis[i] = n + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += t.at(i, j);
    t.at(m, j) = -s;
  }
  double s0 = 0.0;
  for (std::size_t i = 0; i < m; ++i) s0 += t.at(i, rhs);
  t.at(m, rhs) = -s0;

  LpSolution sol;
  if (run_simplex(t, basis, m, n, rhs, eps) == PhaseResult::kIterationLimit) {
    sol.status = LpStatus::kIterationLimit;
    return sol;
  }
  if (-t.at(m, rhs) > 1e-9 * (1.0 + bnorm)) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  // Drive zero-level artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    std::size_t best = n;
    double best_abs = eps;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t.at(i, j)) > best_abs) {
        best_abs = std::abs(t.at(i, j));
        best = j;
      }
    }
    if (best < n) {
      t.pivot(i, best);
      basis[i] = best;
    }
  }
  // Phase 2 objective row.
  for (std::size_t j = 0; j < width; ++j) t.at(m, j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.at(m, j) = lp.c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = basis[i] < n ? lp.c[basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < width; ++j) t.at(m, j) -= cb * t.at(i, j);
  }
  const PhaseResult r2 = run_simplex(t, basis, m, n, rhs, eps);
  if (r2 == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  if (r2 == PhaseResult::kIterationLimit) {
    sol.status = LpStatus::kIterationLimit;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = std::max(0.0, t.at(i, rhs));
  sol.objective = -t.at(m, rhs);
  sol.dual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.dual[i] = -t.at(m, n + i) * flip[i];
  return sol;
}

// ---------------------------------------------------------------------------

EllipsoidResult ellipsoid_minimize(const EllipsoidOracle& oracle, std::span<const double> center,
                                   double radius, double gap_tol, int max_iterations,
                                   const EllipsoidRetraction& retraction) {
  const std::size_t n = center.size();
  EllipsoidResult res;
  Vec x(center.begin(), center.end());
  Vec g(n);
  Vec scratch(n);
  // Offers a retracted point of an infeasible iterate as a candidate.
  const auto try_retraction = [&](std::span<const double> at) {
    if (!retraction) return;
    const std::optional<Vec> y = retraction(at);
    if (!y) return;
    const auto val = oracle(*y, scratch);
    if (val && *val < res.best_value) {
      res.found_feasible = true;
      res.best_value = *val;
      res.best_point = *y;
    }
  };

  if (n == 1) {
    double lo = x[0] - radius, hi = x[0] + radius;
    for (int it = 0; it < max_iterations; ++it) {
      res.iterations = it + 1;
      x[0] = 0.5 * (lo + hi);
      const auto val = oracle(x, g);
      if (val) {
        res.found_feasible = true;
        if (*val < res.best_value) {
          res.best_value = *val;
          res.best_point = x;
        }
        const double half = 0.5 * (hi - lo);
        res.lower_bound = std::max(res.lower_bound, *val - std::abs(g[0]) * half);
        if (res.best_value - res.lower_bound <= gap_tol) break;
      } else {
        try_retraction(x);
      }
      if (g[0] > 0.0) {
        hi = x[0];
      } else if (g[0] < 0.0) {
        lo = x[0];
      } else {
        if (val) {
          res.lower_bound = res.best_value;
          break;
        }
        break;
      }
      if (hi - lo < 1e-300) break;
    }
    return res;
  }

  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) p(i, i) = radius * radius;
  const double nd = static_cast<double>(n);
  const double expand = nd * nd / (nd * nd - 1.0);
  Vec pg(n);
  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it + 1;
    const auto val = oracle(x, g);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += p(i, j) * g[j];
      pg[i] = s;
    }
    const double gpg = dot(g, pg);
    if (val) {
      res.found_feasible = true;
      if (*val < res.best_value) {
        res.best_value = *val;
        res.best_point = x;
      }
      res.lower_bound = std::max(res.lower_bound, *val - std::sqrt(std::max(gpg, 0.0)));
      if (res.best_value - res.lower_bound <= gap_tol) break;
    } else {
      try_retraction(x);
      if (res.best_value - res.lower_bound <= gap_tol) break;
    }
    if (!(gpg > 1e-28 * dot(g, g) * radius * radius)) {
      if (val) res.lower_bound = std::max(res.lower_bound, res.best_value);
      break;
    }
    const double root = std::sqrt(gpg);
    for (std::size_t i = 0; i < n; ++i) x[i] -= pg[i] / ((nd + 1.0) * root);
    const double c = 2.0 / ((nd + 1.0) * gpg);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double v = expand * (p(i, j) - c * pg[i] * pg[j]);
        p(i, j) = v;
        p(j, i) = v;
      }
  }
  return res;
}

Vec svd_compose(const SvdResult& svd, std::span<const double> s) {
  const std::size_t m = svd.u.rows, n = svd.v.rows;
  Vec out(m * n, 0.0);
  for (std::size_t t = 0; t < s.size(); ++t)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += svd.u(i, t) * s[t] * svd.v(j, t);
  return out;
}

}  // namespace mirrorgeo
