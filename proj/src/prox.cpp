#include "mirrorgeo/prox.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <optional>

#include "mirrorgeo/linalg.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

constexpr double kLambdaTol = 1e-12;
constexpr int kBisectionMax = 400;
constexpr std::uintmax_t kRootMax = 200;
constexpr std::size_t kVertexLimit = 1u << 14;

// Root of a monotone function bracketed by [lo, hi]; returns the end where `keep` holds.
template <class F, class Keep>
double bracketed_root(F f, double lo, double hi, Keep keep) {
  std::uintmax_t it = kRootMax;
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return keep(b) ? b : a;
}

// Psi = scale * psi_r; grad Psi* preserves signs and zero coordinates, and
// d Psi / d|w_i| = c(||w||_r) |w_i|^{r-1}.
struct Power {
  double r;
  double scale;

  double coeff(double t) const {
    if (r > 2.0) return scale * std::pow(2.0, r);
    return scale * std::pow(t, 2.0 - r) / (r - 1.0);
  }
  bool fixed_coeff() const { return r >= 2.0; }
  Regularizer reg(std::size_t d) const { return Regularizer::psi_r(r, d, scale); }
};

std::optional<Power> power_of(const Regularizer& reg) {
  if (const auto* k = reg.as<PsiR>()) return Power{k->r, reg.scale()};
  if (reg.as<EuclideanHalfSq>()) return Power{2.0, reg.scale()};
  return std::nullopt;
}

Vec soft_threshold(std::span<const double> theta, double lam) {
  Vec z(theta.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = sign_of(theta[i]) * std::max(std::abs(theta[i]) - lam, 0.0);
  }
  return z;
}

// l1 ball: w = grad Psi*(S_lam theta) with ||w||_1 = rho.
Vec threshold_l1(const Power& m, std::span<const double> theta, double rho, int& iters) {
  const Regularizer pr = m.reg(theta.size());
  const auto at = [&](double lam) { return psi_conj_grad(pr, soft_threshold(theta, lam)); };
  double lo = 0.0, hi = lp_norm(theta, Exponent::infinity());
  while (hi - lo > kLambdaTol && iters < kBisectionMax) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iters;
    (lp_norm(at(mid), Exponent(1.0)) > rho ? lo : hi) = mid;
  }
  if (m.r == 2.0) {
    // Quadratic case: the support is settled, so solve for the multiplier exactly.
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : theta) {
      if (std::abs(x) > hi) sum += std::abs(x), ++n;
    }
    if (n > 0) {
      const double lam = (sum - rho * m.scale) / static_cast<double>(n);
      if (lam >= lo - kLambdaTol && lam <= hi + kLambdaTol) return at(std::max(lam, 0.0));
    }
  }
  return at(hi);
}

// Simplex: w = grad Psi*((theta - lam)_+) with sum w = 1.
Vec threshold_simplex(const Power& m, std::span<const double> theta, int& iters) {
  const Regularizer pr = m.reg(theta.size());
  const auto at = [&](double lam) {
    Vec z(theta.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::max(theta[i] - lam, 0.0);
    return psi_conj_grad(pr, z);
  };
  const auto mass = [&](double lam) {
    const Vec w = at(lam);
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  };
  double hi = *std::max_element(theta.begin(), theta.end());
  double step = 1.0;
  double lo = hi - step;
  while (mass(lo) < 1.0) {
    step *= 2.0;
    lo = hi - step;
    if (++iters > kBisectionMax) throw SolverError("bregman_project: simplex multiplier", step);
  }
  while (hi - lo > kLambdaTol && iters < 2 * kBisectionMax) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iters;
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  if (m.r == 2.0) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : theta) {
      if (x > hi) sum += x, ++n;
    }
    if (n > 0) {
      const double lam = (sum - m.scale) / static_cast<double>(n);
      if (lam >= lo - kLambdaTol && lam <= hi + kLambdaTol) return at(lam);
    }
  }
  Vec w = at(hi);
  double s = 0.0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
  return w;
}

// l_s ball, s in (1, inf]. For a fixed coefficient c the problem separates:
// c a_i^{r-1} + mu a_i^{s-1} = |theta_i| with mu >= 0 set by ||a||_s = rho. For r < 2 the
// coefficient depends on t = ||a||_r, found by an outer root.
Vec separable_ls(const Power& m, std::span<const double> theta, Exponent s, double rho,
                 int& iters) {
  const std::size_t d = theta.size();
  const double r = m.r;
  Vec b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = std::abs(theta[i]);

  const auto solve_c = [&](double c) {
    Vec a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = std::pow(b[i] / c, 1.0 / (r - 1.0));
    if (s.is_infinite()) {
      for (double& x : a) x = std::min(x, rho);
      return a;
    }
    if (lp_norm(a, s) <= rho) return a;
    const double sv = s.value();
    const auto coord = [&](double bi, double mu) {
      if (bi == 0.0) return 0.0;
      const auto root_of = [&](double frac) {
        return std::min(std::pow(frac * bi / c, 1.0 / (r - 1.0)),
                        std::pow(frac * bi / mu, 1.0 / (sv - 1.0)));
      };
      const double lo = root_of(0.5), hi = root_of(1.0);
      const auto h = [&](double x) { return c * std::pow(x, r - 1.0) + mu * std::pow(x, sv - 1.0) - bi; };
      if (h(hi) <= 0.0) return hi;
      if (h(lo) >= 0.0) return lo;
      return bracketed_root(h, lo, hi, [&](double x) { return h(x) <= 0.0; });
    };
    const auto a_of = [&](double mu) {
      Vec out(d);
      for (std::size_t i = 0; i < d; ++i) out[i] = coord(b[i], mu);
      return out;
    };
    Vec bp(d);
    for (std::size_t i = 0; i < d; ++i) bp[i] = std::pow(b[i], 1.0 / (sv - 1.0));
    const double mu_hi = std::pow(lp_norm(bp, s) / rho, sv - 1.0);
    const auto f = [&](double mu) {
      ++iters;
      return lp_norm(a_of(mu), s) - rho;
    };
    if (f(mu_hi) >= 0.0) return a_of(mu_hi);
    return a_of(bracketed_root(f, 0.0, mu_hi, [&](double mu) { return f(mu) <= 0.0; }));
  };

  Vec a;
  if (m.fixed_coeff()) {
    a = solve_c(m.coeff(1.0));
  } else {
    const double dd = static_cast<double>(d);
    const double t_hi =
        rho * std::pow(dd, std::max(0.0, 1.0 / r - s.reciprocal())) * (1.0 + 1e-9);
    const auto g = [&](double t) { return lp_norm(solve_c(m.coeff(t)), Exponent(r)) - t; };
    double t_lo = 0.5 * t_hi;
    for (int k = 0; g(t_lo) <= 0.0; ++k) {
      if (k > 2000) throw SolverError("bregman_project: no bracket for the norm level", t_lo);
      t_lo *= 0.5;
    }
    const double t = bracketed_root(g, t_lo, t_hi, [](double) { return true; });
    a = solve_c(m.coeff(t));
  }
  for (std::size_t i = 0; i < d; ++i) a[i] *= sign_of(theta[i]);
  return a;
}

// Power regularizer onto an l_s ball of radius rho.
Vec power_route(const Power& m, std::span<const double> theta, Exponent s, double rho,
                int& iters, ProjectionRoute& route) {
  const Vec free = psi_conj_grad(m.reg(theta.size()), theta);
  const double n = lp_norm(free, s);
  if (n <= rho) {
    route = ProjectionRoute::kIdentity;
    return free;
  }
  if (s == Exponent(m.r)) {
    route = ProjectionRoute::kRadial;
    return scaled(free, rho / n);
  }
  if (s == Exponent(1.0)) {
    route = ProjectionRoute::kThreshold;
    return threshold_l1(m, theta, rho, iters);
  }
  route = ProjectionRoute::kSeparable;
  return separable_ls(m, theta, s, rho, iters);
}

// Frank-Wolfe gap of B_Psi(. | y) at w, with theta = grad Psi(y).
double fw_gap(const Regularizer& reg, const BallSpec& ball, std::span<const double> theta,
              std::span<const double> w) {
  Vec g = psi_grad(reg, w);
  axpy(-1.0, theta, g);
  return std::max(0.0, dot(g, w) + support_function(ball, scaled(g, -1.0)));
}

double gap_threshold(const ProjectionOptions& opts, std::span<const double> theta,
                     std::span<const double> w) {
  return opts.gap_tol * std::max(1.0, std::abs(dot(theta, w)));
}

// Exact minimizer of F(w + gamma dir) over [0, gamma_max] through the sign of the derivative.
double line_search(const Regularizer& reg, std::span<const double> theta,
                   std::span<const double> w, std::span<const double> dir, double gamma_max) {
  const auto slope = [&](double gamma) {
    Vec x(w.begin(), w.end());
    axpy(gamma, dir, x);
    Vec g = psi_grad(reg, x);
    axpy(-1.0, theta, g);
    return dot(g, dir);
  };
  if (slope(gamma_max) <= 0.0) return gamma_max;
  if (slope(0.0) >= 0.0) return 0.0;
  return bracketed_root(slope, 0.0, gamma_max, [](double) { return true; });
}

// Pairwise Frank-Wolfe: w is kept as a convex combination of atoms and each step moves mass
// from the worst active atom to the linear-oracle atom. Polytopes use their vertex list; other
// bodies collect atoms from the oracle as they appear.
ProjectionResult frank_wolfe(const Regularizer& reg, const BallSpec& ball,
                             std::span<const double> theta, const ProjectionOptions& opts) {
  ProjectionResult out;
  out.route = ProjectionRoute::kFrankWolfe;
  const auto verts = extreme_points(ball, kVertexLimit);
  const bool fixed_atoms = verts.has_value();
  std::vector<Vec> atoms;
  Vec alpha;
  if (fixed_atoms) {
    atoms = *verts;
    alpha.assign(atoms.size(), 0.0);
    std::size_t start = 0;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      if (dot(theta, atoms[i]) > dot(theta, atoms[start])) start = i;
    }
    alpha[start] = 1.0;
  } else {
    atoms.push_back(support_point(ball, theta));
    alpha.push_back(1.0);
  }
  Vec w;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (alpha[i] > 0.0) w = atoms[i];
  }

  double gap = std::numeric_limits<double>::infinity();
  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    Vec g = psi_grad(reg, w);
    axpy(-1.0, theta, g);
    std::size_t best = 0, worst = 0;
    double best_score = std::numeric_limits<double>::infinity();
    double worst_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!fixed_atoms && alpha[i] == 0.0) continue;
      const double sc = dot(g, atoms[i]);
      if (fixed_atoms && sc < best_score) best_score = sc, best = i;
      if (alpha[i] > 0.0 && sc > worst_score) worst_score = sc, worst = i;
    }
    if (!fixed_atoms) {
      Vec s = lmo(ball, g);
      best_score = dot(g, s);
      best = atoms.size();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (alpha[i] > 0.0 && atoms[i] == s) best = i;
      }
      if (best == atoms.size()) {
        atoms.push_back(std::move(s));
        alpha.push_back(0.0);
      }
    }
    gap = std::max(0.0, dot(g, w) - best_score);
    if (gap <= gap_threshold(opts, theta, w)) break;
    const Vec dir = sub(atoms[best], atoms[worst]);
    const double gamma = line_search(reg, theta, w, dir, alpha[worst]);
    if (gamma == 0.0) break;
    axpy(gamma, dir, w);
    alpha[best] += gamma;
    alpha[worst] = gamma == alpha[worst] ? 0.0 : alpha[worst] - gamma;
    if (!fixed_atoms && atoms.size() > 4 * w.size() + 64) {
      // Drop atoms without mass.
      std::size_t k = 0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (alpha[i] > 0.0) {
          if (k != i) atoms[k] = std::move(atoms[i]);
          alpha[k++] = alpha[i];
        }
      }
      atoms.resize(k);
      alpha.resize(k);
    }
  }
  out.point = std::move(w);
  out.residual = gap;
  if (!(gap <= gap_threshold(opts, theta, out.point))) {
    throw SolverError("bregman_project: Frank-Wolfe did not reach the gap tolerance", gap);
  }
  return out;
}

ProjectionResult project(const Regularizer& reg, const BallSpec& ball, std::span<const double> y,
                         std::span<const double> theta, const ProjectionOptions& opts) {
  ProjectionResult out;
  if (contains(ball, y, 0.0)) {
    out.point.assign(y.begin(), y.end());
    return out;
  }
  if (reg.as<EntropyPsi>() && !ball.is_simplex()) {
    throw InvalidArgument("bregman_project: entropy is only defined on the simplex");
  }
  if (opts.force_frank_wolfe) return frank_wolfe(reg, ball, theta, opts);

  const double rho = ball.radius();
  bool exact = true;
  if (reg.as<EntropyPsi>()) {
    double s = 0.0;
    for (double x : y) {
      if (x < 0.0) throw InvalidArgument("bregman_project: entropy needs a nonnegative point");
      s += x;
    }
    if (!(s > 0.0)) throw InvalidArgument("bregman_project: entropy needs a nonzero point");
    out.point = scaled(y, 1.0 / s);
    out.route = ProjectionRoute::kNormalize;
  } else if (const auto m = power_of(reg); m && ball.is_simplex()) {
    out.point = threshold_simplex(*m, theta, out.iterations);
    out.route = ProjectionRoute::kThreshold;
  } else if (const auto* lp = ball.as<LpBall>(); m && lp) {
    out.point = power_route(*m, theta, lp->p, rho, out.iterations, out.route);
  } else if (const auto* k = reg.as<GroupSquared>(); k && ball.as<GroupBall>() &&
                                                     ball.as<GroupBall>()->q == Exponent(k->q) &&
                                                     ball.as<GroupBall>()->rows == k->rows) {
    const GroupBall& gb = *ball.as<GroupBall>();
    const BallSpec col_dual = BallSpec::lp(holder_conjugate(gb.q), gb.rows);
    Vec b(gb.cols);
    std::vector<Vec> dirs(gb.cols);
    for (std::size_t j = 0; j < gb.cols; ++j) {
      const std::span<const double> tj = theta.subspan(j * gb.rows, gb.rows);
      b[j] = gauge_norm(col_dual, tj);
      dirs[j] = gauge_subgradient(col_dual, tj);
    }
    const Power sub_power{k->r, 2.0 * reg.scale() * (k->r - 1.0) / (k->q + k->r - 2.0)};
    ProjectionRoute inner = ProjectionRoute::kIdentity;
    const Vec n = power_route(sub_power, b, gb.r, rho, out.iterations, inner);
    out.point.assign(theta.size(), 0.0);
    for (std::size_t j = 0; j < gb.cols; ++j)
      for (std::size_t i = 0; i < gb.rows; ++i) out.point[j * gb.rows + i] = n[j] * dirs[j][i];
    out.route = ProjectionRoute::kGroup;
  } else if (const auto* sk = reg.as<SchattenPsiR>(); sk && ball.as<SchattenBall>() &&
                                                      ball.as<SchattenBall>()->rows == sk->rows) {
    const SvdResult svd = jacobi_svd(Matrix::from_flat(sk->rows, sk->cols, theta));
    ProjectionRoute inner = ProjectionRoute::kIdentity;
    const Vec a = power_route(Power{sk->r, reg.scale()}, svd.s, ball.as<SchattenBall>()->p, rho,
                              out.iterations, inner);
    out.point = svd_compose(svd, a);
    out.route = ProjectionRoute::kSpectral;
  } else {
    exact = false;
  }
  if (!exact) return frank_wolfe(reg, ball, theta, opts);
  out.residual = fw_gap(reg, ball, theta, out.point);
  return out;
}

void require_input(const Regularizer& reg, const BallSpec& ball, std::span<const double> v,
                   const char* what) {
  require_same_dim(v.size(), reg.dim(), what);
  require_same_dim(ball.dim(), reg.dim(), what);
  if (!all_finite(v)) throw InvalidArgument(std::string(what) + ": non-finite input");
}

}  // namespace

const char* to_string(ProjectionRoute route) {
  switch (route) {
    case ProjectionRoute::kIdentity: return "identity";
    case ProjectionRoute::kRadial: return "radial";
    case ProjectionRoute::kNormalize: return "normalize";
    case ProjectionRoute::kThreshold: return "threshold";
    case ProjectionRoute::kSeparable: return "separable";
    case ProjectionRoute::kGroup: return "group";
    case ProjectionRoute::kSpectral: return "spectral";
    case ProjectionRoute::kFrankWolfe: return "frank-wolfe";
  }
  return "?";
}

ProjectionResult bregman_project(const Regularizer& reg, const BallSpec& w_ball,
                                 std::span<const double> y, const ProjectionOptions& opts) {
  require_input(reg, w_ball, y, "bregman_project");
  if (contains(w_ball, y, 0.0)) return project(reg, w_ball, y, y, opts);
  const Vec theta = psi_grad(reg, y);
  return project(reg, w_ball, y, theta, opts);
}

ProjectionResult bregman_project_dual(const Regularizer& reg, const BallSpec& w_ball,
                                      std::span<const double> theta,
                                      const ProjectionOptions& opts) {
  require_input(reg, w_ball, theta, "bregman_project_dual");
  const Vec y = psi_conj_grad(reg, theta);
  return project(reg, w_ball, y, theta, opts);
}

Vec dual_step(const Regularizer& reg, std::span<const double> w, std::span<const double> g,
              double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("dual_step: eta must be positive");
  require_same_dim(g.size(), w.size(), "dual_step");
  Vec theta = psi_grad(reg, w);
  axpy(-eta, g, theta);
  return psi_conj_grad(reg, theta);
}

}  // namespace mirrorgeo
