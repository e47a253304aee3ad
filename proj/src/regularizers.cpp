#include "mirrorgeo/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mirrorgeo/linalg.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_r(double r, const char* what) {
  if (!(r > 1.0) || !std::isfinite(r)) {
    throw InvalidArgument(std::string(what) + ": exponent must lie in (1, inf)");
  }
}

void require_scale(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("regularizer scale must be positive");
}

// psi_r pieces shared by the vector and Schatten kinds.
double psi_r_radial(double r, double s, double t) {
  if (r <= 2.0) return s * t * t / (2.0 * (r - 1.0));
  return s * std::pow(2.0, r) / r * std::pow(t, r);
}

double psi_r_eval(double r, double s, std::span<const double> w) {
  return psi_r_radial(r, s, lp_norm(w, Exponent(r)));
}

Vec psi_r_grad(double r, double s, std::span<const double> w) {
  Vec g(w.size(), 0.0);
  const double n = lp_norm(w, Exponent(r));
  if (n == 0.0) return g;
  if (r <= 2.0) {
    const double c = s / (r - 1.0) * n;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) g[i] = c * sign_of(w[i]) * std::pow(std::abs(w[i]) / n, r - 1.0);
    }
    return g;
  }
  const double c = s * std::pow(2.0, r);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) g[i] = c * sign_of(w[i]) * std::pow(std::abs(w[i]), r - 1.0);
  }
  return g;
}

Vec psi_r_conj_grad(double r, double s, std::span<const double> theta) {
  Vec w(theta.size(), 0.0);
  if (r <= 2.0) {
    const double t = r / (r - 1.0);
    const double n = lp_norm(theta, Exponent(t));
    if (n == 0.0) return w;
    const double c = (r - 1.0) / s * n;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (theta[i] != 0.0) w[i] = c * sign_of(theta[i]) * std::pow(std::abs(theta[i]) / n, t - 1.0);
    }
    return w;
  }
  const double cr = s * std::pow(2.0, r);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (theta[i] != 0.0) {
      w[i] = sign_of(theta[i]) * std::pow(std::abs(theta[i]) / cr, 1.0 / (r - 1.0));
    }
  }
  return w;
}

bool on_simplex(std::span<const double> w, double tol) {
  double sum = 0.0;
  for (double x : w) {
    if (x < -tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

// ||w||_{W,q} via the concave dual max_l <l, w> - (1/p) sum_i |<v_i, l>|^p. At the optimum
// l_hat, u = V^T l_hat gives ||w||_{W,q} = ||u||_p^{p-1} and its gradient is l_hat / ||u||_p.
struct HullNorm {
  double value;
  Vec grad;
};

HullNorm hull_q_norm(const VertexHullSquared& h, std::span<const double> w) {
  const std::size_t d = w.size();
  const std::size_t k = h.vertices.size();
  const double p = h.q / (h.q - 1.0);
  const double wn = norm2(w);
  if (wn == 0.0) return {0.0, Vec(d, 0.0)};

  const auto phi = [&](std::span<const double> lam) {
    double s = 0.0;
    for (const Vec& v : h.vertices) s += std::pow(std::abs(dot(v, lam)), p);
    return dot(lam, w) - s / p;
  };
  double sw = 0.0;
  for (const Vec& v : h.vertices) sw += std::pow(std::abs(dot(v, w)), p);
  if (!(sw > 0.0)) throw InvalidArgument("vertex hull norm: vector outside the vertex span");
  Vec lam = scaled(w, std::pow(wn * wn / sw, 1.0 / (p - 1.0)));

  Vec u(k), grad(d);
  constexpr int kMaxNewton = 200;
  for (int it = 0;; ++it) {
    Matrix hess(d, d);
    grad.assign(w.begin(), w.end());
    for (std::size_t i = 0; i < k; ++i) {
      const Vec& v = h.vertices[i];
      u[i] = dot(v, lam);
      const double a = std::abs(u[i]);
      if (a == 0.0) continue;
      axpy(-sign_of(u[i]) * std::pow(a, p - 1.0), v, grad);
      const double c = (p - 1.0) * std::pow(a, p - 2.0);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t s = 0; s < d; ++s) hess(r, s) += c * v[r] * v[s];
    }
    const double res = norm2(grad);
    if (res <= 1e-13 * wn) break;
    if (it == kMaxNewton) throw SolverError("vertex hull norm: Newton did not converge", res / wn);
    Vec step = grad;
    if (!cholesky_solve(hess, step)) {
      throw InvalidArgument("vertex hull norm: vertices do not span the space");
    }
    const double slope = dot(grad, step);
    const double f0 = phi(lam);
    double t = 1.0;
    Vec trial(d);
    // Near the optimum the Armijo test drowns in rounding; take full steps there.
    const bool damped = res > 1e-6 * wn;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < d; ++i) trial[i] = lam[i] + t * step[i];
      if (!damped || phi(trial) >= f0 + 0.25 * t * slope) break;
    }
    if (t * norm2(step) <= 1e-16 * norm2(lam)) {
      lam = trial;
      break;
    }
    lam = trial;
  }
  for (std::size_t i = 0; i < k; ++i) u[i] = dot(h.vertices[i], lam);
  const double un = lp_norm(u, Exponent(p));
  // The optimal dual value is ||w||^q / q; it is stationary in lam, unlike ||u||_p^{p-1}.
  const double value = std::pow(std::max(h.q * phi(lam), 0.0), 1.0 / h.q);
  return {value, scaled(lam, 1.0 / un)};
}

// sup of ||w||_r over an l_s ball of radius rho in dimension n.
double lp_in_lp(double rho, double n, double r, Exponent s) {
  return rho * std::pow(n, std::max(1.0 / r - s.reciprocal(), 0.0));
}

std::optional<double> radial_sup(const Regularizer& reg, const BallSpec& b) {
  // Psi = phi(||w||_r) with phi increasing: reduce to the largest l_r norm on the ball.
  double r;
  if (const auto* k = reg.as<PsiR>()) {
    r = k->r;
  } else if (reg.as<EuclideanHalfSq>()) {
    r = 2.0;
  } else {
    return std::nullopt;
  }
  const double s = reg.scale();
  const auto phi = [&](double t) {
    return reg.as<EuclideanHalfSq>() ? 0.5 * s * t * t : psi_r_radial(r, s, t);
  };
  if (const auto* lp = b.as<LpBall>()) {
    return phi(lp_in_lp(b.radius(), static_cast<double>(b.dim()), r, lp->p));
  }
  if (const auto* g = b.as<GroupBall>()) {
    return phi(b.radius() *
               std::pow(static_cast<double>(g->rows), std::max(1.0 / r - g->q.reciprocal(), 0.0)) *
               std::pow(static_cast<double>(g->cols), std::max(1.0 / r - g->r.reciprocal(), 0.0)));
  }
  return std::nullopt;
}

SupResult vertex_sup(const Regularizer& reg, const std::vector<Vec>& verts) {
  double best = 0.0;
  for (const Vec& v : verts) best = std::max(best, psi_eval(reg, v));
  return {best, true};
}

// Multi-start ascent: gradient steps with radial retraction onto the unit sphere of the gauge.
SupResult search_sup(const Regularizer& reg, const BallSpec& b) {
  const std::size_t d = b.dim();
  std::vector<Vec> starts;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d, 0.0);
    e[i] = 1.0;
    starts.push_back(e);
  }
  starts.push_back(Vec(d, 1.0));
  Vec alt(d);
  for (std::size_t i = 0; i < d; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  starts.push_back(alt);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  while (starts.size() < d + 2 + 64) {
    Vec v(d);
    for (double& x : v) x = normal(rng);
    starts.push_back(v);
  }
  const auto retract = [&](Vec v) -> std::optional<Vec> {
    const double g = gauge_norm(b, v);
    if (!(g > 0.0) || is_unbounded(g)) return std::nullopt;
    for (double& x : v) x /= g;
    return v;
  };
  double best = 0.0;
  for (const Vec& s0 : starts) {
    auto w = retract(s0);
    if (!w) continue;
    double val = psi_eval(reg, *w);
    double step = 0.5 * euclidean_radius_bound(b);
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
      const Vec g = psi_grad(reg, *w);
      const double gn = norm2(g);
      if (gn == 0.0) break;
      Vec trial = *w;
      axpy(step / gn, g, trial);
      const auto next = retract(trial);
      const double nv = next ? psi_eval(reg, *next) : -1.0;
      if (next && nv > val) {
        w = next;
        val = nv;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, val);
  }
  return {best, false};
}

}  // namespace

// ---------------------------------------------------------------------------

Regularizer::Regularizer(Kind kind, std::size_t dim, double scale, double q, BallSpec norm,
                         bool certified)
    : kind_(std::move(kind)), dim_(dim), scale_(scale), q_(q), norm_(std::move(norm)),
      certified_(certified) {
  require_scale(scale_);
  require_same_dim(norm_.dim(), dim_, "Regularizer convexity norm");
}

Regularizer Regularizer::psi_r(double r, std::size_t dim, double scale) {
  require_r(r, "psi_r");
  require_scale(scale);
  const double q = std::max(r, 2.0);
  return Regularizer(PsiR{r}, dim, scale, q, BallSpec::lp(r, dim, std::pow(scale, -1.0 / q)),
                     true);
}

Regularizer Regularizer::entropy(std::size_t dim) {
  return Regularizer(EntropyPsi{}, dim, 1.0, 2.0, BallSpec::lp(1.0, dim), true);
}

Regularizer Regularizer::euclidean(std::size_t dim, double scale) {
  require_scale(scale);
  return Regularizer(EuclideanHalfSq{}, dim, scale, 2.0,
                     BallSpec::lp(2.0, dim, 1.0 / std::sqrt(scale)), true);
}

Regularizer Regularizer::group_squared(double q, double r, std::size_t rows, std::size_t cols,
                                       double scale) {
  if (!(q > 1.0 && q <= 2.0 && r > 1.0 && r <= 2.0)) {
    throw InvalidArgument("group_squared: q and r must lie in (1, 2]");
  }
  require_scale(scale);
  // 0.5 ||.||_{q,r}^2 is min(q-1, r-1)-strongly convex w.r.t. ||.||_{q,r}.
  const double modulus = 2.0 * scale * std::min(q - 1.0, r - 1.0) / (q + r - 2.0);
  return Regularizer(GroupSquared{q, r, rows, cols}, rows * cols, scale, 2.0,
                     BallSpec::group(Exponent(q), Exponent(r), rows, cols, 1.0 / std::sqrt(modulus)),
                     true);
}

Regularizer Regularizer::vertex_hull_squared(double q, std::vector<Vec> vertices, double scale) {
  if (!(q > 1.0 && q <= 2.0)) throw InvalidArgument("vertex_hull_squared: q must lie in (1, 2]");
  if (vertices.empty()) throw InvalidArgument("vertex_hull_squared: no vertices");
  require_scale(scale);
  const std::size_t d = vertices.front().size();
  double vmax = 0.0;
  for (const Vec& v : vertices) {
    require_same_dim(v.size(), d, "vertex_hull_squared");
    vmax = std::max(vmax, lp_norm(v, Exponent::infinity()));
  }
  // ||w||_inf <= K^{1-1/q} max_i ||v_i||_inf ||w||_{W,q}.
  const double k = static_cast<double>(vertices.size());
  const double c = 1.0 / (std::pow(k, 1.0 - 1.0 / q) * vmax);
  return Regularizer(VertexHullSquared{q, std::move(vertices)}, d, scale, 2.0,
                     BallSpec::lp(Exponent::infinity(), d, 1.0 / (c * std::sqrt(scale))), true);
}

Regularizer Regularizer::schatten_psi_r(double r, std::size_t rows, std::size_t cols,
                                        double scale) {
  require_r(r, "schatten_psi_r");
  require_scale(scale);
  const double q = std::max(r, 2.0);
  return Regularizer(SchattenPsiR{r, rows, cols}, rows * cols, scale, q,
                     BallSpec::schatten(Exponent(r), rows, cols, std::pow(scale, -1.0 / q)), false);
}

Regularizer Regularizer::with_convexity_norm(BallSpec norm) const {
  return Regularizer(kind_, dim_, scale_, q_, std::move(norm), certified_);
}

std::string Regularizer::describe() const {
  std::string s = std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PsiR>) {
          return "psi_r(" + fmt(k.r) + ")";
        } else if constexpr (std::is_same_v<T, EntropyPsi>) {
          return "entropy";
        } else if constexpr (std::is_same_v<T, EuclideanHalfSq>) {
          return "euclidean";
        } else if constexpr (std::is_same_v<T, GroupSquared>) {
          return "group_squared(" + fmt(k.q) + "," + fmt(k.r) + "," + std::to_string(k.rows) + "," +
                 std::to_string(k.cols) + ")";
        } else if constexpr (std::is_same_v<T, VertexHullSquared>) {
          return "vertex_hull_squared(" + fmt(k.q) + ",K=" + std::to_string(k.vertices.size()) + ")";
        } else {
          return "schatten_psi_r(" + fmt(k.r) + "," + std::to_string(k.rows) + "," +
                 std::to_string(k.cols) + ")";
        }
      },
      kind_);
  if (scale_ != 1.0) s += "*" + fmt(scale_);
  return s;
}

// ---------------------------------------------------------------------------

double psi_eval(const Regularizer& reg, std::span<const double> w) {
  require_same_dim(w.size(), reg.dim(), "psi_eval");
  const double s = reg.scale();
  if (const auto* k = reg.as<PsiR>()) return psi_r_eval(k->r, s, w);
  if (reg.as<EuclideanHalfSq>()) {
    const double n = norm2(w);
    return 0.5 * s * n * n;
  }
  if (reg.as<EntropyPsi>()) {
    if (!on_simplex(w, 1e-9)) throw InvalidArgument("entropy: point is off the simplex");
    const double d = static_cast<double>(w.size());
    double v = 0.0;
    for (double x : w)
      if (x > 0.0) v += x * std::log(d * x);
    return s * std::max(v, 0.0);
  }
  if (const auto* k = reg.as<GroupSquared>()) {
    const BallSpec g = BallSpec::group(Exponent(k->q), Exponent(k->r), k->rows, k->cols);
    const double n = gauge_norm(g, w);
    return s * n * n / (k->q + k->r - 2.0);
  }
  if (const auto* k = reg.as<VertexHullSquared>()) {
    const double n = hull_q_norm(*k, w).value;
    return s * n * n / (2.0 * (k->q - 1.0));
  }
  const auto& k = std::get<SchattenPsiR>(reg.kind());
  return psi_r_eval(k.r, s, schatten_singular_values(w, k.rows, k.cols));
}

Vec psi_grad(const Regularizer& reg, std::span<const double> w) {
  require_same_dim(w.size(), reg.dim(), "psi_grad");
  const double s = reg.scale();
  if (const auto* k = reg.as<PsiR>()) return psi_r_grad(k->r, s, w);
  if (reg.as<EuclideanHalfSq>()) return scaled(w, s);
  if (reg.as<EntropyPsi>()) {
    const double d = static_cast<double>(w.size());
    Vec g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      g[i] = s * (std::log(d * std::max(w[i], kEntropyFloor)) + 1.0);
    }
    return g;
  }
  if (const auto* k = reg.as<GroupSquared>()) {
    const BallSpec g = BallSpec::group(Exponent(k->q), Exponent(k->r), k->rows, k->cols);
    const double n = gauge_norm(g, w);
    return scaled(gauge_subgradient(g, w), 2.0 * s * n / (k->q + k->r - 2.0));
  }
  if (const auto* k = reg.as<VertexHullSquared>()) {
    const HullNorm hn = hull_q_norm(*k, w);
    return scaled(hn.grad, s * hn.value / (k->q - 1.0));
  }
  const auto& k = std::get<SchattenPsiR>(reg.kind());
  const SvdResult svd = jacobi_svd(Matrix::from_flat(k.rows, k.cols, w));
  return svd_compose(svd, psi_r_grad(k.r, s, svd.s));
}

Vec psi_conj_grad(const Regularizer& reg, std::span<const double> theta) {
  require_same_dim(theta.size(), reg.dim(), "psi_conj_grad");
  if (!all_finite(theta)) throw InvalidArgument("psi_conj_grad: non-finite input");
  const double s = reg.scale();
  if (const auto* k = reg.as<PsiR>()) return psi_r_conj_grad(k->r, s, theta);
  if (reg.as<EuclideanHalfSq>()) return scaled(theta, 1.0 / s);
  if (reg.as<EntropyPsi>()) {
    const double m = *std::max_element(theta.begin(), theta.end());
    Vec w(theta.size());
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] = std::exp((theta[i] - m) / s));
    for (double& x : w) x /= z;
    return w;
  }
  if (const auto* k = reg.as<GroupSquared>()) {
    // Psi* = (q + r - 2) ||theta||_{q*,r*}^2 / (4 s).
    const BallSpec g = BallSpec::group(holder_conjugate(Exponent(k->q)),
                                       holder_conjugate(Exponent(k->r)), k->rows, k->cols);
    const double n = gauge_norm(g, theta);
    return scaled(gauge_subgradient(g, theta), n * (k->q + k->r - 2.0) / (2.0 * s));
  }
  if (const auto* k = reg.as<VertexHullSquared>()) {
    // Psi* = (q-1)/(2s) ||V^T theta||_p^2.
    const double p = k->q / (k->q - 1.0);
    const std::size_t kk = k->vertices.size();
    Vec u(kk);
    for (std::size_t i = 0; i < kk; ++i) u[i] = dot(k->vertices[i], theta);
    const double un = lp_norm(u, Exponent(p));
    Vec w(theta.size(), 0.0);
    if (un == 0.0) return w;
    for (std::size_t i = 0; i < kk; ++i) {
      if (u[i] == 0.0) continue;
      axpy((k->q - 1.0) / s * un * sign_of(u[i]) * std::pow(std::abs(u[i]) / un, p - 1.0),
           k->vertices[i], w);
    }
    return w;
  }
  const auto& k = std::get<SchattenPsiR>(reg.kind());
  const SvdResult svd = jacobi_svd(Matrix::from_flat(k.rows, k.cols, theta));
  return svd_compose(svd, psi_r_conj_grad(k.r, s, svd.s));
}

double bregman_divergence(const Regularizer& reg, std::span<const double> a,
                          std::span<const double> b) {
  const Vec gb = psi_grad(reg, b);
  return psi_eval(reg, a) - psi_eval(reg, b) - dot(gb, sub(a, b));
}

// ---------------------------------------------------------------------------

SupResult sup_over_ball(const Regularizer& reg, const BallSpec& b) {
  require_same_dim(b.dim(), reg.dim(), "sup_over_ball");
  if (reg.as<EntropyPsi>()) {
    if (!b.is_simplex()) throw InvalidArgument("entropy is only defined on the simplex");
    return {reg.scale() * std::log(static_cast<double>(b.dim())), true};
  }
  if (const auto* i2 = b.as<Interp2Ball>()) {
    // conv(A u B): a convex function peaks on one of the two pieces.
    if (b.radius() == 1.0) {
      const SupResult a = sup_over_ball(reg, *i2->a);
      const SupResult c = sup_over_ball(reg, *i2->b);
      return {std::max(a.value, c.value), a.certified && c.certified};
    }
  }
  if (const auto v = radial_sup(reg, b)) return {*v, true};
  if (const auto* k = reg.as<GroupSquared>()) {
    const double c = reg.scale() / (k->q + k->r - 2.0);
    const GroupBall* g = b.as<GroupBall>();
    if (g && g->rows == k->rows && g->cols == k->cols) {
      const double n = b.radius() *
                       std::pow(static_cast<double>(k->rows), std::max(1.0 / k->q - g->q.reciprocal(), 0.0)) *
                       std::pow(static_cast<double>(k->cols), std::max(1.0 / k->r - g->r.reciprocal(), 0.0));
      return {c * n * n, true};
    }
    if (const auto* lp = b.as<LpBall>()) {
      const double n = b.radius() *
                       std::pow(static_cast<double>(k->rows), std::max(1.0 / k->q - lp->p.reciprocal(), 0.0)) *
                       std::pow(static_cast<double>(k->cols), std::max(1.0 / k->r - lp->p.reciprocal(), 0.0));
      return {c * n * n, true};
    }
  }
  if (const auto* k = reg.as<SchattenPsiR>()) {
    const SchattenBall* sb = b.as<SchattenBall>();
    if (sb && sb->rows == k->rows && sb->cols == k->cols) {
      const double m = static_cast<double>(std::min(k->rows, k->cols));
      return {psi_r_radial(k->r, reg.scale(), lp_in_lp(b.radius(), m, k->r, sb->p)), true};
    }
  }
  if (const auto verts = extreme_points(b)) return vertex_sup(reg, *verts);
  return search_sup(reg, b);
}

double d_p_upper(const Regularizer& reg, const BallSpec& w_ball, double p) {
  if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("d_p_upper: p must lie in (1, 2]");
  return std::pow(sup_over_ball(reg, w_ball).value, (p - 1.0) / p);
}

Regularizer scaled_psi_for_lp_pair(Exponent p1, Exponent p2, std::size_t d, double r) {
  (void)p1;
  require_r(r, "scaled_psi_for_lp_pair");
  if (d == 0) throw InvalidArgument("scaled_psi_for_lp_pair: d must be positive");
  const Exponent q2 = holder_conjugate(p2);
  const double big_q = std::max(r, 2.0);
  const double scale =
      std::pow(static_cast<double>(d), big_q * std::max(q2.reciprocal() - 1.0 / r, 0.0));
  return Regularizer::psi_r(r, d, scale).with_convexity_norm(BallSpec::lp(q2, d));
}

double lp_regret_bound(Exponent p1, Exponent p2, std::size_t d, double r, long n) {
  require_r(r, "lp_regret_bound");
  if (n < 1) throw InvalidArgument("lp_regret_bound: n must be positive");
  const double q2inv = holder_conjugate(p2).reciprocal();
  const double e = std::max(q2inv - 1.0 / r, 0.0) + std::max(1.0 / r - p1.reciprocal(), 0.0);
  return 2.0 * std::max(2.0, 1.0 / std::sqrt(2.0 * (r - 1.0))) *
         std::pow(static_cast<double>(d), e) /
         std::pow(static_cast<double>(n), 1.0 / std::max(r, 2.0));
}

double pick_r(Exponent p1, Exponent p2, std::size_t d, long n, double r_max) {
  constexpr int kGrid = 200;
  const double lo = 1.0 + 1e-3;
  if (!(r_max > lo)) throw InvalidArgument("pick_r: r_max too small");
  std::vector<double> grid;
  for (int i = 0; i < kGrid; ++i) {
    grid.push_back(std::exp(std::log(lo) + (std::log(r_max) - std::log(lo)) * i / (kGrid - 1)));
  }
  if (r_max >= 2.0) grid.push_back(2.0);
  double best_r = grid.front();
  double best = lp_regret_bound(p1, p2, d, best_r, n);
  for (double r : grid) {
    const double v = lp_regret_bound(p1, p2, d, r, n);
    const bool tie = std::abs(v - best) <= 1e-12 * best;
    if ((v < best && !tie) || (tie && std::abs(r - 2.0) < std::abs(best_r - 2.0))) {
      best = std::min(best, v);
      best_r = r;
    }
  }
  return best_r;
}

Regularizer group_regularizer_for_linf(double q, std::size_t rows, std::size_t cols) {
  const double ld = std::log(static_cast<double>(cols));
  const double r = ld > 2.0 ? ld / (ld - 1.0) : 2.0;
  const double c = std::pow(static_cast<double>(rows), 1.0 - 1.0 / q) *
                   std::pow(static_cast<double>(cols), 1.0 - 1.0 / r);
  // ||w||_1 <= c ||w||_{q,r}; pick the scale so the modulus w.r.t. ||.||_{q,r} is c^2.
  const double scale = c * c * (q + r - 2.0) / (2.0 * std::min(q - 1.0, r - 1.0));
  return Regularizer::group_squared(q, r, rows, cols, scale)
      .with_convexity_norm(BallSpec::lp(1.0, rows * cols));
}

Regularizer vertex_hull_regularizer_for(const std::vector<Vec>& vertices, const BallSpec& x_ball) {
  const auto xstar = dual_ball(x_ball);
  if (!xstar) throw InvalidArgument("vertex_hull_regularizer_for: X needs a closed-form dual");
  const double k = static_cast<double>(vertices.size());
  const double lk = std::log(k);
  const double q = lk > 2.0 ? lk / (lk - 1.0) : 2.0;
  double m = 0.0;
  for (const Vec& v : vertices) m = std::max(m, dual_norm(x_ball, v));
  // ||w||_{X*} <= K^{1-1/q} max_i ||v_i||_{X*} ||w||_{W,q}.
  const double c = std::pow(k, 1.0 - 1.0 / q) * m;
  return Regularizer::vertex_hull_squared(q, vertices, c * c).with_convexity_norm(*xstar);
}

}  // namespace mirrorgeo
