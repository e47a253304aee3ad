#include "mirrorgeo/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mirrorgeo/linalg.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

constexpr int kEllipsoidMaxIterations = 400000;

void require_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("ball radius must be positive and finite");
  }
}

std::string fmt_double(double x) {
  if (std::isinf(x)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Unit l_p support direction: argmax <x, w> over ||w||_p <= 1.
Vec lp_support_unit(std::span<const double> x, Exponent p) {
  const std::size_t n = x.size();
  Vec dir(x.begin(), x.end());
  if (std::all_of(dir.begin(), dir.end(), [](double v) { return v == 0.0; })) {
    std::fill(dir.begin(), dir.end(), 1.0);
  }
  Vec w(n, 0.0);
  if (p.is_infinite()) {
    for (std::size_t i = 0; i < n; ++i) w[i] = sign_of(dir[i]);
    return w;
  }
  if (p.value() == 1.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(dir[i]) > std::abs(dir[best])) best = i;
    w[best] = sign_of(dir[best]);
    return w;
  }
  const double q = holder_conjugate(p).value();
  double m = 0.0;
  for (double v : dir) m = std::max(m, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = dir[i] == 0.0 ? 0.0 : sign_of(dir[i]) * std::pow(std::abs(dir[i]) / m, q - 1.0);
  }
  const double norm = lp_norm(w, p);
  for (double& v : w) v /= norm;
  return w;
}

// s with <s, v> = ||v||_p and ||s||_{p*} <= 1.
Vec lp_subgradient(std::span<const double> v, Exponent p) {
  const std::size_t n = v.size();
  Vec s(n, 0.0);
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return s;
  if (p.is_infinite()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[best])) best = i;
    s[best] = sign_of(v[best]);
    return s;
  }
  const double pv = p.value();
  if (pv == 1.0) {
    for (std::size_t i = 0; i < n; ++i) s[i] = v[i] == 0.0 ? 0.0 : sign_of(v[i]);
    return s;
  }
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = v[i] == 0.0 ? 0.0 : sign_of(v[i]) * std::pow(std::abs(v[i]) / m, pv - 1.0);
  }
  const double dn = lp_norm(s, holder_conjugate(p));
  for (double& x : s) x /= dn;
  return s;
}

std::span<const double> column(std::span<const double> flat, const GroupBall& g, std::size_t j) {
  return flat.subspan(j * g.rows, g.rows);
}

Vec group_column_norms(std::span<const double> flat, const GroupBall& g, Exponent e) {
  Vec c(g.cols);
  for (std::size_t j = 0; j < g.cols; ++j) c[j] = lp_norm(column(flat, g, j), e);
  return c;
}

Matrix as_matrix(std::span<const double> flat, std::size_t rows, std::size_t cols) {
  return Matrix::from_flat(rows, cols, flat);
}

// U diag(s) V^T flattened row-major.
Vec compose_svd(const SvdResult& svd, std::span<const double> s) {
  const std::size_t m = svd.u.rows, n = svd.v.rows, k = s.size();
  Vec out(m * n, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    if (s[t] == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double ui = svd.u(i, t) * s[t];
      if (ui == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += ui * svd.v(j, t);
    }
  }
  return out;
}

double vertex_hull_gauge_unit(const VertexHullBall& h, std::span<const double> v, Vec* dual) {
  const std::size_t d = v.size();
  const std::size_t k = h.vertices.size();
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    if (dual) dual->assign(d, 0.0);
    return 0.0;
  }
  LinearProgram lp{Matrix(d, 2 * k), Vec(v.begin(), v.end()), Vec(2 * k, 1.0)};
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      lp.a(i, j) = h.vertices[j][i];
      lp.a(i, k + j) = -h.vertices[j][i];
    }
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::kInfeasible) {
    if (dual) dual->assign(d, 0.0);
    return kUnboundedGauge;
  }
  if (sol.status != LpStatus::kOptimal) throw SolverError("vertex hull gauge LP failed", 0.0);
  if (dual) *dual = sol.dual;
  return sol.objective;
}

// Bound on ||x||_2 over the polar body {x : support(x) <= 1}.
double polar_radius_bound(const BallSpec& b) {
  const double d = static_cast<double>(b.dim());
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) {
    return std::pow(d, std::max(lp->p.reciprocal() - 0.5, 0.0)) / rho;
  }
  if (const auto* g = b.as<GroupBall>()) {
    return std::pow(static_cast<double>(g->rows), std::max(g->q.reciprocal() - 0.5, 0.0)) *
           std::pow(static_cast<double>(g->cols), std::max(g->r.reciprocal() - 0.5, 0.0)) / rho;
  }
  if (const auto* s = b.as<SchattenBall>()) {
    return std::pow(static_cast<double>(std::min(s->rows, s->cols)),
                    std::max(s->p.reciprocal() - 0.5, 0.0)) /
           rho;
  }
  if (b.is_simplex()) return std::sqrt(d);
  double worst = 0.0;
  Vec e(b.dim(), 0.0);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    e[i] = 1.0;
    worst = std::max(worst, gauge_norm(b, e));
    e[i] = 0.0;
  }
  return std::sqrt(d) * worst;
}

struct SupportSolve {
  double value;
  Vec point;
};

// max <x, w> s.t. gauge_a(w) + gauge_b(w) <= 1.
SupportSolve interp1_support(const Interp1Ball& ib, std::span<const double> x) {
  const std::size_t d = x.size();
  const double xn = norm2(x);
  if (xn == 0.0) return {0.0, Vec(d, 0.0)};
  const double radius = std::min(euclidean_radius_bound(*ib.a), euclidean_radius_bound(*ib.b));
  EllipsoidOracle oracle = [&](std::span<const double> w, Vec& grad) -> std::optional<double> {
    const double ga = gauge_norm(*ib.a, w);
    const double gb = gauge_norm(*ib.b, w);
    if (is_unbounded(ga) || is_unbounded(gb)) {
      throw SolverError("interpolation components must span the space", 0.0);
    }
    if (ga + gb <= 1.0) {
      for (std::size_t i = 0; i < d; ++i) grad[i] = -x[i];
      return -dot(x, w);
    }
    const Vec sa = gauge_subgradient(*ib.a, w);
    const Vec sb = gauge_subgradient(*ib.b, w);
    for (std::size_t i = 0; i < d; ++i) grad[i] = sa[i] + sb[i];
    return std::nullopt;
  };
  EllipsoidRetraction retract = [&](std::span<const double> w) -> std::optional<Vec> {
    const double g = gauge_norm(*ib.a, w) + gauge_norm(*ib.b, w);
    if (!(g > 0.0) || is_unbounded(g)) return std::nullopt;
    return scaled(w, 1.0 / g);
  };
  const Vec center(d, 0.0);
  const EllipsoidResult r = ellipsoid_minimize(oracle, center, radius, 1e-12 * xn * radius,
                                               kEllipsoidMaxIterations, retract);
  if (!r.found_feasible) throw SolverError("interp1 support solve found no feasible point", 0.0);
  return {-r.best_value, r.best_point};
}

// max <v, x> s.t. support_a(x) <= 1, support_b(x) <= 1; the value is the interp2 gauge.
SupportSolve interp2_gauge(const Interp2Ball& ib, std::span<const double> v) {
  const std::size_t d = v.size();
  const double vn = norm2(v);
  if (vn == 0.0) return {0.0, Vec(d, 0.0)};
  const double ga = gauge_norm(*ib.a, v);
  const double gb = gauge_norm(*ib.b, v);
  const double radius = std::min(polar_radius_bound(*ib.a), polar_radius_bound(*ib.b));
  if (!std::isfinite(radius)) throw SolverError("interp2 polar body is unbounded", 0.0);
  EllipsoidOracle oracle = [&](std::span<const double> x, Vec& grad) -> std::optional<double> {
    const double ha = dual_norm(*ib.a, x);
    const double hb = dual_norm(*ib.b, x);
    if (ha <= 1.0 && hb <= 1.0) {
      for (std::size_t i = 0; i < d; ++i) grad[i] = -v[i];
      return -dot(v, x);
    }
    grad = support_point(ha >= hb ? *ib.a : *ib.b, x);
    return std::nullopt;
  };
  EllipsoidRetraction retract = [&](std::span<const double> x) -> std::optional<Vec> {
    const double h = std::max(dual_norm(*ib.a, x), dual_norm(*ib.b, x));
    if (!(h > 0.0)) return std::nullopt;
    return scaled(x, 1.0 / h);
  };
  const Vec center(d, 0.0);
  const EllipsoidResult r = ellipsoid_minimize(oracle, center, radius, 1e-12 * vn * radius,
                                               kEllipsoidMaxIterations, retract);
  if (!r.found_feasible) throw SolverError("interp2 gauge solve found no feasible point", 0.0);
  // Decomposing entirely into one component is feasible, so the gauge never exceeds min(ga, gb).
  return {std::min({-r.best_value, ga, gb}), r.best_point};
}

void require_dim(const BallSpec& b, std::span<const double> v, const char* what) {
  require_same_dim(v.size(), b.dim(), what);
}

std::vector<Vec> signed_basis(std::size_t d, double scale) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d, 0.0);
    e[i] = scale;
    out.push_back(e);
    e[i] = -scale;
    out.push_back(e);
  }
  return out;
}

// Sign vectors in lexicographic order with + before -.
std::vector<Vec> sign_vectors(std::size_t d, double scale) {
  std::vector<Vec> out;
  const std::size_t count = std::size_t{1} << d;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vec v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> (d - 1 - i)) & 1u ? -scale : scale;
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Vec>> polyhedral_lp_vertices(Exponent p, std::size_t d, double scale,
                                                       std::size_t limit) {
  if (d == 1) return std::vector<Vec>{Vec{scale}, Vec{-scale}};
  if (p.is_infinite()) {
    if (d >= 63 || (std::size_t{1} << d) > limit) return std::nullopt;
    return sign_vectors(d, scale);
  }
  if (p.value() == 1.0) {
    if (2 * d > limit) return std::nullopt;
    return signed_basis(d, scale);
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// BallSpec

BallSpec::BallSpec(Kind kind, std::size_t dim, double radius)
    : kind_(std::move(kind)), dim_(dim), radius_(radius) {
  if (dim_ == 0) throw InvalidArgument("ball dimension must be positive");
  require_radius(radius_);
}

BallSpec BallSpec::lp(Exponent p, std::size_t dim, double radius) {
  return BallSpec(LpBall{p}, dim, radius);
}

BallSpec BallSpec::group(Exponent q, Exponent r, std::size_t rows, std::size_t cols,
                         double radius) {
  return BallSpec(GroupBall{q, r, rows, cols}, rows * cols, radius);
}

BallSpec BallSpec::schatten(Exponent p, std::size_t rows, std::size_t cols, double radius) {
  return BallSpec(SchattenBall{p, rows, cols}, rows * cols, radius);
}

BallSpec BallSpec::vertex_hull(std::vector<Vec> vertices, double radius) {
  if (vertices.empty()) throw InvalidArgument("vertex hull needs at least one vertex");
  const std::size_t d = vertices.front().size();
  for (const Vec& v : vertices) {
    require_same_dim(v.size(), d, "vertex_hull");
    if (!all_finite(v)) throw InvalidArgument("vertex hull: non-finite vertex");
  }
  return BallSpec(VertexHullBall{std::move(vertices)}, d, radius);
}

BallSpec BallSpec::simplex(std::size_t dim) { return BallSpec(SimplexBall{}, dim, 1.0); }

BallSpec BallSpec::interp1(const BallSpec& a, const BallSpec& b, double radius) {
  require_same_dim(a.dim(), b.dim(), "interp1");
  return BallSpec(Interp1Ball{std::make_shared<const BallSpec>(a), std::make_shared<const BallSpec>(b)},
                  a.dim(), radius);
}

BallSpec BallSpec::interp2(const BallSpec& a, const BallSpec& b, double radius) {
  require_same_dim(a.dim(), b.dim(), "interp2");
  return BallSpec(Interp2Ball{std::make_shared<const BallSpec>(a), std::make_shared<const BallSpec>(b)},
                  a.dim(), radius);
}

BallSpec BallSpec::with_radius(double radius) const {
  if (is_simplex()) throw InvalidArgument("the simplex cannot be rescaled");
  return BallSpec(kind_, dim_, radius);
}

std::string BallSpec::describe() const {
  std::string s = std::visit(
      [&](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LpBall>) {
          return "lp(" + k.p.to_string() + ")";
        } else if constexpr (std::is_same_v<T, GroupBall>) {
          return "group(" + k.q.to_string() + "," + k.r.to_string() + "," +
                 std::to_string(k.rows) + "," + std::to_string(k.cols) + ")";
        } else if constexpr (std::is_same_v<T, SchattenBall>) {
          return "schatten(" + k.p.to_string() + "," + std::to_string(k.rows) + "," +
                 std::to_string(k.cols) + ")";
        } else if constexpr (std::is_same_v<T, VertexHullBall>) {
          std::string out = "hull[";
          for (std::size_t i = 0; i < k.vertices.size(); ++i) {
            if (i) out += ",";
            out += "(";
            for (std::size_t j = 0; j < k.vertices[i].size(); ++j) {
              if (j) out += ",";
              out += fmt_double(k.vertices[i][j]);
            }
            out += ")";
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, SimplexBall>) {
          return "simplex";
        } else if constexpr (std::is_same_v<T, Interp1Ball>) {
          return "interp1(" + k.a->describe() + ";" + k.b->describe() + ")";
        } else {
          return "interp2(" + k.a->describe() + ";" + k.b->describe() + ")";
        }
      },
      kind_);
  if (radius_ != 1.0) s += "*" + fmt_double(radius_);
  return s;
}

GeometryPair::GeometryPair(BallSpec w, BallSpec x) : w_ball(std::move(w)), x_ball(std::move(x)) {
  require_same_dim(w_ball.dim(), x_ball.dim(), "GeometryPair");
}

// ---------------------------------------------------------------------------
// Norms

double gauge_norm(const BallSpec& b, std::span<const double> v) {
  require_dim(b, v, "gauge_norm");
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) return lp_norm(v, lp->p) / rho;
  if (b.is_simplex()) return lp_norm(v, Exponent(1.0));
  if (const auto* g = b.as<GroupBall>()) {
    return lp_norm(group_column_norms(v, *g, g->q), g->r) / rho;
  }
  if (const auto* s = b.as<SchattenBall>()) {
    return lp_norm(schatten_singular_values(v, s->rows, s->cols), s->p) / rho;
  }
  if (const auto* h = b.as<VertexHullBall>()) return vertex_hull_gauge_unit(*h, v, nullptr) / rho;
  if (const auto* i1 = b.as<Interp1Ball>()) {
    return (gauge_norm(*i1->a, v) + gauge_norm(*i1->b, v)) / rho;
  }
  const auto& i2 = std::get<Interp2Ball>(b.kind());
  return interp2_gauge(i2, v).value / rho;
}

double dual_norm(const BallSpec& b, std::span<const double> x) {
  require_dim(b, x, "dual_norm");
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) return rho * lp_norm(x, holder_conjugate(lp->p));
  if (b.is_simplex()) return lp_norm(x, Exponent::infinity());
  if (const auto* g = b.as<GroupBall>()) {
    return rho * lp_norm(group_column_norms(x, *g, holder_conjugate(g->q)), holder_conjugate(g->r));
  }
  if (const auto* s = b.as<SchattenBall>()) {
    return rho * lp_norm(schatten_singular_values(x, s->rows, s->cols), holder_conjugate(s->p));
  }
  if (const auto* h = b.as<VertexHullBall>()) {
    double m = 0.0;
    for (const Vec& v : h->vertices) m = std::max(m, std::abs(dot(x, v)));
    return rho * m;
  }
  if (const auto* i1 = b.as<Interp1Ball>()) return rho * interp1_support(*i1, x).value;
  const auto& i2 = std::get<Interp2Ball>(b.kind());
  return rho * std::max(dual_norm(*i2.a, x), dual_norm(*i2.b, x));
}

double support_function(const BallSpec& b, std::span<const double> x) {
  if (b.is_simplex()) {
    require_dim(b, x, "support_function");
    return *std::max_element(x.begin(), x.end());
  }
  return dual_norm(b, x);
}

Vec support_point(const BallSpec& b, std::span<const double> x) {
  require_dim(b, x, "support_point");
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) return scaled(lp_support_unit(x, lp->p), rho);
  if (b.is_simplex()) {
    Vec e(b.dim(), 0.0);
    e[static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin())] = 1.0;
    return e;
  }
  if (const auto* g = b.as<GroupBall>()) {
    const Exponent qs = holder_conjugate(g->q);
    const Vec outer = lp_support_unit(group_column_norms(x, *g, qs), g->r);
    Vec w(b.dim(), 0.0);
    for (std::size_t j = 0; j < g->cols; ++j) {
      if (outer[j] == 0.0) continue;
      const Vec inner = lp_support_unit(column(x, *g, j), g->q);
      for (std::size_t i = 0; i < g->rows; ++i) w[j * g->rows + i] = rho * outer[j] * inner[i];
    }
    return w;
  }
  if (const auto* s = b.as<SchattenBall>()) {
    const SvdResult svd = jacobi_svd(as_matrix(x, s->rows, s->cols));
    return scaled(compose_svd(svd, lp_support_unit(svd.s, s->p)), rho);
  }
  if (const auto* h = b.as<VertexHullBall>()) {
    Vec dir(x.begin(), x.end());
    if (std::all_of(dir.begin(), dir.end(), [](double v) { return v == 0.0; })) {
      std::fill(dir.begin(), dir.end(), 1.0);
    }
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < h->vertices.size(); ++i) {
      const double val = std::abs(dot(dir, h->vertices[i]));
      if (val > best_val) {
        best_val = val;
        best = i;
      }
    }
    return scaled(h->vertices[best], rho * sign_of(dot(dir, h->vertices[best])));
  }
  if (const auto* i1 = b.as<Interp1Ball>()) {
    Vec dir(x.begin(), x.end());
    if (std::all_of(dir.begin(), dir.end(), [](double v) { return v == 0.0; })) {
      std::fill(dir.begin(), dir.end(), 1.0);
    }
    return scaled(interp1_support(*i1, dir).point, rho);
  }
  const auto& i2 = std::get<Interp2Ball>(b.kind());
  const BallSpec& pick = dual_norm(*i2.a, x) >= dual_norm(*i2.b, x) ? *i2.a : *i2.b;
  return scaled(support_point(pick, x), rho);
}

Vec lmo(const BallSpec& b, std::span<const double> g) { return support_point(b, scaled(g, -1.0)); }

Vec gauge_subgradient(const BallSpec& b, std::span<const double> v) {
  require_dim(b, v, "gauge_subgradient");
  const double inv = 1.0 / b.radius();
  if (const auto* lp = b.as<LpBall>()) return scaled(lp_subgradient(v, lp->p), inv);
  if (b.is_simplex()) return lp_subgradient(v, Exponent(1.0));
  if (const auto* g = b.as<GroupBall>()) {
    const Vec outer = lp_subgradient(group_column_norms(v, *g, g->q), g->r);
    Vec s(b.dim(), 0.0);
    for (std::size_t j = 0; j < g->cols; ++j) {
      if (outer[j] == 0.0) continue;
      const Vec inner = lp_subgradient(column(v, *g, j), g->q);
      for (std::size_t i = 0; i < g->rows; ++i) s[j * g->rows + i] = inv * outer[j] * inner[i];
    }
    return s;
  }
  if (const auto* sc = b.as<SchattenBall>()) {
    const SvdResult svd = jacobi_svd(as_matrix(v, sc->rows, sc->cols));
    return scaled(compose_svd(svd, lp_subgradient(svd.s, sc->p)), inv);
  }
  if (const auto* h = b.as<VertexHullBall>()) {
    Vec dual;
    vertex_hull_gauge_unit(*h, v, &dual);
    return scaled(dual, inv);
  }
  if (const auto* i1 = b.as<Interp1Ball>()) {
    return scaled(add(gauge_subgradient(*i1->a, v), gauge_subgradient(*i1->b, v)), inv);
  }
  const auto& i2 = std::get<Interp2Ball>(b.kind());
  return scaled(interp2_gauge(i2, v).point, inv);
}

bool contains(const BallSpec& b, std::span<const double> v, double tol) {
  require_dim(b, v, "contains");
  if (tol < 0.0) throw InvalidArgument("contains: negative tolerance");
  if (b.is_simplex()) {
    double sum = 0.0;
    for (double x : v) {
      if (x < -tol) return false;
      sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
  }
  return gauge_norm(b, v) <= 1.0 + tol;
}

Vec schatten_singular_values(std::span<const double> flat, std::size_t rows, std::size_t cols) {
  return jacobi_svd(as_matrix(flat, rows, cols)).s;
}

std::optional<std::vector<Vec>> extreme_points(const BallSpec& b, std::size_t limit) {
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) return polyhedral_lp_vertices(lp->p, b.dim(), rho, limit);
  if (b.is_simplex()) {
    if (b.dim() > limit) return std::nullopt;
    std::vector<Vec> out;
    for (std::size_t i = 0; i < b.dim(); ++i) {
      Vec e(b.dim(), 0.0);
      e[i] = 1.0;
      out.push_back(std::move(e));
    }
    return out;
  }
  if (const auto* h = b.as<VertexHullBall>()) {
    if (2 * h->vertices.size() > limit) return std::nullopt;
    std::vector<Vec> out;
    for (const Vec& v : h->vertices) {
      out.push_back(scaled(v, rho));
      out.push_back(scaled(v, -rho));
    }
    return out;
  }
  if (const auto* g = b.as<GroupBall>()) {
    const auto col = polyhedral_lp_vertices(g->q, g->rows, 1.0, limit);
    if (!col) return std::nullopt;
    std::vector<Vec> out;
    const auto place = [&](Vec& w, std::size_t j, const Vec& cv) {
      for (std::size_t i = 0; i < g->rows; ++i) w[j * g->rows + i] = rho * cv[i];
    };
    if (g->cols == 1 || (!g->r.is_infinite() && g->r.value() == 1.0)) {
      if (g->cols * col->size() > limit) return std::nullopt;
      for (std::size_t j = 0; j < g->cols; ++j)
        for (const Vec& cv : *col) {
          Vec w(b.dim(), 0.0);
          place(w, j, cv);
          out.push_back(std::move(w));
        }
      return out;
    }
    if (!g->r.is_infinite()) return std::nullopt;
    double count = std::pow(static_cast<double>(col->size()), static_cast<double>(g->cols));
    if (count > static_cast<double>(limit)) return std::nullopt;
    std::vector<std::size_t> idx(g->cols, 0);
    while (true) {
      Vec w(b.dim(), 0.0);
      for (std::size_t j = 0; j < g->cols; ++j) place(w, j, (*col)[idx[j]]);
      out.push_back(std::move(w));
      std::size_t j = g->cols;
      while (j > 0) {
        --j;
        if (++idx[j] < col->size()) break;
        idx[j] = 0;
        if (j == 0) return out;
      }
    }
  }
  return std::nullopt;
}

std::optional<BallSpec> dual_ball(const BallSpec& b) {
  const double inv = 1.0 / b.radius();
  if (const auto* lp = b.as<LpBall>()) return BallSpec::lp(holder_conjugate(lp->p), b.dim(), inv);
  if (b.is_simplex()) return BallSpec::lp(Exponent::infinity(), b.dim());
  if (const auto* g = b.as<GroupBall>()) {
    return BallSpec::group(holder_conjugate(g->q), holder_conjugate(g->r), g->rows, g->cols, inv);
  }
  if (const auto* s = b.as<SchattenBall>()) {
    return BallSpec::schatten(holder_conjugate(s->p), s->rows, s->cols, inv);
  }
  return std::nullopt;
}

Vec sample_in_ball(const BallSpec& b, std::mt19937_64& rng) {
  const std::size_t d = b.dim();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (b.is_simplex()) {
    std::exponential_distribution<double> expo(1.0);
    Vec w(d);
    double s = 0.0;
    for (double& x : w) s += (x = expo(rng));
    for (double& x : w) x /= s;
    return w;
  }
  Vec v(d, 0.0);
  if (const auto* h = b.as<VertexHullBall>()) {
    for (const Vec& vert : h->vertices) axpy(normal(rng), vert, v);
  } else {
    for (double& x : v) x = normal(rng);
  }
  const double g = gauge_norm(b, v);
  if (!(g > 0.0) || is_unbounded(g)) return Vec(d, 0.0);
  return scaled(v, unif(rng) / g);
}

double euclidean_radius_bound(const BallSpec& b) {
  const double rho = b.radius();
  if (const auto* lp = b.as<LpBall>()) {
    return rho * std::pow(static_cast<double>(b.dim()), std::max(0.5 - lp->p.reciprocal(), 0.0));
  }
  if (b.is_simplex()) return 1.0;
  if (const auto* g = b.as<GroupBall>()) {
    return rho * std::pow(static_cast<double>(g->rows), std::max(0.5 - g->q.reciprocal(), 0.0)) *
           std::pow(static_cast<double>(g->cols), std::max(0.5 - g->r.reciprocal(), 0.0));
  }
  if (const auto* s = b.as<SchattenBall>()) {
    return rho * std::pow(static_cast<double>(std::min(s->rows, s->cols)),
                          std::max(0.5 - s->p.reciprocal(), 0.0));
  }
  if (const auto* h = b.as<VertexHullBall>()) {
    double m = 0.0;
    for (const Vec& v : h->vertices) m = std::max(m, norm2(v));
    return rho * m;
  }
  if (const auto* i1 = b.as<Interp1Ball>()) {
    return rho * std::min(euclidean_radius_bound(*i1->a), euclidean_radius_bound(*i1->b));
  }
  const auto& i2 = std::get<Interp2Ball>(b.kind());
  return rho * std::max(euclidean_radius_bound(*i2.a), euclidean_radius_bound(*i2.b));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class BallParser {
 public:
  BallParser(const std::string& text, std::size_t dim) : dim_(dim) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_.push_back(c);
  }

  BallSpec parse_all() {
    BallSpec b = parse();
    if (pos_ != s_.size()) fail("trailing characters");
    return b;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidArgument("ball spec '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
  }

  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  std::string token() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' && s_[pos_] != ']' &&
           s_[pos_] != ';' && s_[pos_] != '*')
      ++pos_;
    if (start == pos_) fail("expected a value");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    const std::string t = token();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) fail("bad number '" + t + "'");
    return v;
  }

  std::size_t count() {
    const double v = number();
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) fail("expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  Exponent exponent() {
    try {
      return parse_exponent(token());
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }

  BallSpec parse() {
    const std::string name = ident();
    std::optional<BallSpec> b;
    if (name == "lp") {
      expect('(');
      const Exponent p = exponent();
      expect(')');
      b = BallSpec::lp(p, dim_);
    } else if (name == "simplex") {
      b = BallSpec::simplex(dim_);
    } else if (name == "group") {
      expect('(');
      const Exponent q = exponent();
      expect(',');
      const Exponent r = exponent();
      expect(',');
      const std::size_t k = count();
      expect(',');
      const std::size_t c = count();
      expect(')');
      b = BallSpec::group(q, r, k, c);
    } else if (name == "schatten") {
      expect('(');
      const Exponent p = exponent();
      expect(',');
      const std::size_t r = count();
      expect(',');
      const std::size_t c = count();
      expect(')');
      b = BallSpec::schatten(p, r, c);
    } else if (name == "hull") {
      expect('[');
      std::vector<Vec> verts;
      do {
        expect('(');
        Vec v;
        do {
          v.push_back(number());
        } while (eat(','));
        expect(')');
        verts.push_back(std::move(v));
      } while (eat(','));
      expect(']');
      b = BallSpec::vertex_hull(std::move(verts));
    } else if (name == "interp1" || name == "interp2") {
      expect('(');
      const BallSpec a = parse();
      expect(';');
      const BallSpec c = parse();
      expect(')');
      b = name == "interp1" ? BallSpec::interp1(a, c) : BallSpec::interp2(a, c);
    } else {
      fail("unknown ball kind '" + name + "'");
    }
    if (eat('*')) {
      const double rho = number();
      try {
        b = b->with_radius(rho);
      } catch (const InvalidArgument& e) {
        fail(e.what());
      }
    }
    return *b;
  }

  std::string s_;
  std::size_t pos_ = 0;
  std::size_t dim_;
};

}  // namespace

BallSpec parse_ball(const std::string& text, std::size_t dim) {
  return BallParser(text, dim).parse_all();
}

}  // namespace mirrorgeo
