#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "mirrorgeo/prox.hpp"
#include "mirrorgeo/vector_ops.hpp"

using namespace mirrorgeo;

namespace {

// Sort-based Euclidean projection onto the l1 ball, coded independently of the library.
Vec l1_projection_oracle(const Vec& y, double rho) {
  Vec a(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) a[i] = std::abs(y[i]);
  double total = 0.0;
  for (double x : a) total += x;
  if (total <= rho) return y;
  Vec s = a;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, lam = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    const double t = (cum - rho) / static_cast<double>(k + 1);
    if (s[k] > t) lam = t;
  }
  Vec w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) w[i] = sign_of(y[i]) * std::max(a[i] - lam, 0.0);
  return w;
}

Vec gaussian(std::size_t d, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sd);
  Vec v(d);
  for (double& x : v) x = n(rng);
  return v;
}

std::vector<Vec> rank_one_signs(std::size_t m, std::size_t n) {
  std::vector<Vec> out;
  for (std::size_t a = 0; a < (std::size_t{1} << (m - 1)); ++a)
    for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) {
      Vec v(m * n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double ui = i == 0 ? 1.0 : ((a >> (i - 1)) & 1u ? -1.0 : 1.0);
          v[i * n + j] = ui * ((b >> j) & 1u ? -1.0 : 1.0);
        }
      out.push_back(v);
    }
  return out;
}

struct Setup {
  std::string name;
  Regularizer reg;
  BallSpec ball;
  ProjectionRoute route;
};

std::vector<Setup> analytic_setups() {
  return {
      {"euclid l2", Regularizer::euclidean(4), BallSpec::lp(2.0, 4), ProjectionRoute::kRadial},
      {"psi1.5 l1.5", Regularizer::psi_r(1.5, 4), BallSpec::lp(1.5, 4), ProjectionRoute::kRadial},
      {"psi1.5 l1", Regularizer::psi_r(1.5, 5), BallSpec::lp(1.0, 5), ProjectionRoute::kThreshold},
      {"euclid l1", Regularizer::euclidean(5, 2.0), BallSpec::lp(1.0, 5, 0.7),
       ProjectionRoute::kThreshold},
      {"psi1.5 linf", Regularizer::psi_r(1.5, 4), BallSpec::lp(Exponent::infinity(), 4),
       ProjectionRoute::kSeparable},
      {"psi1.5 l3", Regularizer::psi_r(1.5, 4), BallSpec::lp(3.0, 4), ProjectionRoute::kSeparable},
      {"psi1.2 l1.7", Regularizer::psi_r(1.2, 4), BallSpec::lp(1.7, 4), ProjectionRoute::kSeparable},
      {"psi3 l1.3", Regularizer::psi_r(3.0, 4), BallSpec::lp(1.3, 4), ProjectionRoute::kSeparable},
      {"psi3 linf", Regularizer::psi_r(3.0, 4, 0.5), BallSpec::lp(Exponent::infinity(), 4),
       ProjectionRoute::kSeparable},
      {"psi3 l3", Regularizer::psi_r(3.0, 4), BallSpec::lp(3.0, 4), ProjectionRoute::kRadial},
      {"psi1.5 simplex", Regularizer::psi_r(1.5, 4), BallSpec::simplex(4), ProjectionRoute::kThreshold},
      {"euclid simplex", Regularizer::euclidean(4), BallSpec::simplex(4), ProjectionRoute::kThreshold},
      {"group (2,1)", group_regularizer_for_linf(2.0, 2, 4),
       BallSpec::group(Exponent(2.0), Exponent(1.0), 2, 4), ProjectionRoute::kGroup},
      {"group (1.5,2)", Regularizer::group_squared(1.5, 1.3, 3, 2),
       BallSpec::group(Exponent(1.5), Exponent(2.0), 3, 2), ProjectionRoute::kGroup},
      {"schatten", Regularizer::schatten_psi_r(1.5, 2, 3), BallSpec::schatten(Exponent(2.0), 2, 3),
       ProjectionRoute::kSpectral},
  };
}

}  // namespace

TEST_CASE("bregman_project examples") {
  const ProjectionResult a = bregman_project(Regularizer::euclidean(2), BallSpec::lp(2.0, 2), Vec{3, 4});
  CHECK(a.point[0] == doctest::Approx(0.6));
  CHECK(a.point[1] == doctest::Approx(0.8));
  CHECK(a.route == ProjectionRoute::kRadial);

  const ProjectionResult id = bregman_project(Regularizer::psi_r(1.5, 2), BallSpec::lp(1.0, 2), Vec{0.3, -0.2});
  CHECK(id.point == Vec{0.3, -0.2});
  CHECK(id.residual == 0.0);
  CHECK(id.route == ProjectionRoute::kIdentity);

  const ProjectionResult b = bregman_project(Regularizer::euclidean(2), BallSpec::lp(1.0, 2), Vec{0.8, 0.6});
  CHECK(b.point[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(b.point[1] == doctest::Approx(0.4).epsilon(1e-12));

  const ProjectionResult c = bregman_project(Regularizer::entropy(2), BallSpec::simplex(2), Vec{0.2, 0.6});
  CHECK(c.point[0] == doctest::Approx(0.25));
  CHECK(c.point[1] == doctest::Approx(0.75));
  CHECK(c.route == ProjectionRoute::kNormalize);

  CHECK_THROWS_AS(bregman_project(Regularizer::entropy(2), BallSpec::lp(1.0, 2), Vec{2, 2}),
                  InvalidArgument);
  CHECK_THROWS_AS(bregman_project(Regularizer::entropy(2), BallSpec::simplex(2), Vec{-1, 3}),
                  InvalidArgument);
  CHECK_THROWS_AS(bregman_project(Regularizer::euclidean(2), BallSpec::lp(2.0, 2), Vec{NAN, 0}),
                  InvalidArgument);
}

TEST_CASE("projection onto l_s balls matches an external solver") {
  // Reference minimizers from a sequential quadratic programming solver at tight tolerance.
  const ProjectionResult a =
      bregman_project(Regularizer::psi_r(1.5, 3), BallSpec::lp(3.0, 3), Vec{2.0, -1.0, 0.5});
  const Vec ref_a{0.8595426433195337, -0.6441393646977689, 0.4605645608150855};
  CHECK(max_abs_diff(a.point, ref_a) <= 1e-6);
  const ProjectionResult b = bregman_project(Regularizer::psi_r(1.5, 4), BallSpec::lp(1.3, 4),
                                             Vec{0.3, 1.2, -0.7, 0.1});
  const Vec ref_b{0.12968887733470288, 0.7123357454807815, -0.3704174923497673, 0.03187639560768783};
  CHECK(max_abs_diff(b.point, ref_b) <= 1e-6);
}

TEST_CASE("euclidean l1 projection matches the sort-based oracle") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t d = 1 + rep % 9;
    const double rho = 0.25 + (rep % 4);
    const Vec y = gaussian(d, 2.0, rng);
    const ProjectionResult p = bregman_project(Regularizer::euclidean(d), BallSpec::lp(1.0, d, rho), y);
    REQUIRE(max_abs_diff(p.point, l1_projection_oracle(y, rho)) <= 1e-10);
  }
}

TEST_CASE("analytic routes agree with Frank-Wolfe") {
  std::mt19937_64 rng(9);
  for (const Setup& s : analytic_setups()) {
    CAPTURE(s.name);
    ProjectionOptions fw;
    fw.force_frank_wolfe = true;
    fw.gap_tol = 1e-12;
    fw.max_iterations = 100000;
    int hits = 0;
    for (int rep = 0; rep < 30; ++rep) {
      Vec y = gaussian(s.reg.dim(), 1.5, rng);
      if (s.ball.is_simplex()) {
        for (double& x : y) x = x + 0.5;
      }
      const ProjectionResult p = bregman_project(s.reg, s.ball, y);
      if (p.route == ProjectionRoute::kIdentity) continue;
      ++hits;
      CHECK(p.route == s.route);
      CHECK(p.residual <= 1e-8 * std::max(1.0, lp_norm(y, Exponent(2.0))));
      CHECK(contains(s.ball, p.point, 1e-8));
      const ProjectionResult q = bregman_project(s.reg, s.ball, y, fw);
      CHECK(q.route == ProjectionRoute::kFrankWolfe);
      CHECK(max_abs_diff(p.point, q.point) <= 1e-5);
      // Optimality: the analytic point is never worse than the Frank-Wolfe point.
      const Vec theta = psi_grad(s.reg, y);
      const double fp = psi_eval(s.reg, p.point) - dot(theta, p.point);
      const double fq = psi_eval(s.reg, q.point) - dot(theta, q.point);
      CHECK(fp <= fq + 1e-9 * std::max(1.0, std::abs(fq)));
    }
    CHECK(hits > 10);
  }
}

TEST_CASE("frank-wolfe routes: vertex hulls and interpolation balls") {
  const auto hull = rank_one_signs(2, 2);
  const Regularizer vh = vertex_hull_regularizer_for(hull, BallSpec::lp(1.0, 4));
  const BallSpec w = BallSpec::vertex_hull(hull);
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const Vec y = gaussian(4, 2.0, rng);
    const ProjectionResult p = bregman_project(vh, w, y);
    CHECK(contains(w, p.point, 1e-8));
    if (p.route == ProjectionRoute::kIdentity) continue;
    CHECK(p.route == ProjectionRoute::kFrankWolfe);
    CHECK(p.residual <= 1e-9 * std::max(1.0, std::abs(dot(psi_grad(vh, y), p.point))));
  }
  const BallSpec l1 = BallSpec::lp(1.0, 3), l2 = BallSpec::lp(2.0, 3);
  const ProjectionResult e = bregman_project(Regularizer::euclidean(3), BallSpec::interp1(l1, l2),
                                             Vec{1.0, -0.4, 0.2});
  CHECK(e.route == ProjectionRoute::kFrankWolfe);
  CHECK(contains(BallSpec::interp1(l1, l2), e.point, 1e-8));
}

TEST_CASE("dual_step examples") {
  const Vec a = dual_step(Regularizer::euclidean(2), Vec{0, 0}, Vec{1, 0}, 0.1);
  CHECK(a[0] == doctest::Approx(-0.1));
  CHECK(a[1] == doctest::Approx(0.0));
  const Vec b = dual_step(Regularizer::entropy(2), Vec{0.5, 0.5}, Vec{1, 0}, std::log(2.0));
  CHECK(b[0] == doctest::Approx(1.0 / 3.0));
  CHECK(b[1] == doctest::Approx(2.0 / 3.0));
  const Regularizer r = Regularizer::psi_r(1.5, 3);
  const Vec w{0.2, -0.1, 0.3};
  CHECK(max_abs_diff(dual_step(r, w, Vec{0, 0, 0}, 0.5), w) <= 1e-12);
  CHECK_THROWS_AS(dual_step(r, w, Vec{0, 0, 0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(dual_step(r, w, Vec{0, 0}, 0.1), InvalidArgument);
}

TEST_CASE("property: prox form equals dual step then projection") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Regularizer euc = Regularizer::euclidean(4);
  const BallSpec l2 = BallSpec::lp(2.0, 4);
  const Regularizer ent = Regularizer::entropy(4);
  const BallSpec simplex = BallSpec::simplex(4);
  for (int rep = 0; rep < 1000; ++rep) {
    const double eta = 0.01 + 2.0 * unif(rng);
    const Vec g = gaussian(4, 1.0, rng);
    // Euclidean: argmin eta<g, w> + |w - w_t|^2 / 2 over the unit ball is radial.
    Vec wt = sample_in_ball(l2, rng);
    Vec free = sub(wt, scaled(g, eta));
    const double n = norm2(free);
    const Vec prox = n > 1.0 ? scaled(free, 1.0 / n) : free;
    const Vec md = bregman_project(euc, l2, dual_step(euc, wt, g, eta)).point;
    REQUIRE(max_abs_diff(prox, md) <= 1e-8);
    // Entropy: argmin eta<g, w> + KL(w | w_t) over the simplex is w_t exp(-eta g) / Z.
    Vec pt(4);
    double z = 0.0;
    for (double& x : pt) z += (x = 0.05 + unif(rng));
    for (double& x : pt) x /= z;
    Vec mw(4);
    double zz = 0.0;
    for (std::size_t i = 0; i < 4; ++i) zz += (mw[i] = pt[i] * std::exp(-eta * g[i]));
    for (double& x : mw) x /= zz;
    const Vec md2 = bregman_project(ent, simplex, dual_step(ent, pt, g, eta)).point;
    REQUIRE(max_abs_diff(mw, md2) <= 1e-8);
  }
}

TEST_CASE("property: generalized pythagoras and idempotence") {
  std::mt19937_64 rng(19);
  for (const Setup& s : analytic_setups()) {
    CAPTURE(s.name);
    for (int rep = 0; rep < 200; ++rep) {
      Vec y = gaussian(s.reg.dim(), 1.5, rng);
      if (s.ball.is_simplex()) {
        for (double& x : y) x = std::abs(x);
      }
      const Vec p = bregman_project(s.reg, s.ball, y).point;
      Vec star = sample_in_ball(s.ball, rng);
      const double lhs = bregman_divergence(s.reg, star, p);
      const double rhs = bregman_divergence(s.reg, star, y);
      REQUIRE(lhs <= rhs + 1e-9 * std::max(1.0, rhs));
      const Vec again = bregman_project(s.reg, s.ball, p).point;
      REQUIRE(max_abs_diff(again, p) <= 1e-9);
    }
  }
}
