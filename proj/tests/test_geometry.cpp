#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/vector_ops.hpp"

using namespace mirrorgeo;

namespace {

std::vector<BallSpec> ball_zoo(std::size_t d) {
  std::vector<BallSpec> zoo{BallSpec::lp(1.0, d),
                            BallSpec::lp(1.5, d, 0.7),
                            BallSpec::lp(2.0, d),
                            BallSpec::lp(3.0, d, 2.0),
                            BallSpec::lp(Exponent::infinity(), d),
                            BallSpec::interp1(BallSpec::lp(1.0, d), BallSpec::lp(2.0, d)),
                            BallSpec::interp2(BallSpec::lp(1.0, d), BallSpec::lp(Exponent::infinity(), d, 0.5))};
  std::vector<Vec> verts;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d, 0.0);
    e[i] = 1.0;
    verts.push_back(e);
  }
  verts.push_back(Vec(d, 0.5));
  zoo.push_back(BallSpec::vertex_hull(verts));
  return zoo;
}

Vec gaussian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec v(d);
  for (double& x : v) x = n(rng);
  return v;
}

}  // namespace

TEST_CASE("gauge norm examples") {
  CHECK(gauge_norm(BallSpec::lp(2.0, 2), Vec{3, 4}) == doctest::Approx(5.0));
  const BallSpec i1 = BallSpec::interp1(BallSpec::lp(1.0, 2), BallSpec::lp(2.0, 2));
  CHECK(gauge_norm(i1, Vec{3, 4}) == doctest::Approx(12.0));
  const BallSpec hull = BallSpec::vertex_hull({{1, 0}, {0, 1}});
  CHECK(gauge_norm(hull, Vec{1, 1}) == doctest::Approx(2.0));
  const BallSpec i2 = BallSpec::interp2(BallSpec::lp(1.0, 3), BallSpec::lp(1.0, 3));
  CHECK(gauge_norm(i2, Vec{1, -2, 3}) == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(gauge_norm(BallSpec::lp(2.0, 2, 2.0), Vec{3, 4}) == doctest::Approx(2.5));
}

TEST_CASE("vertex hull outside its span has an unbounded gauge") {
  const BallSpec hull = BallSpec::vertex_hull({{1, 0, 0}, {0, 1, 0}});
  CHECK(is_unbounded(gauge_norm(hull, Vec{0, 0, 1})));
  CHECK_FALSE(contains(hull, Vec{0, 0, 0.1}, 0.0));
  CHECK(gauge_norm(hull, Vec{0, 0, 0}) == 0.0);
}

TEST_CASE("dual norm examples") {
  CHECK(dual_norm(BallSpec::lp(1.0, 2), Vec{2, 1}) == doctest::Approx(2.0));
  CHECK(dual_norm(BallSpec::lp(2.0, 2), Vec{3, 4}) == doctest::Approx(5.0));
  const BallSpec hull = BallSpec::vertex_hull({{1, 0}, {0, 1}});
  CHECK(dual_norm(hull, Vec{2, 1}) == doctest::Approx(2.0));
}

TEST_CASE("vertex hull dual norm agrees with the generic support solver") {
  // interp1(A, A) is the ball A/2, whose support function is computed numerically.
  std::mt19937_64 rng(3);
  const BallSpec hull = BallSpec::vertex_hull({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, -1}});
  const BallSpec half = BallSpec::interp1(hull, hull);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec x = gaussian(3, rng);
    CHECK(2.0 * dual_norm(half, x) == doctest::Approx(dual_norm(hull, x)).epsilon(1e-8));
  }
  CHECK(2.0 * dual_norm(BallSpec::interp1(BallSpec::vertex_hull({{1, 0}, {0, 1}}),
                                          BallSpec::vertex_hull({{1, 0}, {0, 1}})),
                        Vec{2, 1}) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("generic support solver agrees with analytic duals") {
  std::mt19937_64 rng(5);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const BallSpec b = BallSpec::lp(p, 4);
    const BallSpec half = BallSpec::interp1(b, b);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec x = gaussian(4, rng);
      CHECK(2.0 * dual_norm(half, x) == doctest::Approx(dual_norm(b, x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("holder conjugate") {
  CHECK(holder_conjugate(Exponent(2.0)).value() == doctest::Approx(2.0));
  CHECK(holder_conjugate(Exponent(1.0)).is_infinite());
  CHECK(holder_conjugate(Exponent(1.5)).value() == doctest::Approx(3.0));
  CHECK(holder_conjugate(Exponent::infinity()).value() == 1.0);
  CHECK_THROWS_AS(Exponent(0.5), InvalidArgument);
  CHECK(parse_exponent("inf").is_infinite());
  CHECK(parse_exponent(" 2.5 ").value() == 2.5);
  CHECK_THROWS_AS(parse_exponent("two"), InvalidArgument);
}

TEST_CASE("contains") {
  CHECK(contains(BallSpec::lp(2.0, 2), Vec{0.6, 0.8}, 0.0));
  CHECK_FALSE(contains(BallSpec::lp(1.0, 2), Vec{0.8, 0.6}, 0.0));
  for (const BallSpec& b : ball_zoo(3)) CHECK(contains(b, Vec(3, 0.0), 0.0));
  CHECK(contains(BallSpec::simplex(3), Vec{0.2, 0.3, 0.5}, 1e-12));
  CHECK_FALSE(contains(BallSpec::simplex(3), Vec{0.2, 0.3, 0.4}, 1e-12));
  CHECK_THROWS_AS(contains(BallSpec::lp(2.0, 2), Vec{1, 2, 3}, 0.0), InvalidArgument);
}

TEST_CASE("schatten norms") {
  const Vec s = schatten_singular_values(Vec{2, 0, 0, 3}, 2, 2);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(gauge_norm(BallSpec::schatten(Exponent(1.0), 2, 2), Vec{2, 0, 0, 3}) == doctest::Approx(5.0));
  CHECK(gauge_norm(BallSpec::schatten(Exponent(2.0), 2, 2), Vec{1, 0, 0, 1}) ==
        doctest::Approx(std::sqrt(2.0)));
  std::mt19937_64 rng(9);
  const Vec a = gaussian(9, rng);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[3 * i + j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.transpose() * m);
  Eigen::Vector3d ev = es.eigenvalues().cwiseSqrt().reverse();
  const Vec sv = schatten_singular_values(a, 3, 3);
  for (int i = 0; i < 3; ++i) CHECK(sv[i] == doctest::Approx(ev[i]).epsilon(1e-8));
  // Schatten-2 is the Frobenius norm.
  CHECK(gauge_norm(BallSpec::schatten(Exponent(2.0), 3, 3), a) == doctest::Approx(norm2(a)));
}

TEST_CASE("group norms") {
  const BallSpec g = BallSpec::group(Exponent(2.0), Exponent(1.0), 2, 2);
  CHECK(gauge_norm(g, Vec{3, 4, 0, 1}) == doctest::Approx(6.0));
  CHECK(dual_norm(g, Vec{3, 4, 0, 1}) == doctest::Approx(5.0));
  const auto verts = extreme_points(BallSpec::group(Exponent::infinity(), Exponent(1.0), 2, 3));
  REQUIRE(verts);
  CHECK(verts->size() == 12);
}

TEST_CASE("property: homogeneity, symmetry and the triangle inequality") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  for (const BallSpec& b : ball_zoo(3)) {
    CAPTURE(b.describe());
    const int pairs = b.as<Interp2Ball>() ? 2000 : 10000;
    for (int rep = 0; rep < pairs; ++rep) {
      const Vec u = gaussian(3, rng), v = gaussian(3, rng);
      const double gu = gauge_norm(b, u), gv = gauge_norm(b, v);
      REQUIRE(gauge_norm(b, add(u, v)) <= gu + gv + 1e-9);
      if (rep % 10 == 0) {
        const double s = c(rng);
        REQUIRE(gauge_norm(b, scaled(u, s)) == doctest::Approx(std::abs(s) * gu).epsilon(1e-9));
        REQUIRE(gauge_norm(b, scaled(u, -1.0)) == doctest::Approx(gu).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("property: interp2 gauge never exceeds either component") {
  std::mt19937_64 rng(23);
  const BallSpec a = BallSpec::lp(1.0, 4), bb = BallSpec::lp(2.0, 4, 0.5);
  const BallSpec i2 = BallSpec::interp2(a, bb);
  for (int rep = 0; rep < 500; ++rep) {
    const Vec v = gaussian(4, rng);
    REQUIRE(gauge_norm(i2, v) <= std::min(gauge_norm(a, v), gauge_norm(bb, v)) + 1e-12);
  }
}

TEST_CASE("property: lp duals match the conjugate exponent and support points attain them") {
  std::mt19937_64 rng(29);
  for (const BallSpec& b : ball_zoo(4)) {
    CAPTURE(b.describe());
    for (int rep = 0; rep < 50; ++rep) {
      const Vec x = gaussian(4, rng);
      const Vec w = support_point(b, x);
      REQUIRE(contains(b, w, 1e-8));
      REQUIRE(dot(x, w) == doctest::Approx(dual_norm(b, x)).epsilon(1e-8));
      const Vec s = gauge_subgradient(b, x);
      REQUIRE(dot(s, x) == doctest::Approx(gauge_norm(b, x)).epsilon(1e-8));
      REQUIRE(dual_norm(b, s) <= 1.0 + 1e-8);
    }
  }
  for (double p : {1.0, 1.25, 2.0, 3.0}) {
    const BallSpec b = BallSpec::lp(p, 5, 1.5);
    const Vec x = gaussian(5, rng);
    CHECK(dual_norm(b, x) == doctest::Approx(1.5 * lp_norm(x, holder_conjugate(Exponent(p)))));
  }
}

TEST_CASE("support points on the simplex and tie rules") {
  CHECK(support_point(BallSpec::simplex(3), Vec{0.1, 0.5, 0.5}) == Vec{0, 1, 0});
  CHECK(lmo(BallSpec::simplex(3), Vec{0.1, 0.5, 0.5}) == Vec{1, 0, 0});
  CHECK(support_point(BallSpec::lp(Exponent::infinity(), 2), Vec{0.3, -0.2}) == Vec{1, -1});
  CHECK(support_point(BallSpec::lp(Exponent::infinity(), 2), Vec{0, 0}) == Vec{1, 1});
  CHECK(support_point(BallSpec::lp(1.0, 3), Vec{0, 0, 0}) == Vec{1, 0, 0});
}

TEST_CASE("extreme points and dual balls") {
  CHECK(extreme_points(BallSpec::lp(1.0, 3))->size() == 6);
  CHECK(extreme_points(BallSpec::lp(Exponent::infinity(), 3))->size() == 8);
  CHECK_FALSE(extreme_points(BallSpec::lp(2.0, 3)));
  CHECK(extreme_points(BallSpec::lp(2.0, 1))->size() == 2);
  const auto dl = dual_ball(BallSpec::lp(1.0, 3, 2.0));
  REQUIRE(dl);
  CHECK(dl->as<LpBall>()->p.is_infinite());
  CHECK(dl->radius() == 0.5);
}

TEST_CASE("ball text round trip") {
  for (const std::string s : {"lp(2)", "lp(inf)*0.5", "simplex", "group(2,1,2,3)",
                              "schatten(1,2,2)", "hull[(1,0),(0,1)]", "interp1(lp(1);lp(2))",
                              "interp2(lp(1);lp(inf)*0.5)*2"}) {
    const std::size_t d = s.rfind("group", 0) == 0 ? 6 : (s.rfind("schatten", 0) == 0 ? 4 : 2);
    const BallSpec b = parse_ball(s, d);
    CHECK(b.describe() == s);
    CHECK(b.dim() == d);
  }
  CHECK_THROWS_AS(parse_ball("lq(2)", 2), InvalidArgument);
  CHECK_THROWS_AS(parse_ball("lp(0.5)", 2), InvalidArgument);
  CHECK_THROWS_AS(parse_ball("lp(2", 2), InvalidArgument);
}

TEST_CASE("sampling stays in the ball") {
  std::mt19937_64 rng(31);
  for (const BallSpec& b : ball_zoo(3)) {
    for (int rep = 0; rep < 100; ++rep) REQUIRE(contains(b, sample_in_ball(b, rng), 1e-9));
  }
  const Vec s = sample_in_ball(BallSpec::simplex(4), rng);
  CHECK(contains(BallSpec::simplex(4), s, 1e-12));
}
