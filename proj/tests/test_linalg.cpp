#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mirrorgeo/linalg.hpp"
#include "mirrorgeo/vector_ops.hpp"

using namespace mirrorgeo;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (double& x : m.data) x = n(rng);
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

// Primal feasibility, dual feasibility and zero duality gap.
void check_lp_certificate(const LinearProgram& lp, const LpSolution& s) {
  REQUIRE(s.status == LpStatus::kOptimal);
  for (std::size_t i = 0; i < lp.a.rows; ++i) {
    double r = -lp.b[i];
    for (std::size_t j = 0; j < lp.a.cols; ++j) r += lp.a(i, j) * s.x[j];
    CHECK(std::abs(r) < 1e-9);
  }
  for (double x : s.x) CHECK(x >= 0.0);
  for (std::size_t j = 0; j < lp.a.cols; ++j) {
    double aty = 0.0;
    for (std::size_t i = 0; i < lp.a.rows; ++i) aty += lp.a(i, j) * s.dual[i];
    CHECK(aty <= lp.c[j] + 1e-9);
  }
  CHECK(dot(lp.c, s.x) == doctest::Approx(s.objective).epsilon(1e-10));
  CHECK(dot(lp.b, s.dual) == doctest::Approx(s.objective).epsilon(1e-9));
}

}  // namespace

TEST_CASE("jacobi svd matches an independent eigensolver") {
  std::mt19937_64 rng(7);
  for (auto [r, c] : {std::pair{3, 3}, {4, 2}, {2, 5}, {6, 6}, {1, 4}}) {
    const Matrix a = random_matrix(r, c, rng);
    const SvdResult svd = jacobi_svd(a);
    const Eigen::MatrixXd ea = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ea.transpose() * ea);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    const std::size_t k = std::min(r, c);
    REQUIRE(svd.s.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(svd.s[i] == doctest::Approx(ev[i]).epsilon(1e-8));
    for (std::size_t i = 0; i + 1 < k; ++i) CHECK(svd.s[i] >= svd.s[i + 1]);
    // Reconstruction.
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < a.cols; ++j) {
        double v = 0.0;
        for (std::size_t t = 0; t < k; ++t) v += svd.u(i, t) * svd.s[t] * svd.v(j, t);
        CHECK(v == doctest::Approx(a(i, j)).epsilon(1e-10));
      }
  }
}

TEST_CASE("jacobi svd of simple matrices") {
  const Matrix d = Matrix::from_flat(2, 2, Vec{2, 0, 0, 3});
  const SvdResult s = jacobi_svd(d);
  CHECK(s.s[0] == doctest::Approx(3.0));
  CHECK(s.s[1] == doctest::Approx(2.0));
  const SvdResult z = jacobi_svd(Matrix(2, 3));
  CHECK(z.s[0] == 0.0);
  Matrix bad(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(jacobi_svd(bad), InvalidArgument);
}

TEST_CASE("cholesky solve") {
  const Matrix h = Matrix::from_flat(2, 2, Vec{4, 1, 1, 3});
  Vec b{1, 2};
  REQUIRE(cholesky_solve(h, b));
  CHECK(4 * b[0] + b[1] == doctest::Approx(1.0));
  CHECK(b[0] + 3 * b[1] == doctest::Approx(2.0));
}

TEST_CASE("simplex solver: optimal, infeasible, unbounded, redundant") {
  LinearProgram lp{Matrix::from_flat(2, 3, Vec{1, 2, 1, 3, 1, 0}), Vec{4, 6}, Vec{1, 1, 2}};
  const LpSolution s = solve_lp(lp);
  check_lp_certificate(lp, s);
  CHECK(s.objective == doctest::Approx(2.8));

  LinearProgram neg{Matrix::from_flat(1, 2, Vec{1, 1}), Vec{-1}, Vec{1, 1}};
  CHECK(solve_lp(neg).status == LpStatus::kInfeasible);

  LinearProgram unb{Matrix::from_flat(1, 2, Vec{1, -1}), Vec{1}, Vec{-1, 0}};
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);

  LinearProgram red{Matrix::from_flat(2, 2, Vec{1, 1, 2, 2}), Vec{1, 2}, Vec{1, 3}};
  const LpSolution r = solve_lp(red);
  check_lp_certificate(red, r);
  CHECK(r.objective == doctest::Approx(1.0));

  LinearProgram flipped{Matrix::from_flat(1, 2, Vec{-1, -2}), Vec{-2}, Vec{3, 1}};
  const LpSolution f = solve_lp(flipped);
  check_lp_certificate(flipped, f);
  CHECK(f.objective == doctest::Approx(1.0));
}

TEST_CASE("simplex solver certificates on random l1 recovery programs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 2 + rep % 4, k = d + 2 + rep % 3;
    LinearProgram lp{Matrix(d, 2 * k), Vec(d), Vec(2 * k, 1.0)};
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < d; ++i) {
        const double v = n(rng);
        lp.a(i, j) = v;
        lp.a(i, k + j) = -v;
      }
    for (double& b : lp.b) b = n(rng);
    check_lp_certificate(lp, solve_lp(lp));
  }
}

TEST_CASE("ellipsoid method") {
  SUBCASE("unconstrained quadratic") {
    EllipsoidOracle f = [](std::span<const double> x, Vec& g) -> std::optional<double> {
      g = {2 * (x[0] - 1), 2 * (x[1] + 2)};
      return (x[0] - 1) * (x[0] - 1) + (x[1] + 2) * (x[1] + 2);
    };
    const EllipsoidResult r = ellipsoid_minimize(f, Vec{0, 0}, 10.0, 1e-10, 100000);
    CHECK(r.best_value < 1e-9);
    CHECK(r.lower_bound <= r.best_value);
  }
  SUBCASE("linear objective over the disc") {
    EllipsoidOracle f = [](std::span<const double> x, Vec& g) -> std::optional<double> {
      if (x[0] * x[0] + x[1] * x[1] <= 1.0) {
        g = {1, 1};
        return x[0] + x[1];
      }
      g = {x[0], x[1]};
      return std::nullopt;
    };
    EllipsoidRetraction radial = [](std::span<const double> x) -> std::optional<Vec> {
      const double n = std::hypot(x[0], x[1]);
      return Vec{x[0] / n, x[1] / n};
    };
    const EllipsoidResult r = ellipsoid_minimize(f, Vec{0, 0}, 2.0, 1e-10, 100000, radial);
    CHECK(r.found_feasible);
    CHECK(r.best_value == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("one dimension") {
    EllipsoidOracle f = [](std::span<const double> x, Vec& g) -> std::optional<double> {
      g = {std::abs(x[0] - 0.3) < 1e-300 ? 0.0 : (x[0] > 0.3 ? 1.0 : -1.0)};
      return std::abs(x[0] - 0.3);
    };
    const EllipsoidResult r = ellipsoid_minimize(f, Vec{0}, 1.0, 1e-12, 1000);
    CHECK(r.best_value < 1e-11);
  }
}
