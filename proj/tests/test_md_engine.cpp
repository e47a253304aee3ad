#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mirrorgeo/md_engine.hpp"
#include "mirrorgeo/vector_ops.hpp"

using namespace mirrorgeo;

TEST_CASE("step_size examples") {
  CHECK(step_size(0.5, 2.0, 100) == doctest::Approx(std::sqrt(0.005)).epsilon(1e-14));
  CHECK(step_size(std::log(4.0), 2.0, 10000) == doctest::Approx(0.011774).epsilon(1e-4));
  CHECK(step_size(1.0, 2.0, 1) == 1.0);
  CHECK(step_size(1.0, 3.0, 8) == doctest::Approx(std::pow(1.0 / 8.0, 2.0 / 3.0)));
  CHECK(step_size(2.0, 2.0, 8, 2.0) == doctest::Approx(std::sqrt(0.125)));
  CHECK_THROWS_AS(step_size(0.0, 2.0, 10), InvalidArgument);
  CHECK_THROWS_AS(step_size(1.0, 2.0, 0), InvalidArgument);
  CHECK_THROWS_AS(step_size(std::numeric_limits<double>::infinity(), 2.0, 10), InvalidArgument);
}

TEST_CASE("init examples") {
  const MDState a = init(Regularizer::euclidean(2), GeometryPair(BallSpec::lp(2.0, 2), BallSpec::lp(2.0, 2)), 100);
  CHECK(a.w == Vec{0, 0});
  CHECK(a.eta == doctest::Approx(std::sqrt(0.005)));
  CHECK(a.t == 1);

  const MDState b = init(Regularizer::entropy(3),
                         GeometryPair(BallSpec::simplex(3), BallSpec::lp(Exponent::infinity(), 3)), 10);
  for (double x : b.w) CHECK(x == doctest::Approx(1.0 / 3.0));
  CHECK(b.sup_psi == doctest::Approx(std::log(3.0)));

  const MDState c = init(Regularizer::psi_r(1.5, 3),
                         GeometryPair(BallSpec::lp(1.0, 3), BallSpec::lp(Exponent::infinity(), 3)), 10);
  CHECK(c.w == Vec{0, 0, 0});

  CHECK_THROWS_AS(init(Regularizer::entropy(3), GeometryPair(BallSpec::lp(1.0, 3), BallSpec::lp(Exponent::infinity(), 3)), 10),
                  InvalidArgument);
}

TEST_CASE("md_step examples") {
  MDState s = init(Regularizer::euclidean(2), GeometryPair(BallSpec::lp(2.0, 2), BallSpec::lp(2.0, 2)), 1);
  s.eta = 0.1;
  const MDState s2 = md_step(s, Vec{1, 0});
  CHECK(s2.w[0] == doctest::Approx(-0.1));
  CHECK(s2.w[1] == doctest::Approx(0.0));
  CHECK(s2.t == 2);

  MDState e = init(Regularizer::entropy(2), GeometryPair(BallSpec::simplex(2), BallSpec::lp(Exponent::infinity(), 2)), 1);
  e.eta = std::log(2.0);
  const MDState e2 = md_step(e, Vec{1, 0});
  CHECK(e2.w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(e2.w[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  MDState z = init(Regularizer::psi_r(1.5, 3), GeometryPair(BallSpec::lp(1.5, 3), BallSpec::lp(3.0, 3)), 10);
  z.w = {0.2, -0.3, 0.1};
  CHECK(max_abs_diff(md_step(z, Vec{0, 0, 0}).w, z.w) <= 1e-14);
}

TEST_CASE("run examples") {
  const GeometryPair line(BallSpec::lp(2.0, 1), BallSpec::lp(2.0, 1));
  for (long n : {1L, 2L, 10L, 100L, 1000L}) {
    for (double x : {1.0, -0.4, 0.0}) {
      CAPTURE(n);
      CAPTURE(x);
      Adversary a = Adversary::fixed(std::vector<CostFunction>(static_cast<std::size_t>(n), CostFunction::linear({x})));
      const RegretTrace tr = run(Regularizer::euclidean(1), line, a, n);
      CHECK(tr.final_regret() >= -1e-12);
      CHECK(tr.final_regret() <= 2.0 * std::sqrt(0.5 / static_cast<double>(n)) + 1e-12);
      CHECK(tr.headline_bound() == doctest::Approx(2.0 * std::sqrt(0.5 / static_cast<double>(n))));
    }
  }

  // n = 1: f(w1) - min f.
  Adversary one = Adversary::fixed({CostFunction::linear({0.6, -0.8})});
  const RegretTrace t1 = run(Regularizer::euclidean(2), GeometryPair(BallSpec::lp(2.0, 2), BallSpec::lp(2.0, 2)), one, 1);
  CHECK(t1.final_regret() == doctest::Approx(1.0));
  CHECK(t1.final_regret() <= t1.headline_bound());

  // Greedy adversary on the l1 ball of R^2 lifted to the simplex of R^4 by w = u - v,
  // with lifted costs (x, -x) for x = sign(w) in the l_inf ball.
  const GeometryPair simplex(BallSpec::simplex(4), BallSpec::lp(Exponent::infinity(), 4));
  const long n = 1 << 10;
  MDState st = init(Regularizer::entropy(4), simplex, n);
  double paid = 0.0;
  Vec mean(2, 0.0);
  for (long t = 1; t <= n; ++t) {
    const Vec w{st.w[0] - st.w[2], st.w[1] - st.w[3]};
    const Vec x{sign_of(w[0]), sign_of(w[1])};
    paid += dot(x, w);
    axpy(1.0 / n, x, mean);
    st = md_step(st, Vec{x[0], x[1], -x[0], -x[1]});
  }
  const double regret = paid / n + lp_norm(mean, Exponent::infinity());
  const double bound = 2.0 * std::sqrt(std::log(4.0) / 1024.0);
  CHECK(bound == doctest::Approx(0.0736).epsilon(1e-3));
  CHECK(regret <= bound);
  MESSAGE("greedy regret / bound = " << regret / bound);
}

TEST_CASE("projected gradient and multiplicative weights equivalence") {
  const long n = 1000;
  SUBCASE("euclidean") {
    const GeometryPair pair(BallSpec::lp(2.0, 5), BallSpec::lp(2.0, 5));
    MDState s = init(Regularizer::euclidean(5), pair, n);
    Adversary adv = Adversary::random_vertex(pair.x_ball, 8);
    Vec w(5, 0.0);
    double worst = 0.0;
    for (long t = 1; t <= n; ++t) {
      const Vec g = adv.next_cost(s.w, t).data();
      s = md_step(s, g);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s.eta * g[i];
      const double nw = norm2(w);
      if (nw > 1.0) {
        for (double& x : w) x /= nw;
      }
      worst = std::max(worst, max_abs_diff(w, s.w));
    }
    CHECK(worst <= 1e-10);
  }
  SUBCASE("entropy") {
    const GeometryPair pair(BallSpec::simplex(6), BallSpec::lp(Exponent::infinity(), 6));
    MDState s = init(Regularizer::entropy(6), pair, n);
    Adversary adv = Adversary::random_vertex(pair.x_ball, 8);
    Vec w(6, 1.0 / 6.0);
    double worst = 0.0;
    for (long t = 1; t <= n; ++t) {
      const Vec g = adv.next_cost(s.w, t).data();
      s = md_step(s, g);
      double z = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] *= std::exp(-s.eta * g[i]));
      for (double& x : w) x /= z;
      worst = std::max(worst, max_abs_diff(w, s.w));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("property: trace invariants") {
  struct Setup {
    const char* name;
    Regularizer reg;
    GeometryPair pair;
  };
  const std::vector<Setup> setups = {
      {"l2", Regularizer::euclidean(3), GeometryPair(BallSpec::lp(2.0, 3), BallSpec::lp(2.0, 3))},
      {"simplex", Regularizer::entropy(4), GeometryPair(BallSpec::simplex(4), BallSpec::lp(Exponent::infinity(), 4))},
      {"l1.5", Regularizer::psi_r(1.5, 3), GeometryPair(BallSpec::lp(1.5, 3), BallSpec::lp(3.0, 3))},
      {"l1", scaled_psi_for_lp_pair(Exponent(1.0), Exponent::infinity(), 8, 1.4),
       GeometryPair(BallSpec::lp(1.0, 8), BallSpec::lp(Exponent::infinity(), 8))},
  };
  for (const Setup& s : setups) {
    CAPTURE(s.name);
    for (int kind = 0; kind < 3; ++kind) {
      Adversary adv = kind == 0   ? Adversary::sign_greedy(s.pair.x_ball)
                      : kind == 1 ? Adversary::random_vertex(s.pair.x_ball, 31)
                                  : Adversary::random_vertex(s.pair.x_ball, 32);
      const long n = 300;
      const RegretTrace tr = run(s.reg, s.pair, adv, n);
      REQUIRE(tr.rounds.size() == static_cast<std::size_t>(n));
      CHECK(tr.max_infeasibility <= kFeasibilityTol);
      CHECK(tr.contract_held);
      double gp = 0.0, paid = 0.0;
      for (const RoundRecord& r : tr.rounds) {
        gp += std::pow(r.grad_gauge, s.reg.p_exponent());
        paid += r.cost;
        CHECK(r.cum_regret <= r.bound + 1e-6 + tr.comparator_gap);
      }
      CHECK(gp / n <= 1.0 + 1e-9);
      CHECK(tr.final_regret() == doctest::Approx(paid / n - tr.comparator_value).epsilon(1e-12));
      CHECK(tr.rounds.back().bound <= tr.headline_bound() + 1e-12);
      CHECK(tr.final_regret() <= tr.headline_bound() + 1e-6);
    }
  }
}

TEST_CASE("property: Bregman three-point identity on sampled rounds") {
  struct Setup {
    Regularizer reg;
    GeometryPair pair;
  };
  const std::vector<Setup> setups = {
      {Regularizer::euclidean(3), GeometryPair(BallSpec::lp(2.0, 3), BallSpec::lp(2.0, 3))},
      {Regularizer::entropy(4), GeometryPair(BallSpec::simplex(4), BallSpec::lp(Exponent::infinity(), 4))},
      {Regularizer::psi_r(1.5, 3), GeometryPair(BallSpec::lp(1.5, 3), BallSpec::lp(3.0, 3))},
      {Regularizer::psi_r(3.0, 3), GeometryPair(BallSpec::lp(3.0, 3), BallSpec::lp(1.5, 3))},
  };
  std::mt19937_64 rng(12);
  for (const Setup& s : setups) {
    MDState st = init(s.reg, s.pair, 200);
    Adversary adv = Adversary::random_vertex(s.pair.x_ball, 5);
    for (long t = 1; t <= 200; ++t) {
      const Vec g = adv.next_cost(st.w, t).data();
      const MDState next = md_step(st, g);
      if (t % 10 == 0) {
        const Vec star = s.pair.w_ball.is_simplex() ? Vec{0.1, 0.2, 0.3, 0.4} : sample_in_ball(s.pair.w_ball, rng);
        const Vec diff = sub(psi_grad(s.reg, st.w), psi_grad(s.reg, next.w));
        const double lhs = dot(diff, sub(next.w, star));
        const double rhs = bregman_divergence(s.reg, star, st.w) - bregman_divergence(s.reg, star, next.w) -
                           bregman_divergence(s.reg, next.w, st.w);
        CHECK(std::abs(lhs - rhs) <= 1e-8);
      }
      st = next;
    }
  }
}

TEST_CASE("comparator for nonlinear costs beats a grid") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<CostFunction> costs;
  for (int i = 0; i < 20; ++i) {
    Vec x{n(rng), n(rng)};
    x = scaled(x, 1.0 / norm2(x));
    if (i % 2) {
      costs.push_back(CostFunction::abs_loss(x, std::clamp(0.3 * n(rng), -1.0, 1.0), 1.0));
    } else {
      costs.push_back(CostFunction::hinge(x, i % 4 ? 1.0 : -1.0));
    }
  }
  for (const BallSpec& w : {BallSpec::lp(2.0, 2), BallSpec::lp(1.0, 2), BallSpec::simplex(2)}) {
    CAPTURE(w.describe());
    const ComparatorResult r = best_fixed_point(w, costs);
    CHECK(r.gap <= 1e-6);
    CHECK(contains(w, r.point, 1e-8));
    double grid = std::numeric_limits<double>::infinity();
    for (int i = -400; i <= 400; ++i) {
      for (int j = -400; j <= 400; ++j) {
        const Vec v{i / 400.0, j / 400.0};
        if (w.is_simplex() ? std::abs(v[0] + v[1] - 1.0) > 1e-12 || v[0] < 0 || v[1] < 0 : gauge_norm(w, v) > 1.0) continue;
        double s = 0.0;
        for (const CostFunction& f : costs) s += f.value(v);
        grid = std::min(grid, s / costs.size());
      }
    }
    CHECK(r.value <= grid + 1e-9);
    CHECK(r.value >= grid - 0.02);
  }
}

TEST_CASE("contract violation is flagged") {
  const GeometryPair pair(BallSpec::lp(1.0, 2), BallSpec::lp(Exponent::infinity(), 2));
  Adversary a = Adversary::fixed({CostFunction::linear({2.0, 0.0}), CostFunction::linear({0.0, 1.0})});
  const RegretTrace tr = run(Regularizer::psi_r(2.0, 2), pair, a, 2);
  CHECK_FALSE(tr.contract_held);
}

TEST_CASE("runs are deterministic and the CSV is stable") {
  const GeometryPair pair(BallSpec::lp(1.5, 4), BallSpec::lp(3.0, 4));
  std::string text[2];
  for (std::string& out : text) {
    Adversary a = Adversary::random_vertex(pair.x_ball, 99);
    std::ostringstream os;
    write_trace_csv(os, run(Regularizer::psi_r(1.5, 4), pair, a, 64));
    out = os.str();
  }
  CHECK(text[0] == text[1]);
  CHECK(text[0].rfind("# mirrorgeo-csv v1\nt,cost,grad_gauge,cum_regret,bound\n1,", 0) == 0);
  CHECK(std::count(text[0].begin(), text[0].end(), '\n') == 66);
}
