#include "mirrorgeo/costs.hpp"

#include <cmath>

#include "mirrorgeo/md_engine.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

constexpr std::size_t kVertexCacheLimit = 1u << 12;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string vec_text(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + ")";
}

}  // namespace

CostFunction CostFunction::linear(Vec x) {
  if (!all_finite(x)) throw InvalidArgument("linear cost: non-finite data");
  return CostFunction(LinearCost{std::move(x)});
}

CostFunction CostFunction::abs_loss(Vec x, double y, double b) {
  if (!all_finite(x) || !std::isfinite(y) || !(b >= 0.0)) {
    throw InvalidArgument("abs loss: non-finite data or negative b");
  }
  if (std::abs(y) > b) throw InvalidArgument("abs loss: |y| must not exceed b");
  return CostFunction(AbsLossCost{std::move(x), y, b});
}

CostFunction CostFunction::hinge(Vec x, double y) {
  if (!all_finite(x)) throw InvalidArgument("hinge: non-finite data");
  if (y != 1.0 && y != -1.0) throw InvalidArgument("hinge: label must be +1 or -1");
  return CostFunction(HingeCost{std::move(x), y});
}

const Vec& CostFunction::data() const {
  return std::visit([](const auto& k) -> const Vec& { return k.x; }, kind_);
}

double CostFunction::value(std::span<const double> w) const {
  const double z = dot(data(), w);
  if (as<LinearCost>()) return z;
  if (const auto* a = as<AbsLossCost>()) return std::abs(z - a->y);
  const auto& h = std::get<HingeCost>(kind_);
  return std::max(0.0, 1.0 - h.y * z);
}

Vec CostFunction::subgradient(std::span<const double> w) const {
  const Vec& x = data();
  if (as<LinearCost>()) return x;
  const double z = dot(x, w);
  if (const auto* a = as<AbsLossCost>()) return scaled(x, sign_of(z - a->y));
  const auto& h = std::get<HingeCost>(kind_);
  if (1.0 - h.y * z > 0.0) return scaled(x, -h.y);
  return Vec(x.size(), 0.0);
}

std::string CostFunction::describe() const {
  if (as<LinearCost>()) return "linear" + vec_text(data());
  if (const auto* a = as<AbsLossCost>()) {
    return "abs_loss" + vec_text(a->x) + ",y=" + fmt(a->y) + ",b=" + fmt(a->b);
  }
  return "hinge" + vec_text(data()) + ",y=" + fmt(std::get<HingeCost>(kind_).y);
}

Vec random_extreme_point(const BallSpec& x_ball, std::mt19937_64& rng,
                         const std::vector<Vec>* vertices) {
  const std::size_t d = x_ball.dim();
  const double rho = x_ball.radius();
  if (vertices && !vertices->empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, vertices->size() - 1);
    return (*vertices)[pick(rng)];
  }
  if (const auto* lp = x_ball.as<LpBall>()) {
    if (lp->p.is_infinite()) {
      Vec v(d);
      for (double& x : v) x = (rng() >> 63) ? -rho : rho;
      return v;
    }
    if (lp->p == Exponent(1.0)) {
      std::uniform_int_distribution<std::size_t> pick(0, 2 * d - 1);
      const std::size_t k = pick(rng);
      Vec v(d, 0.0);
      v[k / 2] = k % 2 ? -rho : rho;
      return v;
    }
  }
  if (x_ball.is_simplex()) {
    std::uniform_int_distribution<std::size_t> pick(0, d - 1);
    Vec v(d, 0.0);
    v[pick(rng)] = 1.0;
    return v;
  }
  // Boundary point along a Gaussian direction; extreme for strictly convex bodies.
  std::normal_distribution<double> normal;
  Vec g(d);
  double n = 0.0;
  while (!(n > 0.0)) {
    for (double& x : g) x = normal(rng);
    n = gauge_norm(x_ball, g);
  }
  return scaled(g, 1.0 / n);
}

Adversary::Adversary(Kind kind, std::uint64_t seed) : kind_(std::move(kind)), rng_(seed) {}

Adversary Adversary::fixed(std::vector<CostFunction> costs) {
  return Adversary(FixedAdversary{std::move(costs)}, 0);
}

Adversary Adversary::sign_greedy(BallSpec x_ball) {
  return Adversary(SignGreedyAdversary{std::move(x_ball)}, 0);
}

Adversary Adversary::random_vertex(BallSpec x_ball, std::uint64_t seed) {
  Adversary a(RandomVertexAdversary{x_ball, seed}, seed);
  const auto* lp = x_ball.as<LpBall>();
  const bool closed_form = x_ball.is_simplex() ||
                           (lp && (lp->p.is_infinite() || lp->p == Exponent(1.0)));
  if (!closed_form) {
    if (auto v = extreme_points(x_ball, kVertexCacheLimit)) a.vertices_ = std::move(*v);
  }
  return a;
}

Adversary Adversary::tree_replay(SignTree tree, std::uint64_t seed) {
  return Adversary(TreeReplayAdversary{std::move(tree), seed}, seed);
}

CostFunction Adversary::next_cost(std::span<const double> w_t, long t) {
  if (t < 1) throw InvalidArgument("next_cost: rounds start at 1");
  if (auto* f = std::get_if<FixedAdversary>(&kind_)) {
    if (static_cast<std::size_t>(t) > f->costs.size()) {
      throw InvalidArgument("next_cost: fixed sequence exhausted");
    }
    return f->costs[static_cast<std::size_t>(t - 1)];
  }
  if (const auto* g = std::get_if<SignGreedyAdversary>(&kind_)) {
    return CostFunction::linear(support_point(g->x_ball, w_t));
  }
  if (const auto* r = std::get_if<RandomVertexAdversary>(&kind_)) {
    return CostFunction::linear(random_extreme_point(r->x_ball, rng_, &vertices_));
  }
  const auto& tr = std::get<TreeReplayAdversary>(kind_);
  const auto level = static_cast<std::size_t>(t);
  if (level > tr.tree.depth) throw InvalidArgument("next_cost: sign tree exhausted");
  const Vec& x = tr.tree.node(level, path_);
  const bool negative = (rng_() >> 63) != 0;
  if (negative) path_ |= std::uint64_t{1} << (level - 1);
  return CostFunction::linear(negative ? scaled(x, -1.0) : x);
}

std::string Adversary::describe() const {
  if (const auto* f = std::get_if<FixedAdversary>(&kind_)) {
    return "fixed(" + std::to_string(f->costs.size()) + ")";
  }
  if (const auto* g = std::get_if<SignGreedyAdversary>(&kind_)) {
    return "sign_greedy(" + g->x_ball.describe() + ")";
  }
  if (const auto* r = std::get_if<RandomVertexAdversary>(&kind_)) {
    return "random_vertex(" + r->x_ball.describe() + ",seed=" + std::to_string(r->seed) + ")";
  }
  const auto& tr = std::get<TreeReplayAdversary>(kind_);
  return "tree_replay(depth=" + std::to_string(tr.tree.depth) + ",seed=" + std::to_string(tr.seed) +
         ")";
}

ValueOrderingReport class_value_ordering_check(const GeometryPair& pair, const Regularizer& reg,
                                               long n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("class_value_ordering_check: n must be at least 1");
  Adversary source = Adversary::random_vertex(pair.x_ball, seed);
  std::vector<CostFunction> lin, abs;
  const Vec origin(pair.dim(), 0.0);
  for (long t = 1; t <= n; ++t) {
    const Vec x = source.next_cost(origin, t).data();
    lin.push_back(CostFunction::linear(x));
    abs.push_back(CostFunction::abs_loss(x, 0.0, 1.0));
  }
  Adversary a = Adversary::fixed(std::move(lin));
  Adversary b = Adversary::fixed(std::move(abs));
  const RegretTrace tl = run(reg, pair, a, n);
  const RegretTrace ta = run(reg, pair, b, n);
  ValueOrderingReport r;
  r.bound = tl.headline_bound();
  r.linear_regret = tl.final_regret();
  r.abs_loss_regret = ta.final_regret();
  r.linear_within_bound = r.linear_regret <= r.bound + 1e-6 + tl.comparator_gap;
  r.abs_loss_within_bound = r.abs_loss_regret <= r.bound + 1e-6 + ta.comparator_gap;
  return r;
}

}  // namespace mirrorgeo
