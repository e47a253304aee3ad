#include "mirrorgeo/md_engine.hpp"

#include <cmath>
#include <cstdio>

#include "mirrorgeo/linalg.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

constexpr double kComparatorTol = 1e-8;
constexpr int kComparatorIterations = 400000;

double infeasibility(const BallSpec& ball, std::span<const double> w) {
  if (ball.is_simplex()) {
    double s = 0.0, neg = 0.0;
    for (double x : w) {
      s += x;
      neg = std::max(neg, -x);
    }
    return neg + std::abs(s - 1.0);
  }
  return gauge_norm(ball, w) - 1.0;
}

// Average cost and subgradient.
double average_cost(const std::vector<CostFunction>& costs, std::span<const double> w, Vec& grad) {
  grad.assign(w.size(), 0.0);
  double v = 0.0;
  for (const CostFunction& f : costs) {
    v += f.value(w);
    axpy(1.0, f.subgradient(w), grad);
  }
  const double inv = 1.0 / static_cast<double>(costs.size());
  for (double& g : grad) g *= inv;
  return v * inv;
}

ComparatorResult comparator_on_simplex(const std::vector<CostFunction>& costs, std::size_t d) {
  if (d == 1) {
    Vec g;
    const Vec w{1.0};
    return {w, average_cost(costs, w, g), 0.0};
  }
  // w = (z, 1 - sum z) with z >= 0, sum z <= 1.
  const auto lift = [d](std::span<const double> z) {
    Vec w(z.begin(), z.end());
    double s = 0.0;
    for (double x : z) s += x;
    w.push_back(1.0 - s);
    (void)d;
    return w;
  };
  EllipsoidOracle oracle = [&](std::span<const double> z, Vec& grad) -> std::optional<double> {
    grad.assign(z.size(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] < 0.0) {
        grad[i] = -1.0;
        return std::nullopt;
      }
      s += z[i];
    }
    if (s > 1.0) {
      grad.assign(z.size(), 1.0);
      return std::nullopt;
    }
    Vec gw;
    const double v = average_cost(costs, lift(z), gw);
    for (std::size_t i = 0; i < z.size(); ++i) grad[i] = gw[i] - gw.back();
    return v;
  };
  EllipsoidRetraction retract = [&](std::span<const double> z) -> std::optional<Vec> {
    Vec w = lift(z);
    double s = 0.0;
    for (double& x : w) s += (x = std::max(x, 0.0));
    if (!(s > 0.0)) return std::nullopt;
    Vec out(z.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[i] / s;
    return out;
  };
  const Vec center(d - 1, 1.0 / static_cast<double>(d));
  const EllipsoidResult r =
      ellipsoid_minimize(oracle, center, 1.0, kComparatorTol, kComparatorIterations, retract);
  if (!r.found_feasible) throw SolverError("best_fixed_point: no feasible point found", 0.0);
  return {lift(r.best_point), r.best_value, std::max(0.0, r.best_value - r.lower_bound)};
}

}  // namespace

double step_size(double sup_psi, double q, long n, double b) {
  if (n < 1) throw InvalidArgument("step_size: n must be at least 1");
  if (!(sup_psi > 0.0) || !std::isfinite(sup_psi)) {
    throw InvalidArgument("step_size: sup of Psi over W must be positive and finite");
  }
  if (!(b > 0.0)) throw InvalidArgument("step_size: B must be positive");
  const double p = q / (q - 1.0);
  return std::pow(sup_psi / (static_cast<double>(n) * b), 1.0 / p);
}

double step_size(const Regularizer& reg, const BallSpec& w_ball, long n, double b) {
  return step_size(sup_over_ball(reg, w_ball).value, reg.q_exponent(), n, b);
}

MDState init(const Regularizer& reg, const GeometryPair& pair, long n, double b) {
  require_same_dim(reg.dim(), pair.dim(), "init");
  const double sup = sup_over_ball(reg, pair.w_ball).value;
  const double eta = step_size(sup, reg.q_exponent(), n, b);
  const std::size_t d = pair.dim();
  Vec w1;
  if (reg.as<EntropyPsi>()) {
    if (!pair.w_ball.is_simplex()) throw InvalidArgument("init: entropy needs the simplex");
    w1.assign(d, 1.0 / static_cast<double>(d));
  } else if (contains(pair.w_ball, Vec(d, 0.0), 0.0)) {
    w1.assign(d, 0.0);
  } else {
    // Psi >= 0 = Psi(0) with grad Psi(0) = 0, so argmin_W Psi is the projection of 0.
    w1 = bregman_project(reg, pair.w_ball, Vec(d, 0.0)).point;
  }
  return MDState{std::move(w1), 1, eta, sup, reg, pair};
}

MDState md_step(const MDState& state, std::span<const double> g) {
  return md_step(state, g, ProjectionOptions{});
}

MDState md_step(const MDState& state, std::span<const double> g, const ProjectionOptions& opts) {
  const Vec y = dual_step(state.reg, state.w, g, state.eta);
  MDState next = state;
  next.w = bregman_project(state.reg, state.pair.w_ball, y, opts).point;
  next.t = state.t + 1;
  return next;
}

double RegretTrace::headline_bound() const {
  const double n = static_cast<double>(rounds.size());
  return 2.0 * std::pow(sup_psi / n, 1.0 / q);
}

ComparatorResult best_fixed_point(const BallSpec& w_ball, const std::vector<CostFunction>& costs) {
  if (costs.empty()) throw InvalidArgument("best_fixed_point: no costs");
  const std::size_t d = w_ball.dim();
  bool linear = true;
  for (const CostFunction& f : costs) {
    require_same_dim(f.dim(), d, "best_fixed_point");
    linear = linear && f.is_linear();
  }
  if (linear) {
    Vec mean(d, 0.0);
    for (const CostFunction& f : costs) axpy(1.0, f.data(), mean);
    for (double& x : mean) x /= static_cast<double>(costs.size());
    Vec w = lmo(w_ball, mean);
    Vec g;
    const double v = average_cost(costs, w, g);
    return {std::move(w), v, 0.0};
  }
  if (w_ball.is_simplex()) return comparator_on_simplex(costs, d);
  EllipsoidOracle oracle = [&](std::span<const double> x, Vec& grad) -> std::optional<double> {
    const double gx = gauge_norm(w_ball, x);
    if (gx > 1.0) {
      if (is_unbounded(gx)) throw InvalidArgument("best_fixed_point: W must have full span");
      grad = gauge_subgradient(w_ball, x);
      return std::nullopt;
    }
    return average_cost(costs, x, grad);
  };
  EllipsoidRetraction retract = [&](std::span<const double> x) -> std::optional<Vec> {
    const double gx = gauge_norm(w_ball, x);
    if (!(gx > 0.0) || is_unbounded(gx)) return std::nullopt;
    return scaled(x, 1.0 / gx);
  };
  const double radius = 1.01 * euclidean_radius_bound(w_ball);
  const EllipsoidResult r = ellipsoid_minimize(oracle, Vec(d, 0.0), radius, kComparatorTol,
                                               kComparatorIterations, retract);
  if (!r.found_feasible) throw SolverError("best_fixed_point: no feasible point found", 0.0);
  return {r.best_point, r.best_value, std::max(0.0, r.best_value - r.lower_bound)};
}

RegretTrace run(const Regularizer& reg, const GeometryPair& pair, Adversary& adversary, long n,
                const RunOptions& opts) {
  MDState state = init(reg, pair, n, opts.b);
  const double p = reg.p_exponent();
  RegretTrace trace;
  trace.sup_psi = state.sup_psi;
  trace.q = reg.q_exponent();
  trace.eta = state.eta;
  trace.max_infeasibility = -std::numeric_limits<double>::infinity();

  std::vector<CostFunction> costs;
  costs.reserve(static_cast<std::size_t>(n));
  std::vector<double> paid, gauges;
  for (long t = 1; t <= n; ++t) {
    CostFunction f = adversary.next_cost(state.w, t);
    require_same_dim(f.dim(), pair.dim(), "run");
    trace.max_infeasibility = std::max(trace.max_infeasibility, infeasibility(pair.w_ball, state.w));
    const Vec g = f.subgradient(state.w);
    paid.push_back(f.value(state.w));
    gauges.push_back(gauge_norm(pair.x_ball, g));
    costs.push_back(std::move(f));
    if (t < n) state = md_step(state, g, opts.projection);
  }

  const ComparatorResult best = best_fixed_point(pair.w_ball, costs);
  trace.comparator = best.point;
  trace.comparator_value = best.value;
  trace.comparator_gap = best.gap;

  double sum_paid = 0.0, sum_best = 0.0, sum_gp = 0.0;
  for (long t = 1; t <= n; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    sum_paid += paid[i];
    sum_best += costs[i].value(best.point);
    sum_gp += std::pow(gauges[i], p);
    if (gauges[i] > 1.0 + kContractTol) trace.contract_held = false;
    const double td = static_cast<double>(t);
    trace.rounds.push_back({t, paid[i], gauges[i], (sum_paid - sum_best) / td,
                            state.sup_psi / (td * state.eta) +
                                std::pow(state.eta, p - 1.0) / p * sum_gp / td});
  }
  if (sum_gp / static_cast<double>(n) > 1.0 + 1e-9) trace.contract_held = false;
  return trace;
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace) {
  out << "# mirrorgeo-csv v1\n";
  out << "t,cost,grad_gauge,cum_regret,bound\n";
  char buf[160];
  for (const RoundRecord& r : trace.rounds) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g\n", r.t, r.cost, r.grad_gauge,
                  r.cum_regret, r.bound);
    out << buf;
  }
}

}  // namespace mirrorgeo
