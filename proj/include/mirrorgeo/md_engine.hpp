#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "mirrorgeo/costs.hpp"
#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/prox.hpp"
#include "mirrorgeo/regularizers.hpp"

namespace mirrorgeo {

/// Feasibility tolerance for iterates.
inline constexpr double kFeasibilityTol = 1e-8;
/// Per-round gradient gauge above which the adversary contract counts as violated.
inline constexpr double kContractTol = 1e-6;

struct MDState {
  Vec w;
  long t = 1;
  double eta = 0.0;
  double sup_psi = 0.0;
  Regularizer reg;
  GeometryPair pair;
};

/// (sup_psi / (n B))^{1/p}, p = q / (q - 1). Throws when sup_psi is not positive and finite.
double step_size(double sup_psi, double q, long n, double b = 1.0);
double step_size(const Regularizer& reg, const BallSpec& w_ball, long n, double b = 1.0);

/// w_1 = argmin_W Psi and the step size for horizon n.
MDState init(const Regularizer& reg, const GeometryPair& pair, long n, double b = 1.0);

/// w_{t+1} = bregman_project(dual_step(w_t, g, eta)).
MDState md_step(const MDState& state, std::span<const double> g);
MDState md_step(const MDState& state, std::span<const double> g, const ProjectionOptions& opts);

struct RoundRecord {
  long t;
  double cost;
  /// ||grad f_t(w_t)||_X.
  double grad_gauge;
  /// (1/t) sum_{s<=t} [f_s(w_s) - f_s(w*)] against the final comparator w*.
  double cum_regret;
  /// sup_psi / (t eta) + (eta^{p-1} / p) (1/t) sum_{s<=t} grad_gauge^p.
  double bound;
};

struct RegretTrace {
  std::vector<RoundRecord> rounds;
  Vec comparator;
  /// (1/n) sum_t f_t(w*).
  double comparator_value = 0.0;
  /// Upper bound on (1/n) sum_t f_t(w*) - min_W (1/n) sum_t f_t.
  double comparator_gap = 0.0;
  double sup_psi = 0.0;
  double q = 2.0;
  double eta = 0.0;
  /// Every gradient gauge <= 1 + kContractTol and (1/n) sum gauge^p <= 1 + 1e-9.
  bool contract_held = true;
  /// Largest gauge of an iterate minus 1 (<= kFeasibilityTol when all iterates lie in W).
  double max_infeasibility = 0.0;

  double final_regret() const { return rounds.empty() ? 0.0 : rounds.back().cum_regret; }
  /// 2 (sup_psi / n)^{1/q}.
  double headline_bound() const;
};

struct RunOptions {
  double b = 1.0;
  ProjectionOptions projection;
};

/// Plays n rounds of mirror descent against the adversary.
RegretTrace run(const Regularizer& reg, const GeometryPair& pair, Adversary& adversary, long n,
                const RunOptions& opts = {});

/// argmin over W of the average of the costs, with a certified gap. Linear costs use the
/// linear oracle; others use the ellipsoid method.
struct ComparatorResult {
  Vec point;
  double value;
  double gap;
};
ComparatorResult best_fixed_point(const BallSpec& w_ball, const std::vector<CostFunction>& costs);

/// CSV with a version comment and columns t,cost,grad_gauge,cum_regret,bound.
void write_trace_csv(std::ostream& out, const RegretTrace& trace);

}  // namespace mirrorgeo
