#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/regularizers.hpp"
#include "mirrorgeo/sign_tree.hpp"

namespace mirrorgeo {

/// Largest depth evaluated by enumerating all 2^n sign paths.
inline constexpr std::size_t kExactDepthCap = 20;
/// Smallest Monte Carlo sample.
inline constexpr long kMinMonteCarloPaths = 100000;

struct PayoffOptions {
  /// Sample sign paths instead of enumerating them. Required beyond kExactDepthCap.
  bool monte_carlo = false;
  long paths = kMinMonteCarloPaths;
  std::uint64_t seed = 0;
};

struct PayoffResult {
  double value;
  /// Zero in exact mode.
  double std_error;
  bool exact;
};

/// E ||(1/n) sum_i e_i x_i(e)||_{W*}. Every node must lie in X (tolerance 1e-9).
PayoffResult tree_payoff(const SignTree& tree, const GeometryPair& pair,
                         const PayoffOptions& opts = {});

/// E ||x_0 + sum_{i<=m} e_i x_i(e)||_{W*}^p for m = depth; nodes are unrestricted.
PayoffResult tree_moment(const SignTree& tree, const GeometryPair& pair, double p,
                         const PayoffOptions& opts = {});

struct TreeSearchBudget {
  /// Exhaustive search when alphabet^(2^n - 1) does not exceed this.
  double max_configurations = 1e6;
  /// Largest depth searched at all.
  std::size_t max_depth = 12;
  int restarts = 32;
  /// Coordinate-ascent sweeps per restart.
  int rounds = 3;
  /// Boundary points drawn for X without a finite vertex list.
  std::size_t sampled_alphabet = 16;
  std::uint64_t seed = 0;
};

struct ValueBound {
  /// tree_payoff of the best tree found; a lower bound on the game value V_n.
  double value;
  SignTree tree;
  bool exhaustive;
  /// Size of the node alphabet searched.
  std::size_t alphabet;
};

/// Maximizes tree_payoff over trees with nodes among the extreme points of X.
ValueBound value_lower_bound(const GeometryPair& pair, long n, const TreeSearchBudget& budget = {});

/// [sup_{m<=n} E||x_0 + sum_{i<=m} e_i x_i||_{W*}^p / (||x_0||_X^p + sum_i E||x_i||_X^p)]^{1/p}.
/// The root counts as x_0 = 0 when absent. Throws on an all-zero tree.
double mtype_ratio(const SignTree& tree, const GeometryPair& pair, double p);

struct CpEstimate {
  /// Largest witnessed ratio, a lower bound on C_p.
  double value;
  SignTree tree;
  /// True when max_evaluations stopped the search early.
  bool budget_exhausted;
};

struct CpBudget {
  std::size_t depth = 4;
  int restarts = 32;
  int rounds = 3;
  long max_evaluations = 2000000;
  std::size_t sampled_alphabet = 16;
  std::uint64_t seed = 0;
};

/// Coordinate ascent of mtype_ratio over trees (root included) with nodes among the extreme
/// points of X and the zero vector. p must lie in (1, 2].
CpEstimate estimate_cp(const GeometryPair& pair, double p, const CpBudget& budget = {});

struct SandwichRow {
  long n;
  double lower;
  /// Worst measured MD regret over SignGreedy, RandomVertex x8 and the expected regret
  /// against the best lower-bound tree.
  double upper_md;
  /// 2 D n^{-(1 - 1/p)} with D = d_p_upper.
  double upper_dp;
  double c_p_hat;
  bool lower_ok;
  bool md_ok;
  bool slack_ok;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  /// Dual exponent of the regularizer, used for upper_dp.
  double p;
  /// Exponent of the M-type estimate, (1 + p) / 2.
  double p_prime;
  /// 2 d_p_upper, a constant with V_n <= D n^{-(1 - 1/p)}.
  double d_hat;
  bool passed;
  /// Offending configurations; empty when passed.
  std::vector<std::string> failures;
};

struct SandwichOptions {
  TreeSearchBudget tree;
  CpBudget cp;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Value lower bound, measured MD regret and the D_p upper bound for each n.
SandwichReport sandwich_report(const GeometryPair& pair, const Regularizer& reg,
                               const std::vector<long>& n_list, const SandwichOptions& opts = {});

/// CSV with a version comment and columns n,lower,upper_md,upper_dp,c_p_hat.
void write_sandwich_csv(std::ostream& out, const SandwichReport& report);

/// Node alphabet: extreme points of X when at most `limit`, else the +-normalized coordinate
/// directions plus `sampled` random boundary points drawn from `seed`.
std::vector<Vec> node_alphabet(const BallSpec& x_ball, std::size_t sampled, std::uint64_t seed,
                               std::size_t limit = 256);

}  // namespace mirrorgeo
