#include "mirrorgeo/game_value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "mirrorgeo/costs.hpp"
#include "mirrorgeo/md_engine.hpp"
#include "mirrorgeo/vector_ops.hpp"

namespace mirrorgeo {

namespace {

constexpr double kNodeTol = 1e-9;
constexpr double kImprovement = 1e-13;
constexpr double kSlackConstant = 1104.0;

void check_tree(const SignTree& tree, const GeometryPair& pair, const char* what) {
  require_same_dim(tree.dim, pair.dim(), what);
  if (tree.nodes.size() != (std::size_t{1} << tree.depth) - 1) {
    throw InvalidArgument(std::string(what) + ": node count must be 2^depth - 1");
  }
  for (const Vec& v : tree.nodes) require_same_dim(v.size(), tree.dim, what);
  if (tree.root) require_same_dim(tree.root->size(), tree.dim, what);
}

// Calls leaf(sum) for every sign path, where sum = base + sum_i e_i x_i(e), depth first with
// e_i = +1 before e_i = -1.
template <class Leaf>
void visit_paths(const SignTree& tree, std::vector<Vec>& partial, std::size_t level,
                 std::uint64_t prefix, Leaf& leaf) {
  if (level > tree.depth) {
    leaf(partial[tree.depth]);
    return;
  }
  const Vec& x = tree.node(level, prefix);
  for (int neg = 0; neg < 2; ++neg) {
    partial[level] = partial[level - 1];
    axpy(neg ? -1.0 : 1.0, x, partial[level]);
    visit_paths(tree, partial, level + 1, prefix | (std::uint64_t{neg != 0} << (level - 1)), leaf);
  }
}

template <class Leaf>
void for_each_path(const SignTree& tree, const Vec& base, Leaf&& leaf) {
  std::vector<Vec> partial(tree.depth + 1, base);
  visit_paths(tree, partial, 1, 0, leaf);
}

PayoffResult path_average(const SignTree& tree, const Vec& base, const PayoffOptions& opts,
                          const std::function<double(const Vec&)>& score, const char* what) {
  if (!opts.monte_carlo) {
    if (tree.depth > kExactDepthCap) {
      throw InvalidArgument(std::string(what) + ": depth above the exact cap needs Monte Carlo");
    }
    double total = 0.0;
    for_each_path(tree, base, [&](const Vec& s) { total += score(s); });
    return {total / std::ldexp(1.0, static_cast<int>(tree.depth)), 0.0, true};
  }
  if (opts.paths < kMinMonteCarloPaths) {
    throw InvalidArgument(std::string(what) + ": Monte Carlo needs at least 1e5 paths");
  }
  std::mt19937_64 rng(opts.seed);
  double mean = 0.0, m2 = 0.0;
  Vec sum(tree.dim);
  for (long k = 1; k <= opts.paths; ++k) {
    const std::uint64_t bits = rng();
    sum = base;
    std::uint64_t prefix = 0;
    for (std::size_t i = 1; i <= tree.depth; ++i) {
      const bool negative = (bits >> (i - 1)) & 1;
      axpy(negative ? -1.0 : 1.0, tree.node(i, prefix), sum);
      if (negative) prefix |= std::uint64_t{1} << (i - 1);
    }
    const double v = score(sum);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double var = opts.paths > 1 ? m2 / static_cast<double>(opts.paths - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(opts.paths)), false};
}

std::pair<std::size_t, std::uint64_t> level_and_path(std::size_t index) {
  std::size_t level = 1;
  while ((std::size_t{1} << level) - 1 <= index) ++level;
  return {level, static_cast<std::uint64_t>(index + 1 - (std::size_t{1} << (level - 1)))};
}

// Leaf sums sum_i e_i x_i(e) for every path, updated node by node.
class LeafCache {
 public:
  LeafCache(std::size_t depth, std::size_t dim, const BallSpec& w_ball)
      : depth_(depth),
        dim_(dim),
        w_ball_(w_ball),
        sums_((std::size_t{1} << depth) * dim, 0.0),
        norms_(std::size_t{1} << depth, 0.0),
        nodes_((std::size_t{1} << depth) - 1, Vec(dim, 0.0)) {}

  void set(std::size_t index, const Vec& v) {
    const auto [level, path] = level_and_path(index);
    Vec delta = sub(v, nodes_[index]);
    nodes_[index] = v;
    const std::size_t stride = std::size_t{1} << (level - 1);
    const std::size_t leaves = std::size_t{1} << depth_;
    for (std::size_t leaf = static_cast<std::size_t>(path); leaf < leaves; leaf += stride) {
      const double s = (leaf >> (level - 1)) & 1 ? -1.0 : 1.0;
      double* row = &sums_[leaf * dim_];
      for (std::size_t j = 0; j < dim_; ++j) row[j] += s * delta[j];
      norms_[leaf] = dual_norm(w_ball_, std::span<const double>(row, dim_));
    }
  }

  double value() const {
    double total = 0.0;
    for (double x : norms_) total += x;
    return total / (static_cast<double>(norms_.size()) * static_cast<double>(depth_));
  }

  const std::vector<Vec>& nodes() const { return nodes_; }

 private:
  std::size_t depth_;
  std::size_t dim_;
  const BallSpec& w_ball_;
  std::vector<double> sums_;
  std::vector<double> norms_;
  std::vector<Vec> nodes_;
};

SignTree tree_from(const std::vector<Vec>& nodes, std::size_t depth, std::size_t dim) {
  SignTree t(depth, dim);
  t.nodes = nodes;
  return t;
}

// Tries every alphabet entry at one node and keeps the best; returns the new value.
double improve_node(LeafCache& cache, std::size_t index, const std::vector<Vec>& alphabet,
                    double current) {
  const Vec keep = cache.nodes()[index];
  Vec best = keep;
  double best_value = current;
  for (const Vec& a : alphabet) {
    cache.set(index, a);
    const double v = cache.value();
    if (v > best_value + kImprovement) {
      best_value = v;
      best = a;
    }
  }
  cache.set(index, best);
  return cache.value();
}

double mtype_ratio_impl(const std::vector<Vec>& nodes, const Vec& root, std::size_t depth,
                        const GeometryPair& pair, double p) {
  double denom = std::pow(gauge_norm(pair.x_ball, root), p);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [level, path] = level_and_path(k);
    (void)path;
    denom += std::pow(gauge_norm(pair.x_ball, nodes[k]), p) / std::ldexp(1.0, static_cast<int>(level - 1));
  }
  if (!(denom > 0.0)) throw InvalidArgument("mtype_ratio: the tree is identically zero");
  if (!std::isfinite(denom)) return 0.0;
  // Prefix sums level by level: level m holds 2^m partial martingale values.
  double best = std::pow(dual_norm(pair.w_ball, root), p);
  std::vector<Vec> prev{root};
  for (std::size_t m = 1; m <= depth; ++m) {
    std::vector<Vec> next(std::size_t{1} << m);
    double total = 0.0;
    for (std::size_t path = 0; path < next.size(); ++path) {
      const std::size_t prefix = path & ((std::size_t{1} << (m - 1)) - 1);
      const double s = (path >> (m - 1)) & 1 ? -1.0 : 1.0;
      next[path] = prev[prefix];
      axpy(s, nodes[SignTree::index(m, prefix)], next[path]);
      total += std::pow(dual_norm(pair.w_ball, next[path]), p);
    }
    best = std::max(best, total / static_cast<double>(next.size()));
    prev = std::move(next);
  }
  return std::pow(best / denom, 1.0 / p);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

PayoffResult tree_payoff(const SignTree& tree, const GeometryPair& pair, const PayoffOptions& opts) {
  check_tree(tree, pair, "tree_payoff");
  if (tree.depth == 0) throw InvalidArgument("tree_payoff: depth must be at least 1");
  for (const Vec& v : tree.nodes) {
    if (!contains(pair.x_ball, v, kNodeTol)) throw InvalidArgument("tree_payoff: node outside X");
  }
  const double n = static_cast<double>(tree.depth);
  return path_average(
      tree, Vec(tree.dim, 0.0), opts,
      [&](const Vec& s) { return dual_norm(pair.w_ball, s) / n; }, "tree_payoff");
}

PayoffResult tree_moment(const SignTree& tree, const GeometryPair& pair, double p,
                         const PayoffOptions& opts) {
  check_tree(tree, pair, "tree_moment");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("tree_moment: p must be finite and >= 1");
  const Vec base = tree.root.value_or(Vec(tree.dim, 0.0));
  return path_average(
      tree, base, opts, [&](const Vec& s) { return std::pow(dual_norm(pair.w_ball, s), p); },
      "tree_moment");
}

std::vector<Vec> node_alphabet(const BallSpec& x_ball, std::size_t sampled, std::uint64_t seed,
                               std::size_t limit) {
  if (auto pts = extreme_points(x_ball, limit)) {
    if (!pts->empty()) return *pts;
  }
  const std::size_t d = x_ball.dim();
  std::vector<Vec> out;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d, 0.0);
    e[i] = 1.0;
    const double g = gauge_norm(x_ball, e);
    if (!(g > 0.0) || is_unbounded(g)) continue;
    out.push_back(scaled(e, 1.0 / g));
    out.push_back(scaled(e, -1.0 / g));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < sampled; ++k) out.push_back(random_extreme_point(x_ball, rng));
  return out;
}

ValueBound value_lower_bound(const GeometryPair& pair, long n, const TreeSearchBudget& budget) {
  if (n < 1) throw InvalidArgument("value_lower_bound: n must be at least 1");
  if (static_cast<std::size_t>(n) > budget.max_depth) {
    throw InvalidArgument("value_lower_bound: depth exceeds the search budget");
  }
  const auto depth = static_cast<std::size_t>(n);
  const std::size_t d = pair.dim();
  const std::vector<Vec> alphabet = node_alphabet(pair.x_ball, budget.sampled_alphabet, budget.seed);
  const std::size_t count = (std::size_t{1} << depth) - 1;
  const double log_configs = static_cast<double>(count) * std::log(static_cast<double>(alphabet.size()));
  LeafCache cache(depth, d, pair.w_ball);

  std::vector<Vec> best_nodes;
  double best = -1.0;
  const bool exhaustive = log_configs <= std::log(budget.max_configurations) + 1e-12;
  if (exhaustive) {
    std::vector<std::size_t> digit(count, 0);
    for (std::size_t k = 0; k < count; ++k) cache.set(k, alphabet[0]);
    while (true) {
      const double v = cache.value();
      if (v > best + kImprovement) {
        best = v;
        best_nodes = cache.nodes();
      }
      std::size_t k = 0;
      while (k < count && digit[k] + 1 == alphabet.size()) {
        digit[k] = 0;
        cache.set(k, alphabet[0]);
        ++k;
      }
      if (k == count) break;
      cache.set(k, alphabet[++digit[k]]);
    }
  } else {
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int restart = 0; restart < std::max(budget.restarts, 1); ++restart) {
      double v;
      if (restart == 0) {
        // Greedy level by level with deeper levels at zero.
        for (std::size_t k = 0; k < count; ++k) cache.set(k, Vec(d, 0.0));
        v = cache.value();
        for (std::size_t k = 0; k < count; ++k) {
          cache.set(k, alphabet[0]);
          v = improve_node(cache, k, alphabet, cache.value());
        }
      } else {
        for (std::size_t k = 0; k < count; ++k) cache.set(k, alphabet[pick(rng)]);
        v = cache.value();
      }
      for (int round = 0; round < budget.rounds; ++round) {
        const double before = v;
        for (std::size_t k = 0; k < count; ++k) v = improve_node(cache, k, alphabet, v);
        if (!(v > before + kImprovement)) break;
      }
      if (v > best + kImprovement) {
        best = v;
        best_nodes = cache.nodes();
      }
    }
  }
  SignTree tree = tree_from(best_nodes, depth, d);
  const double exact = tree_payoff(tree, pair).value;
  return {exact, std::move(tree), exhaustive, alphabet.size()};
}

double mtype_ratio(const SignTree& tree, const GeometryPair& pair, double p) {
  check_tree(tree, pair, "mtype_ratio");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("mtype_ratio: p must be finite and >= 1");
  return mtype_ratio_impl(tree.nodes, tree.root.value_or(Vec(tree.dim, 0.0)), tree.depth, pair, p);
}

CpEstimate estimate_cp(const GeometryPair& pair, double p, const CpBudget& budget) {
  if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("estimate_cp: p must lie in (1, 2]");
  if (budget.depth < 1 || budget.depth > kExactDepthCap) {
    throw InvalidArgument("estimate_cp: depth must lie in [1, 20]");
  }
  const std::size_t d = pair.dim();
  const std::size_t depth = budget.depth;
  std::vector<Vec> alphabet = node_alphabet(pair.x_ball, budget.sampled_alphabet, budget.seed);
  alphabet.emplace_back(d, 0.0);
  const auto nonzero = std::find_if(alphabet.begin(), alphabet.end(),
                                    [](const Vec& v) { return lp_norm(v, Exponent::infinity()) > 0.0; });
  SignTree empty(depth, d);
  if (nonzero == alphabet.end()) return {0.0, empty, false};

  // Slot 0 is the root; slot k + 1 is node k.
  const std::size_t slots = (std::size_t{1} << depth);
  std::vector<Vec> state(slots, Vec(d, 0.0));
  long evaluations = 0;
  bool exhausted = false;
  const auto eval = [&]() -> double {
    ++evaluations;
    const std::vector<Vec> nodes(state.begin() + 1, state.end());
    double denom_check = 0.0;
    for (const Vec& v : state) denom_check += lp_norm(v, Exponent::infinity());
    if (!(denom_check > 0.0)) return -1.0;
    return mtype_ratio_impl(nodes, state[0], depth, pair, p);
  };

  std::mt19937_64 rng(budget.seed);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  double best = -1.0;
  std::vector<Vec> best_state = state;
  for (int restart = 0; restart < std::max(budget.restarts, 1) && !exhausted; ++restart) {
    for (Vec& v : state) v = alphabet[pick(rng)];
    if (restart == 0) state[0] = *nonzero;
    double v = eval();
    if (v < 0.0) {
      state[0] = *nonzero;
      v = eval();
    }
    for (int round = 0; round < budget.rounds && !exhausted; ++round) {
      const double before = v;
      // Whole-level moves first: level-constant trees are common maximizers.
      for (std::size_t level = 1; level <= depth && !exhausted; ++level) {
        const std::size_t lo = std::size_t{1} << (level - 1), hi = std::size_t{1} << level;
        const std::vector<Vec> keep(state.begin() + static_cast<std::ptrdiff_t>(lo),
                                    state.begin() + static_cast<std::ptrdiff_t>(hi));
        const Vec* choice = nullptr;
        for (const Vec& a : alphabet) {
          if (evaluations >= budget.max_evaluations) {
            exhausted = true;
            break;
          }
          std::fill(state.begin() + static_cast<std::ptrdiff_t>(lo),
                    state.begin() + static_cast<std::ptrdiff_t>(hi), a);
          const double c = eval();
          if (c > v + kImprovement) {
            v = c;
            choice = &a;
          }
        }
        if (choice) {
          std::fill(state.begin() + static_cast<std::ptrdiff_t>(lo),
                    state.begin() + static_cast<std::ptrdiff_t>(hi), *choice);
        } else {
          std::copy(keep.begin(), keep.end(), state.begin() + static_cast<std::ptrdiff_t>(lo));
        }
      }
      for (std::size_t k = 0; k < slots && !exhausted; ++k) {
        const Vec keep = state[k];
        Vec choice = keep;
        for (const Vec& a : alphabet) {
          if (evaluations >= budget.max_evaluations) {
            exhausted = true;
            break;
          }
          state[k] = a;
          const double c = eval();
          if (c > v + kImprovement) {
            v = c;
            choice = a;
          }
        }
        state[k] = choice;
      }
      if (!(v > before + kImprovement)) break;
    }
    if (v > best) {
      best = v;
      best_state = state;
    }
  }
  SignTree tree(depth, d);
  tree.root = best_state[0];
  tree.nodes.assign(best_state.begin() + 1, best_state.end());
  return {mtype_ratio(tree, pair, p), std::move(tree), exhausted};
}

SandwichReport sandwich_report(const GeometryPair& pair, const Regularizer& reg,
                               const std::vector<long>& n_list, const SandwichOptions& opts) {
  require_same_dim(reg.dim(), pair.dim(), "sandwich_report");
  SandwichReport report;
  report.p = reg.p_exponent();
  if (!(report.p > 1.0 && report.p <= 2.0)) {
    throw InvalidArgument("sandwich_report: the regularizer's dual exponent must lie in (1, 2]");
  }
  report.p_prime = 0.5 * (1.0 + report.p);
  const double dp = d_p_upper(reg, pair.w_ball, report.p);
  report.d_hat = 2.0 * dp;
  const double c_hat = estimate_cp(pair, report.p_prime, opts.cp).value;
  const double slack_bound =
      kSlackConstant * report.d_hat / ((report.p - report.p_prime) * (report.p - report.p_prime));
  const bool slack_ok = c_hat <= slack_bound;
  if (!slack_ok) {
    report.failures.push_back("c_p_hat " + fmt(c_hat) + " exceeds 1104 D/(p-p')^2 = " + fmt(slack_bound));
  }

  for (long n : n_list) {
    const ValueBound vb = value_lower_bound(pair, n, opts.tree);
    double upper = 0.0, gap = 0.0;
    const auto consider = [&](const RegretTrace& tr) {
      upper = std::max(upper, tr.final_regret());
      gap = std::max(gap, tr.comparator_gap);
    };
    {
      Adversary a = Adversary::sign_greedy(pair.x_ball);
      consider(run(reg, pair, a, n));
    }
    for (std::uint64_t k = 0; k < 8; ++k) {
      Adversary a = Adversary::random_vertex(pair.x_ball, opts.seed + k);
      consider(run(reg, pair, a, n));
    }
    {
      // Exact expected regret against the best tree, averaged over every sign path.
      const std::uint64_t paths = std::uint64_t{1} << n;
      double total = 0.0;
      for (std::uint64_t path = 0; path < paths; ++path) {
        std::vector<CostFunction> costs;
        std::uint64_t prefix = 0;
        for (long t = 1; t <= n; ++t) {
          const auto level = static_cast<std::size_t>(t);
          const bool negative = (path >> (level - 1)) & 1;
          const Vec& x = vb.tree.node(level, prefix);
          costs.push_back(CostFunction::linear(negative ? scaled(x, -1.0) : x));
          if (negative) prefix |= std::uint64_t{1} << (level - 1);
        }
        Adversary a = Adversary::fixed(std::move(costs));
        const RegretTrace tr = run(reg, pair, a, n);
        total += tr.final_regret();
        gap = std::max(gap, tr.comparator_gap);
      }
      upper = std::max(upper, total / static_cast<double>(paths));
    }
    SandwichRow row;
    row.n = n;
    row.lower = vb.value;
    row.upper_md = upper;
    row.upper_dp = 2.0 * dp * std::pow(static_cast<double>(n), -(1.0 - 1.0 / report.p));
    row.c_p_hat = c_hat;
    row.lower_ok = row.lower <= 2.0 * row.upper_md + opts.tol + gap;
    row.md_ok = row.upper_md <= row.upper_dp + opts.tol + gap;
    row.slack_ok = slack_ok;
    if (!row.lower_ok) {
      report.failures.push_back("n=" + std::to_string(n) + ": lower " + fmt(row.lower) +
                                " exceeds 2 upper_md " + fmt(2.0 * row.upper_md));
    }
    if (!row.md_ok) {
      report.failures.push_back("n=" + std::to_string(n) + ": upper_md " + fmt(row.upper_md) +
                                " exceeds upper_dp " + fmt(row.upper_dp));
    }
    report.rows.push_back(row);
  }
  report.passed = report.failures.empty();
  return report;
}

void write_sandwich_csv(std::ostream& out, const SandwichReport& report) {
  out << "# mirrorgeo-csv v1\n";
  out << "n,lower,upper_md,upper_dp,c_p_hat\n";
  char buf[160];
  for (const SandwichRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g\n", r.n, r.lower, r.upper_md,
                  r.upper_dp, r.c_p_hat);
    out << buf;
  }
}

}  // namespace mirrorgeo
