// Runs every acceptance criterion at its stated tolerance and prints one line per criterion.
// Exit status is 0 when every failure is in kKnownFailures; README.md explains those.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mirrorgeo/game_value.hpp"
#include "mirrorgeo/harness.hpp"
#include "mirrorgeo/md_engine.hpp"
#include "mirrorgeo/regularizers.hpp"
#include "mirrorgeo/vector_ops.hpp"

using namespace mirrorgeo;

namespace {

// Criteria that cannot hold as stated; see README.md.
const std::set<std::string> kKnownFailures = {"5c", "9b"};

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome md_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_ratio = 0.0, worst_excess = -1e300;
  int runs = 0;
  bool ok = true;
  const auto cat = catalog();
  for (const CatalogEntry& e : cat) {
    for (long n : {100L, 1000L, 10000L}) {
      const SuiteResult s = worst_regret(e.reg, e.pair, n, 0, 8);
      runs += 9;
      worst_ratio = std::max(worst_ratio, s.worst_regret / s.bound);
      worst_excess = std::max(worst_excess, s.worst_regret - s.bound);
      ok = ok && s.contract_held && s.worst_regret <= s.bound + 1e-6;
    }
  }
  const double t = seconds_since(t0);
  ok = ok && cat.size() >= 8 && t <= 300.0;
  return {ok, std::to_string(cat.size()) + " pairs, " + std::to_string(runs) +
                  " runs, max regret/bound " + fmt("%.4f", worst_ratio) + ", max excess " +
                  fmt("%.3g", worst_excess)};
}

Outcome classical_equivalence() {
  const long n = 1000;
  double pgd = 0.0, mw = 0.0;
  {
    const GeometryPair pair(BallSpec::lp(2.0, 5), BallSpec::lp(2.0, 5));
    MDState s = init(Regularizer::euclidean(5), pair, n);
    Adversary adv = Adversary::random_vertex(pair.x_ball, 8);
    Vec w(5, 0.0);
    for (long t = 1; t <= n; ++t) {
      const Vec g = adv.next_cost(s.w, t).data();
      s = md_step(s, g);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s.eta * g[i];
      const double nw = norm2(w);
      if (nw > 1.0) {
        for (double& x : w) x /= nw;
      }
      pgd = std::max(pgd, max_abs_diff(w, s.w));
    }
  }
  {
    const GeometryPair pair(BallSpec::simplex(6), BallSpec::lp(Exponent::infinity(), 6));
    MDState s = init(Regularizer::entropy(6), pair, n);
    Adversary adv = Adversary::sign_greedy(pair.x_ball);
    Vec w(6, 1.0 / 6.0);
    for (long t = 1; t <= n; ++t) {
      const Vec g = adv.next_cost(s.w, t).data();
      s = md_step(s, g);
      double z = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] *= std::exp(-s.eta * g[i]));
      for (double& x : w) x /= z;
      mw = std::max(mw, max_abs_diff(w, s.w));
    }
  }
  return {pgd <= 1e-10 && mw <= 1e-10,
          "max iterate gap PGD " + fmt("%.2g", pgd) + ", MW " + fmt("%.2g", mw)};
}

struct KindCase {
  std::string name;
  Regularizer reg;
  BallSpec ball;
};

std::vector<KindCase> every_kind() {
  const auto hull = rank_one_sign_matrices(2, 2);
  return {
      {"psi_r 1.5", Regularizer::psi_r(1.5, 4), BallSpec::lp(1.5, 4)},
      {"psi_r 2", Regularizer::psi_r(2.0, 3), BallSpec::lp(2.0, 3)},
      {"psi_r 3", Regularizer::psi_r(3.0, 3), BallSpec::lp(3.0, 3)},
      {"scaled psi_r", scaled_psi_for_lp_pair(Exponent(1.0), Exponent::infinity(), 16, 1.4),
       BallSpec::lp(1.0, 16)},
      {"entropy", Regularizer::entropy(4), BallSpec::simplex(4)},
      {"euclidean", Regularizer::euclidean(3, 2.0), BallSpec::lp(2.0, 3)},
      {"group", group_regularizer_for_linf(2.0, 2, 8),
       BallSpec::group(Exponent(2.0), Exponent(1.0), 2, 8)},
      {"vertex hull", vertex_hull_regularizer_for(hull, BallSpec::lp(1.0, 4)),
       BallSpec::vertex_hull(hull)},
      {"schatten", Regularizer::schatten_psi_r(1.5, 2, 3), BallSpec::schatten(Exponent(1.5), 2, 3)},
  };
}

// Interior sample; simplex points are pulled away from the boundary where entropy is flat.
Vec interior_sample(const BallSpec& ball, std::mt19937_64& rng) {
  Vec w = sample_in_ball(ball, rng);
  if (ball.is_simplex()) {
    const double d = static_cast<double>(w.size());
    for (double& x : w) x = 0.9 * x + 0.1 / d;
  }
  return w;
}

// Central differences along axes (along e_i - e_0 on the simplex). Coordinates within 1e-3 of
// zero are skipped: psi_r with r < 2 has unbounded curvature there.
double gradient_error(const Regularizer& reg, const BallSpec& ball, const Vec& w) {
  const Vec g = psi_grad(reg, w);
  constexpr double h = 1e-6;
  Vec fd, an;
  for (std::size_t i = ball.is_simplex() ? 1 : 0; i < w.size(); ++i) {
    if (!ball.is_simplex() && std::abs(w[i]) < 1e-3) continue;
    Vec dir(w.size(), 0.0);
    dir[i] = 1.0;
    if (ball.is_simplex()) dir[0] = -1.0;
    Vec plus = w, minus = w;
    axpy(h, dir, plus);
    axpy(-h, dir, minus);
    fd.push_back((psi_eval(reg, plus) - psi_eval(reg, minus)) / (2 * h));
    an.push_back(dot(g, dir));
  }
  return norm2(sub(an, fd)) / (1.0 + norm2(fd));
}

Outcome numerical_calculus() {
  std::mt19937_64 rng(41);
  double fd = 0.0, conj = 0.0;
  const auto kinds = every_kind();
  for (const KindCase& c : kinds) {
    for (int rep = 0; rep < 1000; ++rep) {
      const Vec w = interior_sample(c.ball, rng);
      fd = std::max(fd, gradient_error(c.reg, c.ball, w));
      conj = std::max(conj, max_abs_diff(psi_conj_grad(c.reg, psi_grad(c.reg, w)), w));
    }
  }
  return {fd <= 1e-5 && conj <= 1e-6, std::to_string(kinds.size()) + " kinds x 1000 points, max FD rel err " +
                                          fmt("%.2g", fd) + ", max conjugate gap " + fmt("%.2g", conj)};
}

Outcome uniform_convexity() {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double convexity = -1e300, bregman = -1e300;
  for (const CatalogEntry& e : catalog()) {
    const double q = e.reg.q_exponent();
    const BallSpec& nrm = e.reg.convexity_norm();
    for (int rep = 0; rep < 10000; ++rep) {
      const Vec w = interior_sample(e.pair.w_ball, rng), v = interior_sample(e.pair.w_ball, rng);
      const double a = unif(rng);
      Vec mid = scaled(w, a);
      axpy(1.0 - a, v, mid);
      const double dist = std::pow(gauge_norm(nrm, sub(w, v)), q);
      const double rhs = a * psi_eval(e.reg, w) + (1 - a) * psi_eval(e.reg, v) - a * (1 - a) / q * dist;
      convexity = std::max(convexity, psi_eval(e.reg, mid) - rhs);
      bregman = std::max(bregman, dist / q - bregman_divergence(e.reg, v, w));
    }
  }
  return {convexity <= 1e-9 && bregman <= 1e-9,
          "max violation: definition " + fmt("%.3g", convexity) + ", Bregman " + fmt("%.3g", bregman)};
}

Outcome rate(double p1, std::size_t d) {
  const double p2 = p1 / (p1 - 1.0);
  const GeometryPair pair(BallSpec::lp(p1, d), BallSpec::lp(p2, d));
  const Regularizer reg = Regularizer::psi_r(p1, d);
  std::vector<std::pair<double, double>> pts, greedy_pts;
  for (int k = 7; k <= 14; ++k) {
    const long n = 1L << k;
    pts.emplace_back(static_cast<double>(n), worst_regret(reg, pair, n, 0).worst_regret);
    Adversary greedy = Adversary::sign_greedy(pair.x_ball);
    greedy_pts.emplace_back(static_cast<double>(n), run(reg, pair, greedy, n).final_regret());
  }
  const double slope = fit_rate_exponent(pts);
  const double target = -1.0 / std::max(p1, 2.0);
  // The greedy slope alone is diagnostic; the criterion uses the worst over the suite.
  return {std::abs(slope - target) <= 0.1,
          "lp(" + fmt("%g", p1) + ")/lp(" + fmt("%g", p2) + ") d=" + std::to_string(d) +
              " suite slope " + fmt("%.4f", slope) + ", target " + fmt("%.4f", target) +
              ", SignGreedy alone " + fmt("%.4f", fit_rate_exponent(greedy_pts))};
}

Outcome d2_table() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<double, double>> rows = {{2.0, 4.0 / 3.0}, {1.5, 2.5}, {2.0, 4.0},
                                                       {4.0, 1.5},       {4.0, 4.0}, {1.0, 1.0}};
  double lo = 1e300, hi = 0.0;
  std::set<int> seen;
  for (const auto& [p1, p2] : rows) {
    seen.insert(table_row(Exponent(p1), Exponent(p2)));
    for (const ResultRecord& r :
         table_d2_experiment(Exponent(p1), Exponent(p2), {4, 16, 64, 256, 1024}, 32)) {
      lo = std::min(lo, *r.table_ratio);
      hi = std::max(hi, *r.table_ratio);
    }
  }
  const double t = seconds_since(t0);
  return {seen.size() == 6 && lo >= 1.0 / 16.0 && hi <= 16.0 && t <= 600.0,
          std::to_string(seen.size()) + " rows x 5 dims, ratio range [" + fmt("%.4f", lo) + ", " +
              fmt("%.4f", hi) + "]"};
}

Outcome value_sandwich() {
  struct Setup {
    GeometryPair pair;
    Regularizer reg;
  };
  const std::vector<Setup> setups = {
      {GeometryPair(BallSpec::lp(Exponent::infinity(), 1), BallSpec::lp(1.0, 1)),
       Regularizer::euclidean(1)},
      {GeometryPair(BallSpec::lp(2.0, 2), BallSpec::lp(2.0, 2)), Regularizer::euclidean(2)},
      {GeometryPair(BallSpec::lp(Exponent::infinity(), 2), BallSpec::lp(1.0, 2)),
       Regularizer::euclidean(2)},
  };
  bool ok = true;
  double worst = -1e300;
  for (const Setup& s : setups) {
    const SandwichReport rep = sandwich_report(s.pair, s.reg, {1, 2, 4, 8});
    for (const SandwichRow& row : rep.rows) {
      worst = std::max(worst, row.lower - 2.0 * row.upper_md);
      ok = ok && row.lower <= 2.0 * row.upper_md + 1e-6;
    }
  }
  const double v2 = value_lower_bound(setups[0].pair, 2).value;
  const double v4 = value_lower_bound(setups[0].pair, 4).value;
  ok = ok && v2 == 0.5 && v4 == 0.375;
  return {ok, "max lower - 2 upper " + fmt("%.4f", worst) + ", 1-D values n=2 " + fmt("%.17g", v2) +
                  ", n=4 " + fmt("%.17g", v4)};
}

Outcome hilbert_mtype() {
  const GeometryPair pair(BallSpec::lp(2.0, 3), BallSpec::lp(2.0, 3));
  const double c = estimate_cp(pair, 2.0).value;
  return {std::abs(c - 1.0) <= 1e-9, "estimate " + fmt("%.17g", c)};
}

struct InterpD2 {
  double combined;
  double first;
  double second;
  bool certified;
  /// Certified upper bound on the true value of combined.
  double certified_cap;
};

// D2 estimates for W = interp(B1, B2) against X = B_inf, d = 32, using the table regularizer of
// each component; the interpolated ball takes the better of the two.
InterpD2 interp_d2(bool type_one) {
  const std::size_t d = 32;
  const long n = 1024;
  const auto inf = Exponent::infinity();
  const BallSpec b1 = BallSpec::lp(1.0, d), b2 = BallSpec::lp(2.0, d);
  const Regularizer r1 = scaled_psi_for_lp_pair(Exponent(1.0), inf, d, pick_r(Exponent(1.0), inf, d, n, 2.0));
  const Regularizer r2 = scaled_psi_for_lp_pair(Exponent(2.0), inf, d, pick_r(Exponent(2.0), inf, d, n, 2.0));
  const BallSpec w = type_one ? BallSpec::interp1(b1, b2) : BallSpec::interp2(b1, b2);
  InterpD2 out{};
  out.first = d_p_upper(r1, b1, 2.0);
  out.second = d_p_upper(r2, b2, 2.0);
  const SupResult s1 = sup_over_ball(r1, w), s2 = sup_over_ball(r2, w);
  out.combined = std::sqrt(std::min(s1.value, s2.value));
  out.certified = s1.certified && s2.certified;
  // The type-one ball lies in both components, so their certified sups cap the searched one.
  if (type_one) {
    const double c1 = std::min(sup_over_ball(r1, b1).value, sup_over_ball(r1, b2).value);
    const double c2 = std::min(sup_over_ball(r2, b1).value, sup_over_ball(r2, b2).value);
    out.certified_cap = std::sqrt(std::min(c1, c2));
  }
  return out;
}

Outcome interp_first() {
  const InterpD2 r = interp_d2(true);
  const double cap = 2.0 * std::min(r.first, r.second);
  return {r.combined <= cap + 1e-6 && r.certified_cap <= cap + 1e-6,
          "d2_hat " + fmt("%.4f", r.combined) + (r.certified ? "" : " (searched sup)") +
              ", certified cap " + fmt("%.4f", r.certified_cap) + " vs 2 min(" +
              fmt("%.4f", r.first) + ", " + fmt("%.4f", r.second) + ") = " + fmt("%.4f", cap)};
}

Outcome interp_second() {
  const InterpD2 r = interp_d2(false);
  const double cap = 0.5 * std::max(r.first, r.second);
  return {r.combined <= cap + 1e-6, "d2_hat " + fmt("%.4f", r.combined) + " vs max(" +
                                        fmt("%.4f", r.first) + ", " + fmt("%.4f", r.second) +
                                        ") / 2 = " + fmt("%.4f", cap)};
}

Outcome max_norm() {
  bool ok = true;
  std::string detail;
  for (std::size_t m = 1; m <= 4; ++m) {
    std::vector<std::pair<double, double>> pts;
    double worst_sup_ratio = 0.0;
    for (int k = 6; k <= 12; k += 2) {
      const long n = 1L << k;
      const MaxNormResult r = maxnorm_experiment(m, m, n, 0);
      ok = ok && r.regret_ok && r.sup_ok;
      worst_sup_ratio = std::max(worst_sup_ratio, r.sup_psi / std::max(r.log_k, 1.0));
      pts.emplace_back(static_cast<double>(n), *r.record.measured_regret);
    }
    const double slope = fit_rate_exponent(pts);
    ok = ok && std::abs(slope + 0.5) <= 0.1;
    detail += (m > 1 ? "; " : "") + std::to_string(m) + "x" + std::to_string(m) + " slope " +
              fmt("%.3f", slope) + " sup/logK " + fmt("%.3f", worst_sup_ratio);
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::vector<std::string> configs = {
      "[geometry]\nw = lp(2)\nx = lp(2)\n[adversary]\nkind = sign_greedy\n"
      "[run]\nn_list = 256\ndims = 4\nseed = 7\n",
      "[geometry]\nw = lp(1)\nx = lp(inf)\n[run]\nexperiment = rate\nn_list = 64,128,256,512\n"
      "dims = 16\nseed = 3\n",
      "[geometry]\np1 = 4\np2 = 1.5\n[run]\nexperiment = table_d2\nn_list = 32\ndims = 4,16,64\n",
      "[geometry]\nw = lp(inf)\nx = lp(1)\n[run]\nexperiment = sandwich\nn_list = 1,2,4\n"
      "dims = 1,2\n",
      "[geometry]\nm = 2\ncols = 3\n[run]\nexperiment = maxnorm\nn_list = 16,32,64,128\nseed = 9\n",
  };
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mirrorgeo_acceptance_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  int identical = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::istringstream in(configs[i]);
    ExperimentConfig cfg = parse_config(in);
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / ("run" + std::to_string(i) + "_" + std::to_string(k) + ".csv");
      cfg.csv = path.string();
      run_experiment(cfg);
      runs[k] = slurp(path);
    }
    if (!runs[0].empty() && runs[0] == runs[1]) ++identical;
  }
  std::filesystem::remove_all(dir);
  return {identical == static_cast<int>(configs.size()),
          std::to_string(identical) + "/" + std::to_string(configs.size()) +
              " experiment kinds byte-identical on rerun"};
}

}  // namespace

int main() {
  struct Criterion {
    std::string id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1", "mirror descent bound on the catalog", md_bound},
      {"2", "projected gradient and multiplicative weights", classical_equivalence},
      {"3", "finite differences and conjugates", numerical_calculus},
      {"4", "uniform convexity certificates", uniform_convexity},
      {"5a", "rate exponent, dual pair p1=1.5", [] { return rate(1.5, 8); }},
      {"5b", "rate exponent, dual pair p1=2", [] { return rate(2.0, 8); }},
      {"5c", "rate exponent, Clarkson pair p1=3", [] { return rate(3.0, 8); }},
      {"6", "D2 table", d2_table},
      {"7", "value sandwich", value_sandwich},
      {"8", "Hilbert M-type constant", hilbert_mtype},
      {"9a", "type-one interpolation D2", interp_first},
      {"9b", "type-two interpolation D2", interp_second},
      {"10", "max-norm experiment", max_norm},
      {"11", "CSV determinism", determinism},
  };
  int unexpected = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const bool known = kKnownFailures.count(c.id) > 0;
    const char* tag = o.passed ? "PASS" : known ? "FAIL (known)" : "FAIL";
    std::printf("criterion %-3s %-13s %s: %s [%.1f s]\n", c.id.c_str(), tag, c.name.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.passed && !known) ++unexpected;
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
