#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mirrorgeo/game_value.hpp"
#include "mirrorgeo/harness.hpp"
#include "mirrorgeo/md_engine.hpp"

using namespace mirrorgeo;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Exponent exponent_arg(const std::string& name, double p) {
  try {
    return std::isinf(p) ? Exponent::infinity() : Exponent(p);
  } catch (const InvalidArgument& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

BallSpec ball_arg(const std::string& name, const std::string& text, std::size_t d) {
  try {
    return parse_ball(text, d);
  } catch (const InvalidArgument& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

// Splits one CSV line, honouring double-quoted cells.
std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

// Fits one exponent per (label, d) group of a records CSV, or one for a two-column n,regret
// file.
int rate_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("rate-fit: cannot open '" + path + "'");
  std::string line;
  std::vector<std::string> header;
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> groups;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = csv_cells(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    const auto col = [&](const std::string& name) -> std::string {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name && i < cells.size()) return cells[i];
      }
      return {};
    };
    std::string n = col("n"), regret = col("measured_regret");
    if (regret.empty()) regret = col("regret");
    if (n.empty() || regret.empty()) continue;
    try {
      groups[{col("label"), col("d")}].emplace_back(std::stod(n), std::stod(regret));
    } catch (const std::exception&) {
      throw ConfigError("rate-fit: malformed row '" + line + "'");
    }
  }
  if (groups.empty()) throw ConfigError("rate-fit: no (n, measured_regret) rows in '" + path + "'");
  std::cout << "label,d,points,fitted_exponent\n";
  for (const auto& [key, pts] : groups) {
    std::cout << key.first << "," << key.second << "," << pts.size() << ","
              << fmt(fit_rate_exponent(pts)) << "\n";
  }
  return 0;
}

// Fast invariant sweep; returns the number of failed checks.
int run_checks() {
  int failed = 0;
  const auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++failed;
  };
  for (const CatalogEntry& e : catalog()) {
    for (long n : {100L, 1000L}) {
      const SuiteResult s = worst_regret(e.reg, e.pair, n, 0);
      report(s.contract_held && s.worst_regret <= s.bound + 1e-6 + s.comparator_gap,
             "regret bound " + e.name + " n=" + std::to_string(n));
    }
  }
  const GeometryPair line(BallSpec::lp(Exponent::infinity(), 1), BallSpec::lp(1.0, 1));
  const SandwichReport sw = sandwich_report(line, Regularizer::euclidean(1), {1, 2, 4, 8});
  report(sw.passed, "value sandwich on [-1, 1]");
  const GeometryPair hilbert(BallSpec::lp(2.0, 3), BallSpec::lp(2.0, 3));
  report(std::abs(estimate_cp(hilbert, 2.0).value - 1.0) <= 1e-9, "Hilbert M-type constant");
  const MaxNormResult mx = maxnorm_experiment(2, 2, 1024, 0);
  report(mx.regret_ok && mx.sup_ok, "max-norm 2x2 n=1024");
  const auto table = table_d2_experiment(Exponent(1.0), Exponent(1.0), {4, 64}, 32);
  bool in_band = true;
  for (const ResultRecord& r : table) {
    in_band = in_band && *r.table_ratio >= 1.0 / 16.0 && *r.table_ratio <= 16.0;
  }
  report(in_band, "D2 logarithmic row");
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror descent geometry experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config and print its CSV");
  run_cmd->add_option("config", config_path, "INI config file")->required();

  std::string csv_path;
  auto* fit_cmd = app.add_subcommand("rate-fit", "Fit log-log regret slopes in a CSV");
  fit_cmd->add_option("csv", csv_path, "records CSV")->required();

  double p1 = 2.0, p2 = 2.0;
  std::vector<std::size_t> dims = {4, 16, 64, 256, 1024};
  long rounds = 32;
  std::uint64_t seed = 0;
  auto* table_cmd = app.add_subcommand("table-d2", "D2 estimates against the table formula");
  table_cmd->add_option("--p1", p1, "exponent of W (inf allowed)")->required();
  table_cmd->add_option("--p2", p2, "exponent of X (inf allowed)")->required();
  table_cmd->add_option("--dims", dims, "ascending dimensions")->delimiter(',');
  table_cmd->add_option("--n", rounds, "rounds of mirror descent")->check(CLI::PositiveNumber);
  table_cmd->add_option("--seed", seed, "adversary seed");

  long depth = 2;
  std::size_t dim = 1;
  std::string w_text = "lp(inf)", x_text = "lp(1)";
  auto* value_cmd = app.add_subcommand("value-bound", "Tree lower bound on the game value");
  value_cmd->add_option("--n", depth, "rounds (tree depth)")->required();
  value_cmd->add_option("--dim", dim, "ambient dimension")->check(CLI::PositiveNumber);
  value_cmd->add_option("--wball", w_text, "W ball, e.g. lp(inf)");
  value_cmd->add_option("--xball", x_text, "X ball, e.g. lp(1)");
  value_cmd->add_option("--seed", seed, "search seed");

  std::size_t m = 2, n_cols = 2;
  long mx_rounds = 1024;
  auto* max_cmd = app.add_subcommand("maxnorm", "Max-norm matrix experiment");
  max_cmd->add_option("--m", m, "rows")->check(CLI::Range(1, 6));
  max_cmd->add_option("--n-cols", n_cols, "columns")->check(CLI::Range(1, 6));
  max_cmd->add_option("--rounds", mx_rounds, "rounds")->check(CLI::PositiveNumber);
  max_cmd->add_option("--seed", seed, "adversary seed");

  auto* check_cmd = app.add_subcommand("check", "Run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      write_records_csv(std::cout, run_experiment(cfg));
    } else if (*fit_cmd) {
      return rate_fit(csv_path);
    } else if (*table_cmd) {
      const Exponent e1 = exponent_arg("--p1", p1), e2 = exponent_arg("--p2", p2);
      write_records_csv(std::cout, table_d2_experiment(e1, e2, dims, rounds, seed));
    } else if (*value_cmd) {
      const GeometryPair pair(ball_arg("--wball", w_text, dim), ball_arg("--xball", x_text, dim));
      TreeSearchBudget budget;
      budget.seed = seed;
      const ValueBound v = value_lower_bound(pair, depth, budget);
      std::cout << "n,value_lower,exhaustive,alphabet\n"
                << depth << "," << fmt(v.value) << "," << (v.exhaustive ? 1 : 0) << ","
                << v.alphabet << "\n";
    } else if (*max_cmd) {
      const MaxNormResult r = maxnorm_experiment(m, n_cols, mx_rounds, seed);
      write_records_csv(std::cout, {r.record});
      std::cout << "# sup_psi=" << fmt(r.sup_psi) << " log_k=" << fmt(r.log_k)
                << " c=" << fmt(r.c) << "\n";
      if (!r.regret_ok) throw AssertionFailure("maxnorm: measured regret exceeds the bound");
      if (!r.sup_ok) throw AssertionFailure("maxnorm: sup Psi exceeds 8 log K");
    } else if (*check_cmd) {
      const int failed = run_checks();
      if (failed) throw AssertionFailure(std::to_string(failed) + " checks failed");
    }
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
