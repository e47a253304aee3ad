#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mirrorgeo/geometry.hpp"
#include "mirrorgeo/regularizers.hpp"
#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// One output row; fields an experiment does not produce stay empty.
struct ResultRecord {
  std::string digest;
  std::string label;
  long n = 0;
  std::size_t d = 0;
  std::optional<double> measured_regret;
  std::optional<double> bound;
  std::optional<double> d2_hat;
  /// d2_hat divided by the table formula.
  std::optional<double> table_ratio;
  std::optional<double> fitted_exponent;
  std::optional<double> value_lower;
  std::optional<double> c_p_hat;
};

/// Columns digest,label,n,d,measured_regret,bound,d2_hat,table_ratio,fitted_exponent,
/// value_lower,c_p_hat after a version comment; empty cells for absent fields.
void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records);

/// Least-squares slope of log(regret) against log(n). Needs at least 4 points, all positive.
double fit_rate_exponent(const std::vector<std::pair<double, double>>& points);

/// Worst final regret over SignGreedy and RandomVertex with seeds seed..seed+random_seeds-1.
struct SuiteResult {
  double worst_regret;
  /// 2 (sup_W Psi / n)^{1/q} when b = 1, else sup/(n eta) + eta^{p-1}/p for the fixed eta.
  double bound;
  bool contract_held;
  double comparator_gap;
};
SuiteResult worst_regret(const Regularizer& reg, const GeometryPair& pair, long n,
                         std::uint64_t seed, int random_seeds = 8, double b = 1.0);

/// Row 1..6 of the D_2 table for (p1, q2), q2 = conjugate(p2). Throws InvalidArgument when no
/// row applies.
int table_row(Exponent p1, Exponent p2);
/// D_2 formula of the row; sqrt(max(log d, 1)) for the logarithmic row.
double table_formula(Exponent p1, Exponent p2, std::size_t d);

/// Per d: r = pick_r(p1, p2, d, n, 2), Psi = scaled_psi_for_lp_pair, d2_hat = d_p_upper(p = 2),
/// the table ratio, and the worst measured regret over n rounds.
std::vector<ResultRecord> table_d2_experiment(Exponent p1, Exponent p2,
                                              const std::vector<std::size_t>& dims, long n,
                                              std::uint64_t seed = 0);

/// The 2^{M+N-1} distinct rank-one sign matrices u v^T (u_1 = +1), row-major.
std::vector<Vec> rank_one_sign_matrices(std::size_t m, std::size_t n_cols);

struct MaxNormResult {
  ResultRecord record;
  double sup_psi;
  double log_k;
  /// measured_regret / sqrt((M + N) / n).
  double c;
  bool regret_ok;
  bool sup_ok;
};

/// W = hull of rank-one sign matrices, X = entrywise l1 ball, Psi = VertexHullSquared with
/// q = log K / (log K - 1). Checks regret <= 2 (sup Psi / n)^{1/2} and sup Psi <= 8 log K
/// (log K floored at 1). M and N must not exceed 6.
MaxNormResult maxnorm_experiment(std::size_t m, std::size_t n_cols, long n, std::uint64_t seed);

struct CatalogEntry {
  std::string name;
  Regularizer reg;
  GeometryPair pair;
};

/// Reference (W, X, Psi) pairs: l2/l2, simplex/l_inf with entropy, l1/l_inf with psi_r,
/// l1.5/l1.5, l4/l2 with the Clarkson branch, l2/l1, group(2,1)/l_inf, the 2x2 max-norm hull
/// against l1, and l1/l_inf with a scaled Euclidean regularizer.
std::vector<CatalogEntry> catalog();

/// Parsed configuration. Sections and keys are documented in README.md.
struct ExperimentConfig {
  std::string experiment = "regret";
  std::string w_ball;
  std::string x_ball;
  std::optional<double> p1;
  std::optional<double> p2;
  std::size_t m = 2;
  std::size_t cols = 2;
  std::string regularizer = "auto";
  std::optional<double> r;
  std::string adversary = "suite";
  int random_seeds = 8;
  std::vector<long> n_list;
  std::vector<std::size_t> dims;
  std::uint64_t seed = 0;
  double b = 1.0;
  std::string csv;
  /// Canonical "section.key=value" lines, sorted; input to the digest.
  std::map<std::string, std::string> entries;
};

/// Parses an INI text. Unknown sections or keys and malformed values throw ConfigError with
/// the offending field.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the canonical entries, as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

/// Runs the configured experiment and writes the CSV when an output path is set.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

}  // namespace mirrorgeo
