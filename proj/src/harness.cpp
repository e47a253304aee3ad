#include "mirrorgeo/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mirrorgeo/costs.hpp"
#include "mirrorgeo/game_value.hpp"
#include "mirrorgeo/md_engine.hpp"

namespace mirrorgeo {

namespace {

constexpr double kBoundTol = 1e-6;
constexpr std::size_t kMaxNormSide = 6;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string cell(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

// RFC 4180 quoting for text cells.
std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"geometry", {"w", "x", "p1", "p2", "m", "cols"}},
      {"regularizer", {"kind", "r"}},
      {"adversary", {"kind", "seeds"}},
      {"run", {"experiment", "n_list", "dims", "seed", "b"}},
      {"output", {"csv"}},
  };
  return keys;
}

double parse_real(const std::string& field, const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(v)) {
    throw ConfigError(field + ": expected a number, got '" + text + "'");
  }
  return v;
}

long parse_count(const std::string& field, const std::string& text) {
  const double v = parse_real(field, text);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
    throw ConfigError(field + ": expected a positive integer, got '" + text + "'");
  }
  return static_cast<long>(v);
}

std::vector<long> parse_list(const std::string& field, const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
    if (a == std::string::npos) throw ConfigError(field + ": empty list entry");
    out.push_back(parse_count(field, item.substr(a, b - a + 1)));
  }
  return out;
}

Exponent config_exponent(const std::string& field, double p) {
  try {
    return std::isinf(p) ? Exponent::infinity() : Exponent(p);
  } catch (const InvalidArgument& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

BallSpec config_ball(const std::string& field, const std::string& text, std::size_t d) {
  if (text.empty()) throw ConfigError(field + ": required for this experiment");
  try {
    return parse_ball(text, d);
  } catch (const InvalidArgument& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

Regularizer config_regularizer(const ExperimentConfig& cfg, const GeometryPair& pair, long n_max) {
  const std::size_t d = pair.dim();
  const std::string& kind = cfg.regularizer;
  const auto* lw = pair.w_ball.as<LpBall>();
  const auto* lx = pair.x_ball.as<LpBall>();
  const auto need_r = [&]() {
    if (!cfg.r) throw ConfigError("regularizer.r: required for kind " + kind);
    return *cfg.r;
  };
  try {
    if (kind == "euclidean") return Regularizer::euclidean(d);
    if (kind == "entropy") {
      if (!pair.w_ball.is_simplex()) throw ConfigError("regularizer.kind: entropy needs W = simplex");
      return Regularizer::entropy(d);
    }
    if (kind == "psi_r") return Regularizer::psi_r(need_r(), d);
    if (kind == "scaled_psi" || (kind == "auto" && lw && lx)) {
      if (!lw || !lx) throw ConfigError("regularizer.kind: scaled_psi needs lp balls for W and X");
      const double r = cfg.r ? *cfg.r : pick_r(lw->p, lx->p, d, n_max);
      return scaled_psi_for_lp_pair(lw->p, lx->p, d, r);
    }
    if (kind == "group_linf" || (kind == "auto" && pair.w_ball.as<GroupBall>())) {
      const auto* g = pair.w_ball.as<GroupBall>();
      if (!g) throw ConfigError("regularizer.kind: group_linf needs a group ball for W");
      return group_regularizer_for_linf(g->q.value(), g->rows, g->cols);
    }
    if (kind == "vertex_hull" || (kind == "auto" && pair.w_ball.as<VertexHullBall>())) {
      const auto* h = pair.w_ball.as<VertexHullBall>();
      if (!h) throw ConfigError("regularizer.kind: vertex_hull needs a hull ball for W");
      return vertex_hull_regularizer_for(h->vertices, pair.x_ball);
    }
    if (kind == "auto") {
      return pair.w_ball.is_simplex() ? Regularizer::entropy(d) : Regularizer::euclidean(d);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("regularizer: " + std::string(e.what()));
  }
  throw ConfigError("regularizer.kind: unknown kind '" + kind + "'");
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double run_bound(const RegretTrace& tr, double b) {
  if (b == 1.0) return tr.headline_bound();
  const double p = tr.q / (tr.q - 1.0);
  const double n = static_cast<double>(tr.rounds.size());
  return tr.sup_psi / (n * tr.eta) + std::pow(tr.eta, p - 1.0) / p;
}

SuiteResult configured_regret(const ExperimentConfig& cfg, const Regularizer& reg,
                              const GeometryPair& pair, long n) {
  if (cfg.adversary == "suite") {
    return worst_regret(reg, pair, n, cfg.seed, cfg.random_seeds, cfg.b);
  }
  Adversary a = cfg.adversary == "sign_greedy" ? Adversary::sign_greedy(pair.x_ball)
                                               : Adversary::random_vertex(pair.x_ball, cfg.seed);
  RunOptions opts;
  opts.b = cfg.b;
  const RegretTrace tr = run(reg, pair, a, n, opts);
  return {tr.final_regret(), run_bound(tr, cfg.b), tr.contract_held, tr.comparator_gap};
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << "# mirrorgeo-csv v1\n";
  out << "digest,label,n,d,measured_regret,bound,d2_hat,table_ratio,fitted_exponent,value_lower,"
         "c_p_hat\n";
  for (const ResultRecord& r : records) {
    out << r.digest << ',' << quoted(r.label) << ',' << r.n << ',' << r.d << ',' << cell(r.measured_regret)
        << ',' << cell(r.bound) << ',' << cell(r.d2_hat) << ',' << cell(r.table_ratio) << ','
        << cell(r.fitted_exponent) << ',' << cell(r.value_lower) << ',' << cell(r.c_p_hat) << '\n';
  }
}

double fit_rate_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw InvalidArgument("fit_rate_exponent: needs at least 4 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0) || !std::isfinite(n) || !std::isfinite(v)) {
      throw InvalidArgument("fit_rate_exponent: n and regret must be positive and finite");
    }
    sx += std::log(n);
    sy += std::log(v);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, v] : points) {
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
    sxy += (std::log(n) - mx) * (std::log(v) - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_rate_exponent: needs at least two distinct n");
  return sxy / sxx;
}

SuiteResult worst_regret(const Regularizer& reg, const GeometryPair& pair, long n,
                         std::uint64_t seed, int random_seeds, double b) {
  SuiteResult out{0.0, 0.0, true, 0.0};
  RunOptions opts;
  opts.b = b;
  const auto consider = [&](Adversary& a) {
    const RegretTrace tr = run(reg, pair, a, n, opts);
    out.worst_regret = std::max(out.worst_regret, tr.final_regret());
    out.bound = run_bound(tr, b);
    out.contract_held = out.contract_held && tr.contract_held;
    out.comparator_gap = std::max(out.comparator_gap, tr.comparator_gap);
  };
  Adversary greedy = Adversary::sign_greedy(pair.x_ball);
  consider(greedy);
  for (int k = 0; k < random_seeds; ++k) {
    Adversary a = Adversary::random_vertex(pair.x_ball, seed + static_cast<std::uint64_t>(k));
    consider(a);
  }
  return out;
}

int table_row(Exponent p1, Exponent p2) {
  const Exponent q2 = holder_conjugate(p2);
  const bool small_p1 = !p1.is_infinite() && p1.value() <= 2.0;
  if (small_p1) {
    if (q2.is_infinite()) return 6;
    const double q = q2.value(), p = p1.value();
    // l1 against l_inf: the sqrt(p2 - 1) factor is infinite and the logarithmic row applies.
    if (q == 1.0 && p == 1.0) return 6;
    if (q > 2.0) return 1;
    if (p2.is_infinite()) {
      throw InvalidArgument("table_row: no table row for p1 in (1, 2] with p2 = inf");
    }
    if (q >= p) return 2;
    return 3;
  }
  if (q2.is_infinite() || q2.value() > 2.0) return 4;
  return 5;
}

double table_formula(Exponent p1, Exponent p2, std::size_t d) {
  if (d < 1) throw InvalidArgument("table_formula: d must be at least 1");
  const int row = table_row(p1, p2);
  const double dd = static_cast<double>(d);
  const double inv_p1 = p1.is_infinite() ? 0.0 : 1.0 / p1.value();
  const Exponent q2 = holder_conjugate(p2);
  const double inv_q2 = q2.is_infinite() ? 0.0 : 1.0 / q2.value();
  switch (row) {
    case 1:
      return 1.0;
    case 2:
      return std::sqrt(p2.value() - 1.0);
    case 3:
      return std::pow(dd, inv_q2 - inv_p1) * std::sqrt(p2.value() - 1.0);
    case 4:
      return std::pow(dd, 0.5 - inv_p1);
    case 5:
      return std::pow(dd, inv_q2 - inv_p1);
    default:
      return std::sqrt(std::max(std::log(dd), 1.0));
  }
}

std::vector<ResultRecord> table_d2_experiment(Exponent p1, Exponent p2,
                                              const std::vector<std::size_t>& dims, long n,
                                              std::uint64_t seed) {
  if (dims.empty()) throw InvalidArgument("table_d2_experiment: dims must not be empty");
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) throw InvalidArgument("table_d2_experiment: dims must ascend");
  }
  const int row = table_row(p1, p2);
  std::vector<ResultRecord> out;
  for (std::size_t d : dims) {
    const GeometryPair pair(BallSpec::lp(p1, d), BallSpec::lp(p2, d));
    const double r = pick_r(p1, p2, d, n, 2.0);
    const Regularizer reg = scaled_psi_for_lp_pair(p1, p2, d, r);
    ResultRecord rec;
    rec.label = "table_row_" + std::to_string(row) + " lp(" + p1.to_string() + ")/lp(" +
                p2.to_string() + ") r=" + fmt(r);
    rec.n = n;
    rec.d = d;
    rec.d2_hat = d_p_upper(reg, pair.w_ball, 2.0);
    rec.table_ratio = *rec.d2_hat / table_formula(p1, p2, d);
    const SuiteResult s = worst_regret(reg, pair, n, seed);
    rec.measured_regret = s.worst_regret;
    rec.bound = s.bound;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Vec> rank_one_sign_matrices(std::size_t m, std::size_t n_cols) {
  if (m < 1 || n_cols < 1) throw InvalidArgument("rank_one_sign_matrices: empty shape");
  std::vector<Vec> out;
  for (std::size_t a = 0; a < (std::size_t{1} << (m - 1)); ++a) {
    for (std::size_t b = 0; b < (std::size_t{1} << n_cols); ++b) {
      Vec v(m * n_cols);
      for (std::size_t i = 0; i < m; ++i) {
        const double ui = i == 0 ? 1.0 : ((a >> (i - 1)) & 1u ? -1.0 : 1.0);
        for (std::size_t j = 0; j < n_cols; ++j) {
          v[i * n_cols + j] = ui * ((b >> j) & 1u ? -1.0 : 1.0);
        }
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

MaxNormResult maxnorm_experiment(std::size_t m, std::size_t n_cols, long n, std::uint64_t seed) {
  if (m > kMaxNormSide || n_cols > kMaxNormSide) {
    throw InvalidArgument("maxnorm_experiment: M and N must not exceed 6");
  }
  std::vector<Vec> vertices = rank_one_sign_matrices(m, n_cols);
  const double log_k = std::log(static_cast<double>(vertices.size()));
  const BallSpec x = BallSpec::lp(1.0, m * n_cols);
  const Regularizer reg = vertex_hull_regularizer_for(vertices, x);
  const GeometryPair pair(BallSpec::vertex_hull(std::move(vertices)), x);
  const double sup = sup_over_ball(reg, pair.w_ball).value;
  const SuiteResult s = worst_regret(reg, pair, n, seed);

  MaxNormResult out;
  out.record.label = "maxnorm " + std::to_string(m) + "x" + std::to_string(n_cols);
  out.record.n = n;
  out.record.d = m * n_cols;
  out.record.measured_regret = s.worst_regret;
  out.record.bound = 2.0 * std::sqrt(sup / static_cast<double>(n));
  out.sup_psi = sup;
  out.log_k = log_k;
  out.c = s.worst_regret / std::sqrt(static_cast<double>(m + n_cols) / static_cast<double>(n));
  out.regret_ok = s.worst_regret <= *out.record.bound + kBoundTol + s.comparator_gap;
  out.sup_ok = sup <= 8.0 * std::max(log_k, 1.0);
  return out;
}

std::vector<CatalogEntry> catalog() {
  const auto inf = Exponent::infinity();
  const std::vector<Vec> hull = rank_one_sign_matrices(2, 2);
  const double r1 = pick_r(Exponent(1.0), inf, 16, 1000);
  return {
      {"l2/l2 euclidean", Regularizer::euclidean(8),
       GeometryPair(BallSpec::lp(2.0, 8), BallSpec::lp(2.0, 8))},
      {"simplex/linf entropy", Regularizer::entropy(8),
       GeometryPair(BallSpec::simplex(8), BallSpec::lp(inf, 8))},
      {"l1/linf psi_r", scaled_psi_for_lp_pair(Exponent(1.0), inf, 16, r1),
       GeometryPair(BallSpec::lp(1.0, 16), BallSpec::lp(inf, 16))},
      {"l1.5/l1.5 psi_r", scaled_psi_for_lp_pair(Exponent(1.5), Exponent(1.5), 8, 1.5),
       GeometryPair(BallSpec::lp(1.5, 8), BallSpec::lp(1.5, 8))},
      {"l4/l2 clarkson psi_4", scaled_psi_for_lp_pair(Exponent(4.0), Exponent(2.0), 8, 4.0),
       GeometryPair(BallSpec::lp(4.0, 8), BallSpec::lp(2.0, 8))},
      {"l2/l1 euclidean", Regularizer::euclidean(8),
       GeometryPair(BallSpec::lp(2.0, 8), BallSpec::lp(1.0, 8))},
      {"group(2,1)/linf", group_regularizer_for_linf(2.0, 4, 4),
       GeometryPair(BallSpec::group(Exponent(2.0), Exponent(1.0), 4, 4), BallSpec::lp(inf, 16))},
      {"maxnorm 2x2 hull/l1", vertex_hull_regularizer_for(hull, BallSpec::lp(1.0, 4)),
       GeometryPair(BallSpec::vertex_hull(hull), BallSpec::lp(1.0, 4))},
      {"l1/linf scaled euclidean", scaled_psi_for_lp_pair(Exponent(1.0), inf, 16, 2.0),
       GeometryPair(BallSpec::lp(1.0, 16), BallSpec::lp(inf, 16))},
  };
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      if (body.empty()) throw ConfigError(section + ": key outside any section");
      throw ConfigError("[" + section + "]: unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
      cfg.entries[section + "." + key] = value.get_value<std::string>();
    }
  }
  const auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto e = cfg.entries.find(k);
    if (e == cfg.entries.end()) return std::nullopt;
    return e->second;
  };
  if (auto v = get("run.experiment")) cfg.experiment = *v;
  static const std::set<std::string> experiments = {"regret", "rate", "table_d2", "sandwich",
                                                    "maxnorm"};
  if (!experiments.count(cfg.experiment)) {
    throw ConfigError("run.experiment: unknown experiment '" + cfg.experiment + "'");
  }
  if (auto v = get("geometry.w")) cfg.w_ball = *v;
  if (auto v = get("geometry.x")) cfg.x_ball = *v;
  if (auto v = get("geometry.p1")) cfg.p1 = parse_real("geometry.p1", *v);
  if (auto v = get("geometry.p2")) cfg.p2 = parse_real("geometry.p2", *v);
  if (auto v = get("geometry.m")) cfg.m = static_cast<std::size_t>(parse_count("geometry.m", *v));
  if (auto v = get("geometry.cols")) {
    cfg.cols = static_cast<std::size_t>(parse_count("geometry.cols", *v));
  }
  if (auto v = get("regularizer.kind")) cfg.regularizer = *v;
  if (auto v = get("regularizer.r")) cfg.r = parse_real("regularizer.r", *v);
  if (auto v = get("adversary.kind")) cfg.adversary = *v;
  static const std::set<std::string> adversaries = {"suite", "sign_greedy", "random_vertex"};
  if (!adversaries.count(cfg.adversary)) {
    throw ConfigError("adversary.kind: unknown adversary '" + cfg.adversary + "'");
  }
  if (auto v = get("adversary.seeds")) {
    cfg.random_seeds = static_cast<int>(parse_count("adversary.seeds", *v));
  }
  if (auto v = get("run.n_list")) cfg.n_list = parse_list("run.n_list", *v);
  if (cfg.n_list.empty()) throw ConfigError("run.n_list: must not be empty");
  if (auto v = get("run.dims")) {
    for (long d : parse_list("run.dims", *v)) cfg.dims.push_back(static_cast<std::size_t>(d));
  }
  if (auto v = get("run.seed")) {
    const double s = parse_real("run.seed", *v);
    if (!(s >= 0.0) || s != std::floor(s) || s > 9.007199254740992e15) {
      throw ConfigError("run.seed: expected a non-negative integer");
    }
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("run.b")) {
    cfg.b = parse_real("run.b", *v);
    if (!(cfg.b > 0.0) || !std::isfinite(cfg.b)) throw ConfigError("run.b: must be positive");
  }
  if (auto v = get("output.csv")) cfg.csv = *v;

  const bool needs_dims = cfg.experiment != "maxnorm";
  if (needs_dims && cfg.dims.empty()) throw ConfigError("run.dims: must not be empty");
  if (cfg.experiment == "table_d2" && (!cfg.p1 || !cfg.p2)) {
    throw ConfigError("geometry.p1/p2: required for table_d2");
  }
  if ((cfg.experiment == "regret" || cfg.experiment == "rate" || cfg.experiment == "sandwich") &&
      (cfg.w_ball.empty() || cfg.x_ball.empty())) {
    throw ConfigError("geometry.w/x: required for " + cfg.experiment);
  }
  if (cfg.experiment == "rate" && cfg.n_list.size() < 4) {
    throw ConfigError("run.n_list: rate fitting needs at least 4 horizons");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [k, v] : cfg.entries) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
  }
  return hex64(h);
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  const std::string digest = config_digest(cfg);
  long n_max = 0;
  for (long n : cfg.n_list) n_max = std::max(n_max, n);
  std::vector<ResultRecord> out;

  if (cfg.experiment == "table_d2") {
    const Exponent p1 = config_exponent("geometry.p1", *cfg.p1);
    const Exponent p2 = config_exponent("geometry.p2", *cfg.p2);
    for (long n : cfg.n_list) {
      for (ResultRecord& r : table_d2_experiment(p1, p2, cfg.dims, n, cfg.seed)) {
        out.push_back(std::move(r));
      }
    }
  } else if (cfg.experiment == "maxnorm") {
    std::vector<std::pair<double, double>> points;
    for (long n : cfg.n_list) {
      MaxNormResult r = maxnorm_experiment(cfg.m, cfg.cols, n, cfg.seed);
      points.emplace_back(static_cast<double>(n), *r.record.measured_regret);
      out.push_back(std::move(r.record));
    }
    if (points.size() >= 4) {
      const double slope = fit_rate_exponent(points);
      for (ResultRecord& r : out) r.fitted_exponent = slope;
    }
  } else {
    for (std::size_t d : cfg.dims) {
      const GeometryPair pair(config_ball("geometry.w", cfg.w_ball, d),
                              config_ball("geometry.x", cfg.x_ball, d));
      const Regularizer reg = config_regularizer(cfg, pair, n_max);
      const std::string label = pair.w_ball.describe() + "/" + pair.x_ball.describe();
      const std::size_t first = out.size();
      if (cfg.experiment == "sandwich") {
        SandwichOptions opts;
        opts.seed = cfg.seed;
        opts.tree.seed = cfg.seed;
        opts.cp.seed = cfg.seed;
        const SandwichReport rep = sandwich_report(pair, reg, cfg.n_list, opts);
        for (const SandwichRow& row : rep.rows) {
          ResultRecord rec;
          rec.label = label;
          rec.n = row.n;
          rec.d = pair.dim();
          rec.value_lower = row.lower;
          rec.measured_regret = row.upper_md;
          rec.bound = row.upper_dp;
          rec.c_p_hat = row.c_p_hat;
          out.push_back(std::move(rec));
        }
        if (!rep.passed) throw AssertionFailure("sandwich: " + rep.failures.front());
        continue;
      }
      std::vector<std::pair<double, double>> points;
      for (long n : cfg.n_list) {
        const SuiteResult s = configured_regret(cfg, reg, pair, n);
        ResultRecord rec;
        rec.label = label;
        rec.n = n;
        rec.d = pair.dim();
        rec.measured_regret = s.worst_regret;
        rec.bound = s.bound;
        points.emplace_back(static_cast<double>(n), s.worst_regret);
        out.push_back(std::move(rec));
      }
      if (cfg.experiment == "rate") {
        const double slope = fit_rate_exponent(points);
        for (std::size_t i = first; i < out.size(); ++i) out[i].fitted_exponent = slope;
      }
    }
  }
  for (ResultRecord& r : out) r.digest = digest;
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + cfg.csv + "'");
    write_records_csv(f, out);
    if (!f) throw std::runtime_error("write failed for '" + cfg.csv + "'");
  }
  return out;
}

}  // namespace mirrorgeo
