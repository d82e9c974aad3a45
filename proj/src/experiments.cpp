#include "liewalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "liewalk/csv.hpp"
#include "liewalk/errors.hpp"
#include "liewalk/grassmann.hpp"
#include "liewalk/modular_surface.hpp"
#include "liewalk/multislicing.hpp"
#include "liewalk/so_transversality.hpp"
#include "liewalk/submodular.hpp"
#include "liewalk/version.hpp"

namespace liewalk {

namespace {

using nlohmann::json;

/// Tracks which parameter keys the experiment consumed and re-emits the
/// fully resolved (defaults filled) parameter object for the CSV header.
class ParamReader {
 public:
  explicit ParamReader(const json& params) : params_(params) {
    if (!params_.is_object()) throw ConfigError("params must be a JSON object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!params_.contains(key)) {
      resolved_[key] = fallback;
      return fallback;
    }
    try {
      T value = params_.at(key).get<T>();
      resolved_[key] = value;
      return value;
    } catch (const json::exception&) {
      throw ConfigError("parameter '" + key + "' has the wrong type");
    }
  }

  json get_raw(const std::string& key, const json& fallback) {
    seen_.insert(key);
    json value = params_.contains(key) ? params_.at(key) : fallback;
    resolved_[key] = value;
    return value;
  }

  void finish() const {
    for (const auto& [key, value] : params_.items())
      if (!seen_.count(key))
        throw ConfigError("unknown parameter key: " + key);
  }

  const json& resolved() const { return resolved_; }

 private:
  json params_;
  json resolved_ = json::object();
  std::set<std::string> seen_;
};

Mat parse_matrix(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array())
    throw ConfigError(what + " must be an array of array rows");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.front().size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw ConfigError(what + " has ragged rows");
    for (int j = 0; j < c; ++j) {
      if (!rows[i][j].is_number())
        throw ConfigError(what + " entries must be numbers");
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

std::vector<double> parse_double_list(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError(what + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(what + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> parse_int_list(const json& arr, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_double_list(arr, what)) {
    if (v != std::floor(v)) throw ConfigError(what + " entries must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

/// Writes the reproducibility header: version, resolved config (one line of
/// canonical JSON) and its git-style content hash.
void write_header(CsvWriter& csv, const ExperimentConfig& cfg,
                  const json& resolved_params) {
  json resolved;
  resolved["experiment"] = cfg.experiment;
  resolved["params"] = resolved_params;
  resolved["seed"] = cfg.seed;
  resolved["strict"] = cfg.strict;
  const std::string dump = resolved.dump();
  csv.comment(std::string("liewalk ") + kVersion);
  csv.comment("experiment: " + cfg.experiment);
  csv.comment("seed: " + std::to_string(cfg.seed));
  csv.comment("config: " + dump);
  csv.comment("input-hash: " + git_blob_sha1(dump));
}

struct SoftChecks {
  bool strict = false;
  int failures = 0;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (strict) throw InvariantViolation(what);
    ++failures;
  }
};

// ---------------------------------------------------------------------------

int run_walk_equidistribute(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const json atoms_json = pr.get_raw("atoms", json());
  const json weights_json = pr.get_raw("weights", json());
  const json start_json = pr.get_raw("start", json("golden"));
  const std::vector<int> n_list =
      parse_int_list(pr.get_raw("n_list", json::array({10, 25, 50})), "n_list");
  const std::int64_t count = pr.get<std::int64_t>("count", 100000);
  const double beta = pr.get<double>("beta", 0.5);
  const int dict_size = pr.get<int>("dictionary_size", 256);
  const bool use_frame = pr.get<bool>("use_frame", false);
  const std::vector<double> r_list = parse_double_list(
      pr.get_raw("r_list", json::array({0.1, 0.05, 0.02})), "r_list");
  pr.finish();

  WalkMeasure mu = default_modular_measure();
  if (!atoms_json.is_null()) {
    mu.atoms.clear();
    for (const auto& a : atoms_json) mu.atoms.push_back(parse_matrix(a, "atom"));
    mu.weights.assign(mu.atoms.size(), 1.0 / static_cast<double>(mu.atoms.size()));
  }
  if (!weights_json.is_null())
    mu.weights = parse_double_list(weights_json, "weights");
  validate_unimodular(mu);

  LatticePoint x0;
  if (start_json.is_string()) {
    const std::string s = start_json.get<std::string>();
    Mat m = Mat::Identity(2, 2);
    if (s == "golden")
      m(0, 1) = (1.0 + std::sqrt(5.0)) / 2.0;
    else if (s != "identity")
      throw ConfigError("start must be \"identity\", \"golden\", or a matrix");
    x0 = reduce(m);
  } else {
    x0 = reduce(parse_matrix(start_json, "start"));
  }

  const std::vector<LatticePoint> haar =
      haar_sample(count, derive_seed(cfg.seed, 0xAAu));

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  std::vector<std::string> cols = {"n", "discrepancy"};
  for (double r : r_list) cols.push_back("inj_fraction_below_" + format_double(r));
  csv.columns(cols);

  SoftChecks checks{cfg.strict};
  for (int n : n_list) {
    const std::vector<LatticePoint> walk =
        walk_distribution(mu, x0, n, count, cfg.seed, cfg.threads);
    DiscrepancyReport rep = discrepancy(walk, haar, beta, dict_size,
                                        derive_seed(cfg.seed, 0xD1u), use_frame);
    checks.require(rep.value >= 0.0 && rep.value <= 2.0,
                   "discrepancy left its [0, 2] range");
    std::vector<std::string> row = {CsvWriter::cell(n),
                                    CsvWriter::cell(rep.value)};
    for (double r : r_list)
      row.push_back(CsvWriter::cell(inj_fraction_below(walk, r)));
    csv.row(row);
  }
  return checks.failures == 0 ? 0 : 1;
}

int run_submodular_scan(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const std::string family = pr.get<std::string>("family", "sl");
  const int param = pr.get<int>("param", 3);
  const int trials = pr.get<int>("trials", 100);
  const int samples = pr.get<int>("samples", 8);
  pr.finish();
  if (trials < 1) throw ConfigError("trials must be >= 1");

  const LieAlgebra alg = build_family(family, param);
  const int dim = alg.algebra_dim();

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  csv.columns({"trial", "dim_v", "dim_w", "generic_dim", "bound_num",
               "bound_den", "holds"});

  SoftChecks checks{cfg.strict};
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(cfg.seed, 0x5 + t), 0);
    const int dv = 1 + static_cast<int>(rng.uniform01() * (dim - 1));
    const int dw = 1 + static_cast<int>(rng.uniform01() * (dim - 1));
    const Subspace V = Subspace::random(dim, std::min(dv, dim - 1), rng);
    const Subspace W = Subspace::random(dim, std::min(dw, dim - 1), rng);
    const SubmodularCheck c =
        verify_submodular(alg, V, W, samples, derive_seed(cfg.seed, 0x900 + t),
                          cfg.threads);
    checks.require(c.holds, "submodular bound failed on a sampled pair");
    csv.row({CsvWriter::cell(t), CsvWriter::cell(V.dim()),
             CsvWriter::cell(W.dim()), CsvWriter::cell(c.lhs),
             CsvWriter::cell(c.rhs_num), CsvWriter::cell(c.rhs_den),
             CsvWriter::cell(static_cast<int>(c.holds))});
  }
  return checks.failures == 0 ? 0 : 1;
}

int run_transversality_scan(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const int n = pr.get<int>("n", 4);
  const int trials = pr.get<int>("trials", 1000);
  pr.finish();
  if (trials < 1) throw ConfigError("trials must be >= 1");

  const SOQModel model = SOQModel::build(n);

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  csv.columns({"trial", "defect", "relation_residual", "solution_dim"});

  SoftChecks checks{cfg.strict};
  for (int t = 0; t < trials; ++t) {
    std::vector<CMat> h;
    RelationResult rel;
    int defect = 0;
    for (int attempt = 0;; ++attempt) {
      h.clear();
      for (int k = 0; k < 4; ++k)
        h.push_back(random_so_group_element(
            model, derive_seed(cfg.seed, 17u + 64u * (4u * t + k) + attempt)));
      try {
        defect = direct_sum_defect(model, h);
        rel = find_relation(model, h);
        break;
      } catch (const DegenerateConfiguration&) {
        if (attempt >= 8) throw;
      }
    }
    checks.require(defect >= 1, "quadruple unexpectedly in direct sum");
    checks.require(rel.residual <= 1e-8, "relation residual above 1e-8");
    csv.row({CsvWriter::cell(t), CsvWriter::cell(defect),
             CsvWriter::cell(rel.residual), CsvWriter::cell(rel.solution_dim)});
  }
  return checks.failures == 0 ? 0 : 1;
}

int run_multislice_demo(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const int points = pr.get<int>("points", 4096);
  const int dim = pr.get<int>("dim", 2);
  const std::vector<int> levels =
      parse_int_list(pr.get_raw("levels", json::array({2, 5, 10})), "levels");
  const double eps = pr.get<double>("eps", 0.5);
  const std::string input = pr.get<std::string>("input", "");
  pr.finish();

  PointCloud cloud;
  if (!input.empty()) {
    cloud = load_point_cloud(input);
  } else {
    if (points < 1 || dim < 1) throw ConfigError("need points >= 1, dim >= 1");
    Rng rng(cfg.seed, 0);
    std::vector<Vec> pts;
    for (int i = 0; i < points; ++i) {
      Vec p(dim);
      for (int c = 0; c < dim; ++c) p(c) = rng.uniform01();
      pts.push_back(p);
    }
    cloud = PointCloud::create(dim, std::move(pts), 0.0);
  }

  const RegularizeResult res = regularize(cloud, levels, eps);

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  const double bad_bound =
      std::pow(std::ldexp(1.0, -levels.back()), eps);
  csv.comment("pieces: " + std::to_string(res.pieces.size()));
  csv.comment("bad_points: " + std::to_string(res.bad.size()));
  csv.comment("bad_bound_fraction: " + format_double(bad_bound));
  csv.columns({"piece", "size", "is_regular", "mass_balanced"});

  SoftChecks checks{cfg.strict};
  std::int64_t covered = res.bad.size();
  for (size_t i = 0; i < res.pieces.size(); ++i) {
    const PointCloud& piece = res.pieces[i];
    covered += piece.size();
    const bool reg = piece_is_regular(piece, levels);
    const bool bal = piece_mass_balanced(piece, levels.back());
    checks.require(reg, "piece failed the exact regularity identity");
    checks.require(bal, "piece failed the factor-2 mass balance");
    csv.row({CsvWriter::cell(static_cast<std::int64_t>(i)),
             CsvWriter::cell(piece.size()), CsvWriter::cell(static_cast<int>(reg)),
             CsvWriter::cell(static_cast<int>(bal))});
  }
  checks.require(covered == cloud.size(), "pieces and bad set must partition A");
  checks.require(static_cast<double>(res.bad.size()) <=
                     bad_bound * static_cast<double>(std::max<std::int64_t>(
                                     1, cloud.size())),
                 "bad set exceeded its mass budget");
  return checks.failures == 0 ? 0 : 1;
}

WalkMeasure measure_from_params(const LieAlgebra& alg, ParamReader& pr,
                                std::uint64_t seed) {
  const int atom_count = pr.get<int>("atom_count", 2);
  const double atom_scale = pr.get<double>("atom_scale", 0.75);
  if (atom_count < 1 || !(atom_scale > 0.0))
    throw ConfigError("need atom_count >= 1 and atom_scale > 0");
  return build_group_measure(alg, atom_count, atom_scale,
                             derive_seed(seed, 0xA70));
}

int run_lyapunov_estimate(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const std::string family = pr.get<std::string>("family", "sl");
  const int param = pr.get<int>("param", 2);
  const int n = pr.get<int>("n", 200);
  const int trials = pr.get<int>("trials", 200);
  const LieAlgebra alg = build_family(family, param);
  const WalkMeasure mu = measure_from_params(alg, pr, cfg.seed);
  pr.finish();

  const LyapunovData lyap =
      estimate_lyapunov(alg, mu, n, trials, cfg.seed, cfg.threads);

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  std::ostringstream kap;
  for (int b = 0; b < lyap.kappa_mu_hat.size(); ++b)
    kap << (b ? " " : "") << format_double(lyap.kappa_mu_hat(b));
  csv.comment("kappa_mu_hat: " + kap.str());
  for (const std::string& w : lyap.warnings) csv.comment("warning: " + w);
  csv.columns({"index", "lambda", "multiplicity", "std_error"});

  SoftChecks checks{cfg.strict};
  double weighted = 0.0, sigma = 0.0;
  for (size_t i = 0; i < lyap.lambdas.size(); ++i) {
    weighted += lyap.lambdas[i] * lyap.multiplicities[i];
    sigma += lyap.std_errors[i] * lyap.multiplicities[i];
    csv.row({CsvWriter::cell(static_cast<std::int64_t>(i)),
             CsvWriter::cell(lyap.lambdas[i]),
             CsvWriter::cell(lyap.multiplicities[i]),
             CsvWriter::cell(lyap.std_errors[i])});
  }
  checks.require(std::abs(weighted) <= 3.0 * std::max(sigma, 1e-12),
                 "multiplicity-weighted exponent sum is not zero");
  checks.require(lyap.warnings.empty(), "cluster separation is ambiguous");
  return checks.failures == 0 ? 0 : 1;
}

int run_angle_law(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const std::string family = pr.get<std::string>("family", "sl");
  const int param = pr.get<int>("param", 2);
  const int n = pr.get<int>("n", 100);
  const int trials = pr.get<int>("trials", 10000);
  const int i = pr.get<int>("i", 1);
  const int est_n = pr.get<int>("est_n", 200);
  const int est_trials = pr.get<int>("est_trials", 200);
  const std::vector<double> rho_grid = parse_double_list(
      pr.get_raw("rho_grid", json::array({0.1, 0.03, 0.01})), "rho_grid");
  const LieAlgebra alg = build_family(family, param);
  const WalkMeasure mu = measure_from_params(alg, pr, cfg.seed);
  pr.finish();

  const LyapunovData lyap = estimate_lyapunov(alg, mu, est_n, est_trials,
                                              derive_seed(cfg.seed, 0xE57),
                                              cfg.threads);
  const LyapunovFlags flags = lyapunov_flags(alg, lyap);
  if (i < 1 || i > static_cast<int>(flags.expanding.spaces.size()))
    throw ConfigError("flag index i out of range");
  // Mirror space: theta of the i-th expanding space.
  const Subspace Vi = flags.expanding.spaces[i - 1];
  const Subspace W = Subspace::span_of(alg.theta_on_coords() * Vi.frame());

  const AngleLawTable table =
      angle_law_probe(alg, mu, flags.expanding, i, W, rho_grid, n, trials,
                      cfg.seed, cfg.threads);

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  csv.comment("max_angle: " + format_double(table.max_angle));
  csv.columns({"rho", "probability"});
  SoftChecks checks{cfg.strict};
  for (size_t k = 0; k < table.rho.size(); ++k) {
    if (k > 0)
      checks.require(table.probability[k] >= table.probability[k - 1] - 1e-12,
                     "angle-law CDF is not monotone in rho");
    csv.row({CsvWriter::cell(table.rho[k]),
             CsvWriter::cell(table.probability[k])});
  }
  return checks.failures == 0 ? 0 : 1;
}

int run_box_model(const ExperimentConfig& cfg) {
  ParamReader pr(cfg.params);
  const std::string family = pr.get<std::string>("family", "sl");
  const int param = pr.get<int>("param", 2);
  const std::vector<int> n_list =
      parse_int_list(pr.get_raw("n_list", json::array({50, 100, 200})), "n_list");
  const double eps = pr.get<double>("eps", 0.1);
  const int trials = pr.get<int>("trials", 200);
  const int est_n = pr.get<int>("est_n", 200);
  const int est_trials = pr.get<int>("est_trials", 200);
  const LieAlgebra alg = build_family(family, param);
  const WalkMeasure mu = measure_from_params(alg, pr, cfg.seed);
  pr.finish();

  const LyapunovData lyap = estimate_lyapunov(alg, mu, est_n, est_trials,
                                              derive_seed(cfg.seed, 0xB0),
                                              cfg.threads);

  CsvWriter csv(cfg.output_path);
  write_header(csv, cfg, pr.resolved());
  csv.columns({"n", "eps", "fraction"});
  SoftChecks checks{cfg.strict};
  double prev = -1.0;
  for (int n : n_list) {
    const BoxModelReport rep =
        box_model_check(alg, mu, lyap, n, eps, trials,
                        derive_seed(cfg.seed, 0xB1), cfg.threads);
    checks.require(rep.fraction >= prev - 1e-12,
                   "band fraction decreased with the horizon");
    prev = rep.fraction;
    csv.row({CsvWriter::cell(n), CsvWriter::cell(eps),
             CsvWriter::cell(rep.fraction)});
  }
  return checks.failures == 0 ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "experiment")
        cfg.experiment = value.get<std::string>();
      else if (key == "params")
        cfg.params = value;
      else if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "out")
        cfg.output_path = value.get<std::string>();
      else if (key == "strict")
        cfg.strict = value.get<bool>();
      else if (key == "threads")
        cfg.threads = value.get<int>();
      else
        throw ConfigError("unknown config key: " + key);
    } catch (const json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
  if (!cfg.params.is_object())
    throw ConfigError("params must be a JSON object");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  return cfg;
}

int run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "walk-equidistribute") return run_walk_equidistribute(cfg);
  if (cfg.experiment == "submodular-scan") return run_submodular_scan(cfg);
  if (cfg.experiment == "transversality-scan") return run_transversality_scan(cfg);
  if (cfg.experiment == "multislice-demo") return run_multislice_demo(cfg);
  if (cfg.experiment == "lyapunov-estimate") return run_lyapunov_estimate(cfg);
  if (cfg.experiment == "angle-law") return run_angle_law(cfg);
  if (cfg.experiment == "box-model") return run_box_model(cfg);
  throw ConfigError("unknown experiment: " + cfg.experiment);
}

WalkMeasure default_modular_measure() {
  WalkMeasure mu;
  Mat a(2, 2), b(2, 2);
  a << 1, 2, 0, 1;
  b << 1, 0, 2, 1;
  Mat ai(2, 2), bi(2, 2);
  ai << 1, -2, 0, 1;
  bi << 1, 0, -2, 1;
  mu.atoms = {a, ai, b, bi};
  mu.weights.assign(4, 0.25);
  return mu;
}

WalkMeasure build_group_measure(const LieAlgebra& alg, int count, double scale,
                                std::uint64_t seed) {
  if (count < 1) throw ConfigError("need at least one generator");
  WalkMeasure mu;
  Rng rng(seed, 0);
  for (int k = 0; k < count; ++k) {
    const Mat x = alg.random_algebra_element(rng, scale);
    Mat g = x.exp();
    Mat ginv = (-x).exp();
    mu.atoms.push_back(g);
    mu.atoms.push_back(ginv);
  }
  mu.weights.assign(mu.atoms.size(), 1.0 / static_cast<double>(mu.atoms.size()));
  mu.validate(alg);
  return mu;
}

LieAlgebra build_family(const std::string& family, int param) {
  if (family == "sl") return LieAlgebra::build(Family::SlReal, param);
  if (family == "so_p1") return LieAlgebra::build(Family::SoP1, param);
  throw ConfigError("family must be \"sl\" or \"so_p1\"");
}

}  // namespace liewalk
