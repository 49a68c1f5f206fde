#include "drtune/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "drtune/error.hpp"
#include "drtune/simulate.hpp"

namespace drtune {

namespace {

using nlohmann::json;

// Noise stream indices; each stage gets its own pair so traces are independent.
constexpr std::uint64_t kMomentStream = 0;
constexpr std::uint64_t kFarStream = 2;
constexpr std::uint64_t kAttackStream = 4;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw InputError(name + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw InputError(name + " must be a non-empty array of rows");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InputError(name + " has ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InputError(name + " must contain numbers only");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw InputError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw InputError(std::string("bad value for '") + key + "'");
    }
  }
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, {"system", "detector", "noise", "simulation", "reach", "output_dir"}, "config");
  ExperimentConfig cfg;

  if (!root.contains("system")) throw InputError("config needs a system block");
  const json& sys = root["system"];
  reject_unknown(sys, {"A", "B", "C", "K", "sigma_w", "sigma_v"}, "system");
  for (const char* key : {"A", "B", "C", "K", "sigma_w", "sigma_v"}) {
    if (!sys.contains(key)) throw InputError(std::string("system block is missing ") + key);
  }
  cfg.A = parse_matrix(sys["A"], "A");
  cfg.B = parse_matrix(sys["B"], "B");
  cfg.C = parse_matrix(sys["C"], "C");
  cfg.K = parse_matrix(sys["K"], "K");
  cfg.sigma_w = parse_matrix(sys["sigma_w"], "sigma_w");
  cfg.sigma_v = parse_matrix(sys["sigma_v"], "sigma_v");

  if (root.contains("detector")) {
    const json& d = root["detector"];
    reject_unknown(d, {"target_rate", "orders", "epsilon", "moment_source"}, "detector");
    read(d, "target_rate", cfg.target_rate);
    read(d, "orders", cfg.orders);
    read(d, "epsilon", cfg.epsilon);
    if (d.contains("moment_source")) {
      std::string src;
      read(d, "moment_source", src);
      if (src == "analytic-chi-squared") {
        cfg.moment_source = MomentSource::AnalyticChiSquared;
      } else if (src.rfind("empirical", 0) == 0) {
        cfg.moment_source = MomentSource::Empirical;
        if (src.size() > 9) {
          if (src[9] != ':') throw InputError("moment_source must be analytic-chi-squared or empirical:N");
          try {
            std::size_t used = 0;
            cfg.empirical_samples = std::stol(src.substr(10), &used);
            if (used != src.size() - 10) throw std::invalid_argument("trailing");
          } catch (const std::exception&) {
            throw InputError("bad sample count in moment_source");
          }
        }
      } else {
        throw InputError("moment_source must be analytic-chi-squared or empirical:N");
      }
    }
  }
  if (root.contains("noise")) {
    const json& nz = root["noise"];
    reject_unknown(nz, {"family", "seed"}, "noise");
    if (nz.contains("family")) {
      std::string fam;
      read(nz, "family", fam);
      if (fam == "gaussian") cfg.family = NoiseFamily::Gaussian;
      else if (fam == "laplacian") cfg.family = NoiseFamily::MultivariateLaplacian;
      else throw InputError("noise family must be gaussian or laplacian");
    }
    read(nz, "seed", cfg.seed);
  }
  if (root.contains("simulation")) {
    const json& s = root["simulation"];
    reject_unknown(s, {"steps", "burn_in", "attack_steps"}, "simulation");
    read(s, "steps", cfg.far_steps);
    read(s, "burn_in", cfg.burn_in);
    read(s, "attack_steps", cfg.attack_steps);
  }
  if (root.contains("reach")) {
    const json& r = root["reach"];
    reject_unknown(r, {"horizon", "n_dirs", "w_bar"}, "reach");
    read(r, "horizon", cfg.horizon);
    read(r, "n_dirs", cfg.n_dirs);
    if (r.contains("w_bar")) {
      if (r["w_bar"].is_string()) {
        if (r["w_bar"].get<std::string>() != "dr") throw InputError("w_bar must be a number or \"dr\"");
        cfg.w_bar.reset();
      } else if (r["w_bar"].is_number()) {
        cfg.w_bar = r["w_bar"].get<double>();
      } else {
        throw InputError("w_bar must be a number or \"dr\"");
      }
    }
  }
  read(root, "output_dir", cfg.output_dir);

  if (!(cfg.target_rate > 0.0 && cfg.target_rate <= 0.5)) throw InputError("target_rate must lie in (0, 0.5]");
  if (!(cfg.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (cfg.orders.empty()) throw InputError("at least one moment order is required");
  for (int k : cfg.orders) {
    if (k < 1) throw InputError("moment orders must be at least 1");
  }
  if (cfg.empirical_samples < 2) throw InputError("empirical moment source needs at least 2 samples");
  if (cfg.far_steps < 1 || cfg.attack_steps < 1 || cfg.burn_in < 0) throw InputError("simulation lengths must be positive");
  if (cfg.horizon < 2) throw InputError("reach horizon must be at least 2");
  if (cfg.n_dirs < 16) throw InputError("reach needs at least 16 directions");
  if (cfg.w_bar && !(*cfg.w_bar >= 0.0)) throw InputError("w_bar must be nonnegative");
  cfg.system();  // dimension and detectability checks
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

LtiSystem ExperimentConfig::system() const { return LtiSystem::create(A, B, C, K, sigma_w, sigma_v); }

NoiseModel ExperimentConfig::process_noise(std::uint64_t stream) const {
  return {family, sigma_w, derive_seed(seed, stream)};
}

NoiseModel ExperimentConfig::sensor_noise(std::uint64_t stream) const {
  return {family, sigma_v, derive_seed(seed, stream + 1)};
}

std::string TuneTable::to_csv() const {
  std::string out = ThresholdResult::csv_header() + ",status\n";
  for (const auto& row : rows) {
    if (row.ok()) {
      out += row.result.to_csv_row() + ",ok\n";
    } else {
      const auto& r = row.result;
      // Same cell formatting as ThresholdResult::to_csv_row.
      ThresholdResult blank = r;
      blank.alpha = blank.achieved_worst_case = std::numeric_limits<double>::quiet_NaN();
      out += blank.to_csv_row() + "," + one_line(row.error) + "\n";
    }
  }
  return out;
}

TuneTable run_tune(const ExperimentConfig& cfg) {
  const LtiSystem sys = cfg.system();
  int kmax = 1;
  for (int k : cfg.orders) kmax = std::max(kmax, k);

  TuneTable table;
  if (cfg.moment_source == MomentSource::AnalyticChiSquared) {
    table.moments = chi_squared_moments(sys.p(), kmax);
  } else {
    SimulationOptions opt;
    opt.burn_in = cfg.burn_in;
    const ResidualTrace trace = simulate(sys, cfg.process_noise(kMomentStream), cfg.sensor_noise(kMomentStream),
                                         cfg.empirical_samples, std::nullopt, opt);
    table.moments = estimate_moments(trace.q_values, kmax);
  }

  for (int k : cfg.orders) {
    TuneRow row;
    row.result.method = k <= 2 ? (k == 1 ? TuningMethod::ClosedFormK1 : TuningMethod::ClosedFormK2)
                               : TuningMethod::SdpBisection;
    row.result.k = k;
    row.result.target_rate = cfg.target_rate;
    row.result.epsilon = cfg.epsilon;
    try {
      row.result = tune_threshold(*table.moments, cfg.target_rate, k, cfg.epsilon);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  TuneRow chi;
  chi.result.method = TuningMethod::ChiSquared;
  chi.result.k = 0;
  chi.result.target_rate = cfg.target_rate;
  chi.result.alpha = chi_squared_threshold(sys.p(), cfg.target_rate);
  chi.result.achieved_worst_case = cfg.target_rate;
  table.rows.push_back(std::move(chi));
  return table;
}

std::vector<FarRow> run_far(const ExperimentConfig& cfg, const TuneTable& table) {
  const LtiSystem sys = cfg.system();
  SimulationOptions opt;
  opt.burn_in = cfg.burn_in;
  const ResidualTrace trace =
      simulate(sys, cfg.process_noise(kFarStream), cfg.sensor_noise(kFarStream), cfg.far_steps, std::nullopt, opt);
  std::vector<FarRow> rows;
  for (const auto& tr : table.rows) {
    if (!tr.ok()) continue;
    FarRow row;
    row.method = tr.result.method;
    row.k = tr.result.k;
    row.alpha = tr.result.alpha;
    row.rate = empirical_false_alarm_rate(trace, row.alpha);
    row.std_error = binomial_standard_error(row.rate, trace.length());
    row.steps = trace.length();
    rows.push_back(row);
  }
  return rows;
}

std::vector<AttackRow> run_attack(const ExperimentConfig& cfg, const TuneTable& table) {
  const LtiSystem sys = cfg.system();
  SimulationOptions opt;
  opt.burn_in = cfg.burn_in;
  std::vector<AttackRow> rows;
  for (const auto& tr : table.rows) {
    if (!tr.ok()) continue;
    AttackPolicy policy;
    policy.alpha = tr.result.alpha;
    const ResidualTrace trace = simulate(sys, cfg.process_noise(kAttackStream), cfg.sensor_noise(kAttackStream),
                                         cfg.attack_steps, policy, opt);
    AttackRow row;
    row.method = tr.result.method;
    row.k = tr.result.k;
    row.alpha = policy.alpha;
    row.steps = trace.length();
    row.alarms = alarm_count(trace, policy.alpha);
    for (double q : trace.q_values) row.max_q = std::max(row.max_q, q);
    rows.push_back(row);
  }
  return rows;
}

ReachTable run_reach(const ExperimentConfig& cfg, const TuneTable& table) {
  const LtiSystem sys = cfg.system();
  const double rho_a = spectral_radius(sys.A());
  const double rho_cl = spectral_radius(sys.closed_loop());
  if (!(rho_a < 1.0 && rho_cl < 1.0)) {
    throw InstabilityError("reach bound series diverges: rho(A) = " + fmt(rho_a) + ", rho(A + BK) = " + fmt(rho_cl));
  }
  ReachTable out;
  out.w_bar = cfg.w_bar ? *cfg.w_bar : noise_threshold(sys.n(), cfg.target_rate);
  std::vector<ReachBound> bounds;
  for (const auto& tr : table.rows) {
    if (!tr.ok()) continue;
    ReachRow row;
    row.method = tr.result.method;
    row.k = tr.result.k;
    row.bound = reach_bound(sys, out.w_bar, tr.result.alpha, cfg.horizon, cfg.n_dirs, cfg.seed);
    bounds.push_back(row.bound);
    out.rows.push_back(std::move(row));
  }
  if (!bounds.empty()) out.report = volume_comparison(bounds);
  return out;
}

std::string ReachTable::areas_csv() const {
  std::string out = "method,k,alpha,area,contains_next\n";
  std::vector<const ReachRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ReachRow* a, const ReachRow* b) { return a->bound.alpha > b->bound.alpha; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const ReachRow& r = *sorted[i];
    const bool contains = i < report.entries.size() ? report.entries[i].contains_next : true;
    out += to_string(r.method) + "," + std::to_string(r.k) + "," + fmt(r.bound.alpha) + "," +
           fmt(report.entries.size() > i ? report.entries[i].area : 0.0) + "," + (contains ? "true" : "false") + "\n";
  }
  return out;
}

std::string far_csv(const std::vector<FarRow>& rows) {
  std::string out = "method,k,alpha,false_alarm_rate,std_error,steps\n";
  for (const auto& r : rows) {
    out += to_string(r.method) + "," + std::to_string(r.k) + "," + fmt(r.alpha) + "," + fmt(r.rate) + "," +
           fmt(r.std_error) + "," + std::to_string(r.steps) + "\n";
  }
  return out;
}

std::string attack_csv(const std::vector<AttackRow>& rows) {
  std::string out = "method,k,alpha,steps,alarms,max_q\n";
  for (const auto& r : rows) {
    out += to_string(r.method) + "," + std::to_string(r.k) + "," + fmt(r.alpha) + "," + std::to_string(r.steps) +
           "," + std::to_string(r.alarms) + "," + fmt(r.max_q) + "\n";
  }
  return out;
}

std::string reach_file_name(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "reach_%.6g.csv", alpha);
  return buf;
}

}  // namespace drtune
