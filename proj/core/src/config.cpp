#include "blindmimo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace blindmimo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class KeyValueReader {
 public:
  explicit KeyValueReader(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: line " + std::to_string(line_no) + " is not a key = value pair");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
      pairs_[key] = value;
    }
  }

  bool has(const std::string& key) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) return false;
    consumed_.insert(consumed_.end(), key);
    return true;
  }

  std::string require(const std::string& key) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) throw ConfigError("config: missing required key '" + key + "'");
    consumed_.push_back(key);
    return it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) return fallback;
    consumed_.push_back(key);
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) return fallback;
    consumed_.push_back(key);
    return parse_number(key, it->second);
  }

  double require_number(const std::string& key) { return parse_number(key, require(key)); }

  long integer(const std::string& key, long fallback) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) return fallback;
    consumed_.push_back(key);
    return parse_integer(key, it->second);
  }

  long require_integer(const std::string& key) { return parse_integer(key, require(key)); }

  bool boolean(const std::string& key, bool fallback) {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) return fallback;
    consumed_.push_back(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config: key '" + key + "' expects true/false");
  }

  void reject_unknown() const {
    for (const auto& [key, value] : pairs_) {
      if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end())
        throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  static double parse_number(const std::string& key, const std::string& value) {
    try {
      size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw ConfigError("config: key '" + key + "' has a malformed number '" + value + "'");
    }
  }

  static long parse_integer(const std::string& key, const std::string& value) {
    try {
      size_t used = 0;
      const long v = std::stol(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw ConfigError("config: key '" + key + "' has a malformed integer '" + value + "'");
    }
  }

 private:
  std::map<std::string, std::string> pairs_;
  std::vector<std::string> consumed_;
};

SolverConfig read_solver(KeyValueReader& kv, const std::string& prefix, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.lambda = kv.number(prefix + ".lambda", base.lambda);
  cfg.mu0 = kv.number(prefix + ".mu0", base.mu0);
  cfg.beta = kv.number(prefix + ".beta", base.beta);
  cfg.max_iters = static_cast<int>(kv.integer(prefix + ".max_iters", base.max_iters));
  cfg.tol_rel_obj = kv.number(prefix + ".tol_rel_obj", base.tol_rel_obj);
  cfg.min_step = kv.number(prefix + ".min_step", base.min_step);
  return cfg;
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "sparse_blind") return EstimatorKind::SparseBlind;
  if (name == "subspace") return EstimatorKind::Subspace;
  if (name == "onebit_sparse_blind") return EstimatorKind::OnebitSparseBlind;
  if (name == "onebit_subspace") return EstimatorKind::OnebitSubspace;
  if (name == "pilot_ls") return EstimatorKind::PilotLs;
  if (name == "semiblind") return EstimatorKind::Semiblind;
  throw ConfigError("config: unknown estimator '" + name + "'");
}

std::string fisher_kind_name(FisherKind kind) {
  switch (kind) {
    case FisherKind::IdealExact: return "ideal_exact";
    case FisherKind::IdealLowSnr: return "ideal_lowsnr";
    case FisherKind::OneBitLowSnrFlat: return "onebit_flat";
    case FisherKind::OneBitLowSnrWideband: return "onebit_wideband";
  }
  return "ideal_exact";
}

FisherKind fisher_kind_from_name(const std::string& name) {
  if (name == "ideal_exact") return FisherKind::IdealExact;
  if (name == "ideal_lowsnr") return FisherKind::IdealLowSnr;
  if (name == "onebit_flat") return FisherKind::OneBitLowSnrFlat;
  if (name == "onebit_wideband") return FisherKind::OneBitLowSnrWideband;
  throw ConfigError("config: unknown crb.kind '" + name + "'");
}

void append_solver(std::ostringstream& out, const std::string& prefix, const SolverConfig& cfg) {
  out << prefix << ".lambda = " << format_double(cfg.lambda) << "\n";
  out << prefix << ".mu0 = " << format_double(cfg.mu0) << "\n";
  out << prefix << ".beta = " << format_double(cfg.beta) << "\n";
  out << prefix << ".max_iters = " << cfg.max_iters << "\n";
  out << prefix << ".tol_rel_obj = " << format_double(cfg.tol_rel_obj) << "\n";
  out << prefix << ".min_step = " << format_double(cfg.min_step) << "\n";
}

}  // namespace

double scenario_symbol_variance(const ScenarioConfig& scenario, double rho_db) {
  const double per_antenna = std::pow(10.0, rho_db / 10.0);
  return per_antenna * scenario.N / (static_cast<double>(scenario.K) * scenario.L);
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::SparseBlind: return "sparse_blind";
    case EstimatorKind::Subspace: return "subspace";
    case EstimatorKind::OnebitSparseBlind: return "onebit_sparse_blind";
    case EstimatorKind::OnebitSubspace: return "onebit_subspace";
    case EstimatorKind::PilotLs: return "pilot_ls";
    case EstimatorKind::Semiblind: return "semiblind";
  }
  return "unknown";
}

ArrayGeometry ExperimentConfig::geometry() const {
  ArrayGeometry geom;
  geom.kind = scenario.geometry;
  geom.n2 = scenario.n2;
  geom.n1 = scenario.n2 > 0 ? scenario.N / scenario.n2 : scenario.N;
  geom.spacing = scenario.spacing;
  geom.carrier_hz = scenario.fc_hz;
  geom.bandwidth_hz = scenario.B_hz;
  return geom;
}

void ExperimentConfig::validate() const {
  if (scenario.N < 1) throw ConfigError("config: scenario.N must be >= 1");
  if (scenario.K < 1) throw ConfigError("config: scenario.K must be >= 1");
  if (scenario.L < 1) throw ConfigError("config: scenario.L must be >= 1");
  if (scenario.T < 1) throw ConfigError("config: scenario.T must be >= 1");
  if (scenario.T_D < 0) throw ConfigError("config: scenario.T_D must be >= 0");
  if (scenario.T <= 2 * scenario.T_D) throw ConfigError("config: scenario.T must exceed 2*T_D");
  if (scenario.n2 < 1 || scenario.N % scenario.n2 != 0)
    throw ConfigError("config: scenario.n2 must divide scenario.N");
  if (scenario.geometry == ArrayKind::UPA)
    throw ConfigError("config: scenario.geometry = upa is not supported by the experiment runner (ULA only)");
  if (scenario.rho_db.empty()) throw ConfigError("config: scenario.rho_db needs at least one value");
  if (estimators.empty()) throw ConfigError("config: estimators list is empty");
  if (n_realizations < 1) throw ConfigError("config: monte_carlo.n_realizations must be >= 1");
  if (eta_grid_points < 2) throw ConfigError("config: output.eta_grid_points must be >= 2");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");

  const bool has_pilot_method =
      std::find(estimators.begin(), estimators.end(), EstimatorKind::PilotLs) != estimators.end() ||
      std::find(estimators.begin(), estimators.end(), EstimatorKind::Semiblind) != estimators.end();
  if (has_pilot_method) {
    if (pilots_T_T < scenario.K) throw ConfigError("config: pilots.T_T must be >= K");
    if (pilots_T_T >= scenario.T) throw ConfigError("config: pilots.T_T must be < T");
    if (scenario.T_D != 0 || scenario.B_hz != 0.0)
      throw ConfigError("config: pilot_ls/semiblind require the flat scenario (T_D = 0, B_hz = 0)");
  }
  if (crb_enabled && crb_kind == FisherKind::OneBitLowSnrFlat &&
      (scenario.T_D != 0 || scenario.B_hz != 0.0))
    throw ConfigError("config: crb.kind = onebit_flat requires the flat scenario");
  if (crb_enabled && crb_kind == FisherKind::OneBitLowSnrWideband &&
      static_cast<long>(scenario.N) * scenario.T > 2048)
    throw ConfigError("config: crb.kind = onebit_wideband exceeds the N*T <= 2048 guard");

  try {
    geometry().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  solver.validate();
  onebit_solver.validate();
  pilot_solver.validate();
  semiblind_solver.validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
  KeyValueReader kv(text);
  ExperimentConfig cfg;

  cfg.scenario.N = static_cast<int>(kv.require_integer("scenario.N"));
  cfg.scenario.K = static_cast<int>(kv.require_integer("scenario.K"));
  cfg.scenario.L = static_cast<int>(kv.require_integer("scenario.L"));
  cfg.scenario.T = static_cast<int>(kv.require_integer("scenario.T"));
  cfg.scenario.T_D = static_cast<int>(kv.require_integer("scenario.T_D"));
  cfg.scenario.B_hz = kv.number("scenario.B_hz", 0.0);
  cfg.scenario.fc_hz = kv.number("scenario.fc_hz", 60.5e9);
  cfg.scenario.spacing = kv.number("scenario.spacing", 0.5);
  const std::string geom = kv.get("scenario.geometry", "ula");
  if (geom == "ula") {
    cfg.scenario.geometry = ArrayKind::ULA;
  } else if (geom == "upa") {
    cfg.scenario.geometry = ArrayKind::UPA;
  } else {
    throw ConfigError("config: scenario.geometry must be ula or upa");
  }
  cfg.scenario.n2 = static_cast<int>(kv.integer("scenario.n2", 1));
  for (const std::string& tok : split_list(kv.require("scenario.rho_db")))
    cfg.scenario.rho_db.push_back(KeyValueReader::parse_number("scenario.rho_db", tok));
  cfg.scenario.on_grid = kv.boolean("scenario.on_grid", false);

  const std::string lscale = kv.get("lambda_scale", "none");
  if (lscale == "none") {
    cfg.lambda_scale = LambdaScale::None;
  } else if (lscale == "sqrt_rho") {
    cfg.lambda_scale = LambdaScale::SqrtRho;
  } else {
    throw ConfigError("config: lambda_scale must be none or sqrt_rho");
  }

  const std::string sym = kv.get("symbols", "gaussian");
  if (sym == "gaussian") {
    cfg.symbols = SymbolDistribution::Gaussian;
  } else if (sym == "qpsk") {
    cfg.symbols = SymbolDistribution::QPSK;
  } else {
    throw ConfigError("config: symbols must be gaussian or qpsk");
  }

  for (const std::string& tok : split_list(kv.require("estimators")))
    cfg.estimators.push_back(estimator_from_name(tok));

  SolverConfig base;
  cfg.solver = read_solver(kv, "solver", base);
  SolverConfig onebit_base = cfg.solver;
  onebit_base.lambda = 8.0;
  cfg.onebit_solver = read_solver(kv, "onebit_solver", onebit_base);
  cfg.pilot_solver = read_solver(kv, "pilot_solver", cfg.solver);
  cfg.semiblind_solver = read_solver(kv, "semiblind_solver", cfg.solver);

  cfg.pilots_T_T = static_cast<int>(kv.integer("pilots.T_T", 10));
  cfg.n_realizations = static_cast<int>(kv.require_integer("monte_carlo.n_realizations"));
  cfg.master_seed = static_cast<std::uint64_t>(kv.require_integer("monte_carlo.master_seed"));
  cfg.output_path = kv.get("output.path", "out");
  cfg.eta_grid_points = static_cast<int>(kv.integer("output.eta_grid_points", 101));
  cfg.crb_enabled = kv.boolean("crb.enabled", true);
  cfg.crb_kind = fisher_kind_from_name(kv.get("crb.kind", "ideal_exact"));
  cfg.threads = static_cast<int>(kv.integer("threads", 0));

  kv.reject_unknown();
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "scenario.N = " << cfg.scenario.N << "\n";
  out << "scenario.K = " << cfg.scenario.K << "\n";
  out << "scenario.L = " << cfg.scenario.L << "\n";
  out << "scenario.T = " << cfg.scenario.T << "\n";
  out << "scenario.T_D = " << cfg.scenario.T_D << "\n";
  out << "scenario.B_hz = " << format_double(cfg.scenario.B_hz) << "\n";
  out << "scenario.fc_hz = " << format_double(cfg.scenario.fc_hz) << "\n";
  out << "scenario.spacing = " << format_double(cfg.scenario.spacing) << "\n";
  out << "scenario.geometry = " << (cfg.scenario.geometry == ArrayKind::ULA ? "ula" : "upa") << "\n";
  out << "scenario.n2 = " << cfg.scenario.n2 << "\n";
  out << "scenario.rho_db = ";
  for (size_t i = 0; i < cfg.scenario.rho_db.size(); ++i)
    out << (i ? "," : "") << format_double(cfg.scenario.rho_db[i]);
  out << "\n";
  out << "scenario.on_grid = " << (cfg.scenario.on_grid ? "true" : "false") << "\n";
  out << "symbols = " << (cfg.symbols == SymbolDistribution::Gaussian ? "gaussian" : "qpsk") << "\n";
  out << "lambda_scale = " << (cfg.lambda_scale == LambdaScale::None ? "none" : "sqrt_rho") << "\n";
  out << "estimators = ";
  for (size_t i = 0; i < cfg.estimators.size(); ++i)
    out << (i ? "," : "") << estimator_name(cfg.estimators[i]);
  out << "\n";
  append_solver(out, "solver", cfg.solver);
  append_solver(out, "onebit_solver", cfg.onebit_solver);
  append_solver(out, "pilot_solver", cfg.pilot_solver);
  append_solver(out, "semiblind_solver", cfg.semiblind_solver);
  out << "pilots.T_T = " << cfg.pilots_T_T << "\n";
  out << "monte_carlo.n_realizations = " << cfg.n_realizations << "\n";
  out << "monte_carlo.master_seed = " << cfg.master_seed << "\n";
  out << "output.path = " << cfg.output_path << "\n";
  out << "output.eta_grid_points = " << cfg.eta_grid_points << "\n";
  out << "crb.enabled = " << (cfg.crb_enabled ? "true" : "false") << "\n";
  out << "crb.kind = " << fisher_kind_name(cfg.crb_kind) << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // thread cap and output location are execution knobs with no effect on the
  // numbers; they stay out of the run identity
  std::string repr = serialize_config(cfg);
  for (const char* key : {"threads = ", "output.path = "}) {
    const auto pos = repr.find(key);
    if (pos != std::string::npos) {
      const auto end = repr.find('\n', pos);
      repr.erase(pos, end == std::string::npos ? std::string::npos : end - pos + 1);
    }
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace blindmimo
