#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindmimo/blind_ideal.hpp"
#include "blindmimo/crb.hpp"
#include "blindmimo/geometry.hpp"
#include "blindmimo/txrx.hpp"

namespace blindmimo {

enum class EstimatorKind { SparseBlind, Subspace, OnebitSparseBlind, OnebitSubspace, PilotLs, Semiblind };

std::string estimator_name(EstimatorKind kind);

/// Raised on malformed or inconsistent configuration; the message names the
/// offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int N = 0, K = 0, L = 0, T = 0, T_D = 0;
  double B_hz = 0.0;
  double fc_hz = 60.5e9;
  double spacing = 0.5;
  ArrayKind geometry = ArrayKind::ULA;
  int n2 = 1;
  std::vector<double> rho_db;
  bool on_grid = false;
};

/// How the configured l1 weights react to the SNR point. With SqrtRho the
/// effective weight at symbol variance rho_x is lambda * sqrt(rho_x), which
/// keeps the penalty matched to the noise scale of the likelihood gradient
/// when one config sweeps several SNRs.
enum class LambdaScale { None, SqrtRho };

/// Full experiment description, parsed from a `key = value` text file (one
/// pair per line, `#` comments). Unknown keys are rejected. Units are
/// converted once at parse time: SNR is handled in dB here and linearly
/// inside the library, frequencies are Hz.
struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<EstimatorKind> estimators;
  SolverConfig solver;            // sparse_blind
  SolverConfig onebit_solver;     // onebit_sparse_blind (lambda defaults to 8)
  SolverConfig pilot_solver;      // pilot_ls
  SolverConfig semiblind_solver;  // semiblind
  SymbolDistribution symbols = SymbolDistribution::Gaussian;
  LambdaScale lambda_scale = LambdaScale::None;
  int pilots_T_T = 10;
  int n_realizations = 1;
  std::uint64_t master_seed = 1;
  std::string output_path = "out";
  int eta_grid_points = 101;
  bool crb_enabled = true;
  FisherKind crb_kind = FisherKind::IdealExact;
  int threads = 0;  // 0: hardware concurrency

  ArrayGeometry geometry() const;
  /// Throws ConfigError on violated invariants (T > 2*T_D, T_T < T, ...).
  void validate() const;
};

/// Symbol variance used by the simulator and estimators for a scenario at the
/// given SNR point. rho_db quotes the mean received SNR per antenna (signal
/// power at one antenna over the unit noise power). With the library's
/// unit-norm steering atoms each user contributes L/N of its symbol power to
/// one antenna, so the equivalent symbol variance is
///   rho_x = 10^(rho_db/10) * N / (K * L).
double scenario_symbol_variance(const ScenarioConfig& scenario, double rho_db);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical serialization; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a hash of the canonical serialization, recorded in run manifests.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace blindmimo
