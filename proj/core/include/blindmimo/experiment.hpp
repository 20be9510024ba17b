#pragma once

#include <string>
#include <vector>

#include "blindmimo/config.hpp"
#include "blindmimo/metrics.hpp"

namespace blindmimo {

/// Pooled CCDF of eta over users and realizations for one method at one SNR.
struct MethodCurve {
  std::string method;
  double rho_db = 0.0;
  CcdfTable table;
  double mean_eta = 0.0;
  double median_eta = 0.0;
  int failures = 0;  // realizations where the estimator threw
};

/// Averaged eta_CRB reference point at one SNR.
struct CrbSummary {
  double rho_db = 0.0;
  double eta_crb_mean = 0.0;
  std::string kind;
  int n_users_ok = 0;
  int n_singular = 0;  // realizations excluded for singular reduced Fisher
};

struct ExperimentResult {
  std::vector<MethodCurve> curves;
  std::vector<CrbSummary> crb;
};

/// Seeded Monte-Carlo run over all configured SNR points and estimators.
/// Realizations execute in parallel on per-realization RNG streams derived
/// from (master seed, SNR index, realization index); aggregation order is
/// fixed, so results are identical for any thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace blindmimo
