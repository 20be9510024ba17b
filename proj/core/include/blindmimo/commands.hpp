#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace blindmimo {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line overrides applied on top of the parsed config.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

/// Runs the Monte-Carlo experiment described by the config and writes one
/// CCDF CSV per method, an eta_crb.csv reference, and a manifest recording
/// the config hash, seed and version. Exit codes: 0 ok, 1 invalid config,
/// 2 runtime failure.
int cmd_experiment(const std::string& config_path, const CliOverrides& overrides);

/// Estimates the coefficient matrix from a serialized receiver block,
/// routing one-bit blocks to the EM estimator automatically. Writes the
/// estimate container plus a text diagnostics sidecar.
int cmd_estimate(const std::string& block_path, const std::string& config_path,
                 const CliOverrides& overrides);

/// Averages the eta_CRB predictor over seeded realizations, emitting one row
/// per (SNR, bound kind); one-bit kinds are included where the scenario
/// admits them.
int cmd_crb(const std::string& config_path, const CliOverrides& overrides);

}  // namespace blindmimo
