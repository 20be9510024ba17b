#include "blindmimo/commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "blindmimo/baselines.hpp"
#include "blindmimo/blind_onebit.hpp"
#include "blindmimo/block_io.hpp"
#include "blindmimo/channel.hpp"
#include "blindmimo/config.hpp"
#include "blindmimo/crb.hpp"
#include "blindmimo/experiment.hpp"

namespace blindmimo {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ExperimentConfig load_config(const std::string& path, const CliOverrides& ov) {
  ExperimentConfig cfg = parse_config_file(path);
  if (ov.seed) cfg.master_seed = *ov.seed;
  if (ov.threads) cfg.threads = *ov.threads;
  if (ov.out) cfg.output_path = *ov.out;
  cfg.validate();
  return cfg;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string manifest_text(const ExperimentConfig& cfg) {
  std::string text;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  text += "config_hash=" + std::string(hex) + "\n";
  text += "master_seed=" + std::to_string(cfg.master_seed) + "\n";
  text += "version=" + std::string(kVersion) + "\n";
  return text;
}

struct CrbKindSpec {
  FisherKind kind;
  std::string name;
};

std::vector<CrbKindSpec> crb_kinds_for(const ExperimentConfig& cfg) {
  std::vector<CrbKindSpec> kinds{{FisherKind::IdealExact, "ideal_exact"}};
  const bool flat = cfg.scenario.T_D == 0 && cfg.scenario.B_hz == 0.0;
  if (flat) {
    kinds.push_back({FisherKind::OneBitLowSnrFlat, "onebit_flat"});
  } else if (static_cast<long>(cfg.scenario.N) * cfg.scenario.T <= 2048) {
    kinds.push_back({FisherKind::OneBitLowSnrWideband, "onebit_wideband"});
  }
  return kinds;
}

}  // namespace

int cmd_experiment(const std::string& config_path, const CliOverrides& overrides) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const ExperimentResult result = run_experiment(cfg);

    const fs::path out_dir(cfg.output_path);
    fs::create_directories(out_dir);

    // one CSV per method, rows grouped by SNR point
    for (const EstimatorKind est : cfg.estimators) {
      const std::string name = estimator_name(est);
      std::string csv = "eta_threshold,prob,method,rho_db,n_samples\n";
      for (const MethodCurve& curve : result.curves) {
        if (curve.method != name) continue;
        for (Eigen::Index i = 0; i < curve.table.thresholds.size(); ++i) {
          csv += fmt(curve.table.thresholds(i)) + "," + fmt(curve.table.prob(i)) + "," + name + "," +
                 fmt(curve.rho_db) + "," + std::to_string(curve.table.n_samples) + "\n";
        }
      }
      write_text_file(out_dir / (name + ".csv"), csv);
    }

    if (cfg.crb_enabled) {
      std::string csv = "rho_db,eta_crb_mean,kind\n";
      for (const CrbSummary& s : result.crb)
        csv += fmt(s.rho_db) + "," + fmt(s.eta_crb_mean) + "," + s.kind + "\n";
      write_text_file(out_dir / "eta_crb.csv", csv);
      for (const CrbSummary& s : result.crb)
        if (s.n_singular > 0)
          std::cerr << "note: " << s.n_singular << " realizations with singular reduced Fisher at "
                    << s.rho_db << " dB excluded from eta_crb\n";
    }

    write_text_file(out_dir / "manifest.txt", manifest_text(cfg));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_estimate(const std::string& block_path, const std::string& config_path,
                 const CliOverrides& overrides) {
  ExperimentConfig cfg;
  RxBlock block;
  try {
    cfg = load_config(config_path, overrides);
    block = read_rxblock(block_path);
    if (block.dims.N != cfg.scenario.N)
      throw std::runtime_error("block antenna count does not match the config scenario");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    ArrayGeometry geom = cfg.geometry();
    const Dictionary dict = build_dictionary(geom, block.dims.T, block.dims.T_D);

    SparseEstimate est;
    std::string method;
    if (block.onebit()) {
      est = estimate_blind_onebit(block, dict, block.rho, cfg.onebit_solver);
      method = "onebit_sparse_blind";
    } else {
      est = estimate_blind(block, dict, block.rho, cfg.solver);
      method = "sparse_blind";
    }

    EstimateBundle bundle;
    bundle.S_hat = est.S_hat;
    bundle.H_hat = channel_transfer(est.S_hat, dict);

    const std::string out_path = overrides.out ? *overrides.out : block_path + ".est";
    write_estimate(out_path, bundle);

    std::string diag;
    diag += "method=" + method + "\n";
    diag += "iterations=" + std::to_string(est.iterations) + "\n";
    diag += "final_objective=" + fmt(est.objective_trace.empty() ? 0.0 : est.objective_trace.back()) + "\n";
    diag += "kkt_residual=" + fmt(est.kkt_residual) + "\n";
    diag += std::string("converged=") + (est.converged ? "true" : "false") + "\n";
    diag += std::string("rank_deficient_init=") + (est.rank_deficient ? "true" : "false") + "\n";
    write_text_file(out_path + ".diag.txt", diag);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_crb(const std::string& config_path, const CliOverrides& overrides) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const std::vector<CrbKindSpec> kinds = crb_kinds_for(cfg);
    const ArrayGeometry geom = cfg.geometry();
    const Dictionary dict = build_dictionary(geom, cfg.scenario.T, cfg.scenario.T_D);
    const int R = cfg.n_realizations;
    int n_threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, R));

    std::string csv = "rho_db,eta_crb_mean,kind\n";
    for (size_t ri = 0; ri < cfg.scenario.rho_db.size(); ++ri) {
      const double rho_db = cfg.scenario.rho_db[ri];
      const double rho = scenario_symbol_variance(cfg.scenario, rho_db);

      struct Row {
        std::vector<double> values;  // per kind: sum of per-user etas
        std::vector<int> count;
        std::vector<int> singular;
      };
      std::vector<Row> rows(R);
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (;;) {
          const int r = next.fetch_add(1);
          if (r >= R) return;
          Row row;
          row.values.assign(kinds.size(), 0.0);
          row.count.assign(kinds.size(), 0);
          row.singular.assign(kinds.size(), 0);
          const std::uint64_t key = (static_cast<std::uint64_t>(ri) << 32) | static_cast<std::uint64_t>(r);
          Rng rng = Rng::stream(cfg.master_seed, key, 1);
          const ChannelRealization chan =
              draw_channel(dict, cfg.scenario.K, cfg.scenario.L, cfg.scenario.on_grid, rng);
          const std::vector<MatrixXcd> H_true = exact_transfer(chan, dict);
          MatrixXcd pattern = MatrixXcd::Zero(dict.P(), cfg.scenario.K);
          {
            // top-L support per user from the grid projection (exact for on-grid)
            for (int k = 0; k < cfg.scenario.K; ++k) {
              std::vector<std::pair<double, int>> mag;
              for (int i = 0; i < dict.P(); ++i)
                mag.push_back({std::abs(chan.coeffs(i, k)), i});
              std::sort(mag.begin(), mag.end(), [](const auto& a, const auto& b) {
                return a.first > b.first || (a.first == b.first && a.second < b.second);
              });
              for (int l = 0; l < cfg.scenario.L && mag[l].first > 0.0; ++l)
                pattern(mag[l].second, k) = cxd(1.0, 0.0);
            }
          }
          for (size_t ki = 0; ki < kinds.size(); ++ki) {
            try {
              FisherMatrix fisher;
              switch (kinds[ki].kind) {
                case FisherKind::IdealExact: fisher = fisher_ideal(H_true, dict, rho); break;
                case FisherKind::IdealLowSnr: fisher = fisher_ideal_lowsnr(H_true, dict, rho); break;
                case FisherKind::OneBitLowSnrFlat:
                  fisher = fisher_onebit_flat(H_true[0], dict.F(0), rho, dict.T);
                  break;
                case FisherKind::OneBitLowSnrWideband:
                  fisher = fisher_onebit_wideband(H_true, dict, rho);
                  break;
              }
              const auto etas = eta_crb(reduce_support(fisher, pattern), pattern, H_true, dict);
              bool ok = true;
              for (const auto& e : etas) ok = ok && e.reliable;
              if (!ok) {
                row.singular[ki] += 1;
              } else {
                for (const auto& e : etas) {
                  row.values[ki] += e.value;
                  row.count[ki] += 1;
                }
              }
            } catch (const std::exception&) {
              row.singular[ki] += 1;
            }
          }
          rows[r] = std::move(row);
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();

      for (size_t ki = 0; ki < kinds.size(); ++ki) {
        double acc = 0.0;
        int count = 0, singular = 0;
        for (const auto& row : rows) {
          acc += row.values[ki];
          count += row.count[ki];
          singular += row.singular[ki];
        }
        csv += fmt(rho_db) + "," + fmt(count > 0 ? acc / count : 0.0) + "," + kinds[ki].name + "\n";
        if (singular > 0)
          std::cerr << "note: " << singular << " singular realizations excluded (" << kinds[ki].name
                    << ", " << rho_db << " dB)\n";
      }
    }

    const fs::path out_dir(cfg.output_path);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "eta_crb.csv", csv);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace blindmimo
