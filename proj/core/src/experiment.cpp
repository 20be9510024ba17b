#include "blindmimo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "blindmimo/baselines.hpp"
#include "blindmimo/blind_onebit.hpp"
#include "blindmimo/channel.hpp"
#include "blindmimo/crb.hpp"

namespace blindmimo {

namespace {

constexpr std::uint64_t kStreamChannel = 1;
constexpr std::uint64_t kStreamData = 2;
constexpr std::uint64_t kStreamPilot = 3;

struct RealizationOutput {
  std::vector<std::vector<double>> eta;  // [estimator][user]
  std::vector<uint8_t> failed;
  std::vector<double> eta_crb_users;
  bool crb_singular = false;
};

bool uses(const ExperimentConfig& cfg, EstimatorKind kind) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), kind) != cfg.estimators.end();
}

// Support pattern used for the clairvoyant bound: exact nonzeros for on-grid
// channels, per-user top-L magnitudes of the grid projection otherwise.
MatrixXcd crb_support_pattern(const ChannelRealization& chan, int L) {
  if (chan.on_grid) return chan.coeffs;
  MatrixXcd pattern = MatrixXcd::Zero(chan.coeffs.rows(), chan.coeffs.cols());
  for (int k = 0; k < chan.coeffs.cols(); ++k) {
    std::vector<int> order(chan.coeffs.rows());
    for (int i = 0; i < chan.coeffs.rows(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + L, order.end(), [&](int a, int b) {
      const double ma = std::abs(chan.coeffs(a, k));
      const double mb = std::abs(chan.coeffs(b, k));
      return ma > mb || (ma == mb && a < b);
    });
    for (int l = 0; l < L; ++l) pattern(order[l], k) = cxd(1.0, 0.0);
  }
  return pattern;
}

RealizationOutput run_realization(const ExperimentConfig& cfg, const Dictionary& dict, double rho,
                                  std::uint64_t key) {
  const int K = cfg.scenario.K;
  const int T = cfg.scenario.T;
  const int T_D = cfg.scenario.T_D;
  RealizationOutput out;
  out.eta.resize(cfg.estimators.size());
  out.failed.assign(cfg.estimators.size(), 0);

  Rng rng_ch = Rng::stream(cfg.master_seed, key, kStreamChannel);
  const ChannelRealization chan = draw_channel(dict, K, cfg.scenario.L, cfg.scenario.on_grid, rng_ch);
  const std::vector<MatrixXcd> H_true = exact_transfer(chan, dict);

  const bool need_blind = uses(cfg, EstimatorKind::SparseBlind) || uses(cfg, EstimatorKind::Subspace) ||
                          uses(cfg, EstimatorKind::OnebitSparseBlind) ||
                          uses(cfg, EstimatorKind::OnebitSubspace);
  const bool need_onebit =
      uses(cfg, EstimatorKind::OnebitSparseBlind) || uses(cfg, EstimatorKind::OnebitSubspace);
  const bool need_pilot = uses(cfg, EstimatorKind::PilotLs) || uses(cfg, EstimatorKind::Semiblind);

  RxBlock rx, rxq;
  if (need_blind) {
    Rng rng_data = Rng::stream(cfg.master_seed, key, kStreamData);
    const SymbolBlock sym = draw_symbols(K, T, rho, cfg.symbols, rng_data);
    rx = simulate_rx(H_true, sym, rng_data, 1.0, T_D);
    if (need_onebit) rxq = quantize_onebit(rx);
  }

  MatrixXcd X_T, Y_T, Y_D;
  if (need_pilot) {
    // Exactly-flat scenario (validated): one channel matrix serves the block.
    Rng rng_pilot = Rng::stream(cfg.master_seed, key, kStreamPilot);
    const MatrixXcd& H0 = H_true[0];
    X_T = orthogonal_pilots(K, cfg.pilots_T_T, rho);
    const SymbolBlock data = draw_symbols(K, T - cfg.pilots_T_T, rho, cfg.symbols, rng_pilot);
    Y_T = H0 * X_T;
    for (Eigen::Index j = 0; j < Y_T.cols(); ++j)
      for (Eigen::Index i = 0; i < Y_T.rows(); ++i) Y_T(i, j) += rng_pilot.cgaussian();
    Y_D = H0 * data.x_freq;
    for (Eigen::Index j = 0; j < Y_D.cols(); ++j)
      for (Eigen::Index i = 0; i < Y_D.rows(); ++i) Y_D(i, j) += rng_pilot.cgaussian();
  }

  for (size_t e = 0; e < cfg.estimators.size(); ++e) {
    try {
      std::vector<MatrixXcd> H_hat;
      switch (cfg.estimators[e]) {
        case EstimatorKind::SparseBlind:
          H_hat = channel_transfer(estimate_blind(rx, dict, rho, cfg.solver).S_hat, dict);
          break;
        case EstimatorKind::Subspace:
          H_hat = channel_transfer(subspace_init(rx, dict, rho, K).S_hat, dict);
          break;
        case EstimatorKind::OnebitSparseBlind:
          H_hat = channel_transfer(estimate_blind_onebit(rxq, dict, rho, cfg.onebit_solver).S_hat, dict);
          break;
        case EstimatorKind::OnebitSubspace:
          H_hat = channel_transfer(onebit_subspace_init(rxq, dict, rho, K).S_hat, dict);
          break;
        case EstimatorKind::PilotLs:
          H_hat = channel_transfer(pilot_ls_estimate(Y_T, X_T, dict, cfg.pilot_solver).S_hat, dict);
          break;
        case EstimatorKind::Semiblind: {
          const MatrixXcd H = semiblind_estimate(Y_T, Y_D, X_T, dict, rho, cfg.semiblind_solver).H;
          H_hat.assign(T, H);
          break;
        }
      }
      const EtaResult res = resolve_permutation(H_hat, H_true, T_D);
      out.eta[e].assign(res.eta.data(), res.eta.data() + res.eta.size());
    } catch (const std::exception&) {
      out.failed[e] = 1;
    }
  }

  if (cfg.crb_enabled) {
    try {
      const MatrixXcd pattern = crb_support_pattern(chan, cfg.scenario.L);
      FisherMatrix fisher;
      switch (cfg.crb_kind) {
        case FisherKind::IdealExact: fisher = fisher_ideal(H_true, dict, rho); break;
        case FisherKind::IdealLowSnr: fisher = fisher_ideal_lowsnr(H_true, dict, rho); break;
        case FisherKind::OneBitLowSnrFlat:
          fisher = fisher_onebit_flat(H_true[0], dict.F(0), rho, dict.T);
          break;
        case FisherKind::OneBitLowSnrWideband: fisher = fisher_onebit_wideband(H_true, dict, rho); break;
      }
      const std::vector<EtaCrb> etas = eta_crb(reduce_support(fisher, pattern), pattern, H_true, dict);
      bool all_ok = true;
      for (const EtaCrb& e : etas) all_ok = all_ok && e.reliable;
      if (all_ok) {
        for (const EtaCrb& e : etas) out.eta_crb_users.push_back(e.value);
      } else {
        out.crb_singular = true;
      }
    } catch (const std::exception&) {
      out.crb_singular = true;
    }
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ArrayGeometry geom = cfg.geometry();
  const int R = cfg.n_realizations;
  int n_threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, R));

  VectorXd grid = VectorXd::LinSpaced(cfg.eta_grid_points, 0.0, 1.0);
  ExperimentResult result;

  for (size_t ri = 0; ri < cfg.scenario.rho_db.size(); ++ri) {
    const double rho_db = cfg.scenario.rho_db[ri];
    const double rho = scenario_symbol_variance(cfg.scenario, rho_db);
    const Dictionary dict = build_dictionary(geom, cfg.scenario.T, cfg.scenario.T_D);

    ExperimentConfig point_cfg = cfg;
    if (cfg.lambda_scale == LambdaScale::SqrtRho) {
      const double factor = std::sqrt(rho);
      point_cfg.solver.lambda *= factor;
      point_cfg.onebit_solver.lambda *= factor;
      point_cfg.pilot_solver.lambda *= factor;
      point_cfg.semiblind_solver.lambda *= factor;
    }

    std::vector<RealizationOutput> outputs(R);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= R) return;
        const std::uint64_t key = (static_cast<std::uint64_t>(ri) << 32) | static_cast<std::uint64_t>(r);
        outputs[r] = run_realization(point_cfg, dict, rho, key);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (size_t e = 0; e < cfg.estimators.size(); ++e) {
      MethodCurve curve;
      curve.method = estimator_name(cfg.estimators[e]);
      curve.rho_db = rho_db;
      std::vector<double> pooled;
      for (int r = 0; r < R; ++r) {
        if (outputs[r].failed[e]) {
          ++curve.failures;
          continue;
        }
        pooled.insert(pooled.end(), outputs[r].eta[e].begin(), outputs[r].eta[e].end());
      }
      if (!pooled.empty()) {
        curve.table = ccdf(pooled, grid);
        curve.mean_eta = std::accumulate(pooled.begin(), pooled.end(), 0.0) / pooled.size();
        curve.median_eta = median(pooled);
      } else {
        curve.table.thresholds = grid;
        curve.table.prob = VectorXd::Zero(grid.size());
        curve.table.n_samples = 0;
      }
      result.curves.push_back(std::move(curve));
    }

    if (cfg.crb_enabled) {
      CrbSummary summary;
      summary.rho_db = rho_db;
      switch (cfg.crb_kind) {
        case FisherKind::IdealExact: summary.kind = "ideal_exact"; break;
        case FisherKind::IdealLowSnr: summary.kind = "ideal_lowsnr"; break;
        case FisherKind::OneBitLowSnrFlat: summary.kind = "onebit_flat"; break;
        case FisherKind::OneBitLowSnrWideband: summary.kind = "onebit_wideband"; break;
      }
      double acc = 0.0;
      for (int r = 0; r < R; ++r) {
        if (outputs[r].crb_singular || outputs[r].eta_crb_users.empty()) {
          if (outputs[r].crb_singular) ++summary.n_singular;
          continue;
        }
        for (const double v : outputs[r].eta_crb_users) {
          acc += v;
          ++summary.n_users_ok;
        }
      }
      summary.eta_crb_mean = summary.n_users_ok > 0 ? acc / summary.n_users_ok : 0.0;
      result.crb.push_back(summary);
    }
  }
  return result;
}

}  // namespace blindmimo
