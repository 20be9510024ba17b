#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blindmimo/block_io.hpp"
#include "blindmimo/blind_onebit.hpp"
#include "blindmimo/channel.hpp"
#include "blindmimo/commands.hpp"
#include "blindmimo/config.hpp"
#include "blindmimo/metrics.hpp"

using namespace blindmimo;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"(
# small smoke scenario
scenario.N = 8
scenario.K = 2
scenario.L = 2
scenario.T = 64
scenario.T_D = 0
scenario.B_hz = 0
scenario.rho_db = -6
estimators = sparse_blind,subspace
solver.lambda = 2
solver.max_iters = 60
monte_carlo.n_realizations = 2
monte_carlo.master_seed = 7
output.path = out
)";

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("blindmimo_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.txt";
  std::ofstream out(p);
  out << text;
  out.close();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round trip: parse, serialize, parse") {
  const ExperimentConfig a = parse_config_text(kSmallConfig);
  const std::string text = serialize_config(a);
  const ExperimentConfig b = parse_config_text(text);
  CHECK(serialize_config(b) == text);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(a.scenario.N == 8);
  CHECK(a.solver.lambda == 2.0);
  CHECK(a.onebit_solver.lambda == 8.0);       // default stays 8
  CHECK(a.onebit_solver.max_iters == 60);     // inherits the base override
  CHECK(a.pilot_solver.lambda == 2.0);        // inherits lambda from solver
}

TEST_CASE("missing and unknown keys are named in the error") {
  try {
    parse_config_text("scenario.N = 4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scenario.K") != std::string::npos);
  }
  try {
    parse_config_text(std::string(kSmallConfig) + "scenario.bogus = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scenario.bogus") != std::string::npos);
  }
}

TEST_CASE("config invariants are enforced") {
  std::string bad = kSmallConfig;
  bad += "scenario.T_D = 40\n";  // violates T > 2 T_D
  CHECK_THROWS_AS(parse_config_text(bad), ConfigError);

  std::string pilots = kSmallConfig;
  pilots += "estimators = pilot_ls\npilots.T_T = 64\n";  // T_T must be < T
  CHECK_THROWS_AS(parse_config_text(pilots), ConfigError);
}

TEST_CASE("rx block container round trip is bit exact") {
  const fs::path dir = fresh_dir("block_roundtrip");
  ArrayGeometry g;
  g.n1 = 4;
  g.bandwidth_hz = 0.0;
  const Dictionary dict = build_dictionary(g, 16, 0);
  Rng rng(1);
  const ChannelRealization chan = draw_channel(dict, 1, 1, false, rng);
  const auto H = exact_transfer(chan, dict);
  const SymbolBlock sym = draw_symbols(1, 16, 0.5, SymbolDistribution::Gaussian, rng);
  RxBlock rx = simulate_rx(H, sym, rng, 1.0, 0);
  const RxBlock rxq = quantize_onebit(rx);

  const std::string path = (dir / "block.bin").string();
  write_rxblock(path, rxq);
  const RxBlock back = read_rxblock(path);
  CHECK(back.rho == rxq.rho);
  CHECK(back.dims.N == rxq.dims.N);
  CHECK(back.dims.T_D == rxq.dims.T_D);
  CHECK((back.y_freq - rxq.y_freq).cwiseAbs().maxCoeff() == 0.0);
  CHECK((*back.r_time - *rxq.r_time).cwiseAbs().maxCoeff() == 0.0);
  CHECK((*back.r_freq - *rxq.r_freq).cwiseAbs().maxCoeff() == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("truncated container is rejected with exit code 1") {
  const fs::path dir = fresh_dir("truncated");
  const std::string cfg_path = write_config(dir, kSmallConfig);
  const std::string path = (dir / "block.bin").string();
  {
    RxBlock rx;
    rx.dims = {8, 1, 16, 0};
    rx.y_freq = MatrixXcd::Ones(8, 16);
    write_rxblock(path, rx);
  }
  // truncate the file
  fs::resize_file(path, fs::file_size(path) / 2);
  CHECK_THROWS_AS(read_rxblock(path), std::runtime_error);
  CliOverrides ov;
  ov.out = (dir / "est.bin").string();
  CHECK(cmd_estimate(path, cfg_path, ov) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cmd_estimate reproduces the in-process pipeline exactly") {
  const fs::path dir = fresh_dir("estimate_roundtrip");
  const std::string cfg_path = write_config(dir, kSmallConfig);
  const ExperimentConfig cfg = parse_config_file(cfg_path);

  ArrayGeometry g = cfg.geometry();
  const Dictionary dict = build_dictionary(g, cfg.scenario.T, cfg.scenario.T_D);
  Rng rng(5);
  const ChannelRealization chan = draw_channel(dict, 2, 2, false, rng);
  const auto H_true = exact_transfer(chan, dict);
  const SymbolBlock sym = draw_symbols(2, cfg.scenario.T, 0.25, SymbolDistribution::Gaussian, rng);
  RxBlock rx = simulate_rx(H_true, sym, rng, 1.0, 0);
  rx.rho = 0.25;
  rx.dims.K = 2;

  SUBCASE("unquantized block routes to the ideal estimator") {
    const std::string block_path = (dir / "block.bin").string();
    write_rxblock(block_path, rx);
    CliOverrides ov;
    ov.out = (dir / "block.est").string();
    REQUIRE(cmd_estimate(block_path, cfg_path, ov) == 0);
    const EstimateBundle bundle = read_estimate(*ov.out);
    const SparseEstimate direct = estimate_blind(rx, dict, rx.rho, cfg.solver);
    CHECK((bundle.S_hat - direct.S_hat).cwiseAbs().maxCoeff() == 0.0);
    const auto Hd = channel_transfer(direct.S_hat, dict);
    for (int m = 0; m < dict.T; ++m)
      CHECK((bundle.H_hat[m] - Hd[m]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fs::exists(*ov.out + ".diag.txt"));
    const std::string diag = slurp(*ov.out + ".diag.txt");
    CHECK(diag.find("method=sparse_blind") != std::string::npos);
    CHECK(diag.find("kkt_residual=") != std::string::npos);
  }

  SUBCASE("one-bit block routes to the EM estimator via the container flag") {
    const RxBlock rxq = quantize_onebit(rx);
    const std::string block_path = (dir / "blockq.bin").string();
    write_rxblock(block_path, rxq);
    CliOverrides ov;
    ov.out = (dir / "blockq.est").string();
    REQUIRE(cmd_estimate(block_path, cfg_path, ov) == 0);
    const EstimateBundle bundle = read_estimate(*ov.out);
    const SparseEstimate direct = estimate_blind_onebit(rxq, dict, rxq.rho, cfg.onebit_solver);
    CHECK((bundle.S_hat - direct.S_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK(slurp(*ov.out + ".diag.txt").find("method=onebit_sparse_blind") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("cmd_experiment writes deterministic CSVs and a manifest") {
  const fs::path dir = fresh_dir("experiment");
  const std::string cfg_path = write_config(dir, kSmallConfig);

  CliOverrides ov1, ov2;
  ov1.out = (dir / "run1").string();
  ov2.out = (dir / "run2").string();
  ov2.threads = 2;
  REQUIRE(cmd_experiment(cfg_path, ov1) == 0);
  REQUIRE(cmd_experiment(cfg_path, ov2) == 0);

  for (const char* f : {"sparse_blind.csv", "subspace.csv", "eta_crb.csv", "manifest.txt"}) {
    CHECK(fs::exists(dir / "run1" / f));
    CHECK(slurp(dir / "run1" / f) == slurp(dir / "run2" / f));
  }
  const std::string csv = slurp(dir / "run1" / "sparse_blind.csv");
  CHECK(csv.rfind("eta_threshold,prob,method,rho_db,n_samples", 0) == 0);
  CHECK(csv.find("sparse_blind,-6,") != std::string::npos);
  const std::string manifest = slurp(dir / "run1" / "manifest.txt");
  CHECK(manifest.find("config_hash=") != std::string::npos);
  CHECK(manifest.find("master_seed=7") != std::string::npos);
  CHECK(manifest.find("version=0.1.0") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cmd_experiment rejects a malformed config with exit 1") {
  const fs::path dir = fresh_dir("badcfg");
  const std::string cfg_path = write_config(dir, "scenario.N = 8\n");
  CHECK(cmd_experiment(cfg_path, {}) == 1);
  CHECK(cmd_experiment((dir / "missing.txt").string(), {}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cmd_crb emits ideal and one-bit kinds for a flat scenario, deterministically") {
  const fs::path dir = fresh_dir("crb");
  std::string text = kSmallConfig;
  text += "scenario.rho_db = -12,-6\n";
  const std::string cfg_path = write_config(dir, text);

  CliOverrides ov1, ov2;
  ov1.out = (dir / "crb1").string();
  ov2.out = (dir / "crb2").string();
  ov2.threads = 2;
  REQUIRE(cmd_crb(cfg_path, ov1) == 0);
  REQUIRE(cmd_crb(cfg_path, ov2) == 0);
  const std::string csv = slurp(dir / "crb1" / "eta_crb.csv");
  CHECK(csv == slurp(dir / "crb2" / "eta_crb.csv"));
  CHECK(csv.find("ideal_exact") != std::string::npos);
  CHECK(csv.find("onebit_flat") != std::string::npos);
  CHECK(csv.find("-12,") != std::string::npos);
  CHECK(csv.find("-6,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("seed override changes the outputs; same seed reproduces them") {
  const fs::path dir = fresh_dir("seed");
  const std::string cfg_path = write_config(dir, kSmallConfig);
  CliOverrides a, b, c;
  a.out = (dir / "a").string();
  b.out = (dir / "b").string();
  b.seed = 7;  // same as the config value
  c.out = (dir / "c").string();
  c.seed = 99;
  REQUIRE(cmd_experiment(cfg_path, a) == 0);
  REQUIRE(cmd_experiment(cfg_path, b) == 0);
  REQUIRE(cmd_experiment(cfg_path, c) == 0);
  CHECK(slurp(dir / "a" / "sparse_blind.csv") == slurp(dir / "b" / "sparse_blind.csv"));
  CHECK(slurp(dir / "a" / "sparse_blind.csv") != slurp(dir / "c" / "sparse_blind.csv"));
  fs::remove_all(dir);
}
