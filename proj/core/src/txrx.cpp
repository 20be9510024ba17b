#include "blindmimo/txrx.hpp"

#include <cmath>
#include <stdexcept>

namespace blindmimo {

namespace {

// Symmetric unitary DFT matrix. Phases are computed from (a*b) mod T so the
// argument stays in [0, 2*pi) at any block length.
MatrixXcd dft_matrix(int T, bool inverse) {
  MatrixXcd w(T, T);
  const double scale = 1.0 / std::sqrt(static_cast<double>(T));
  const double sign = inverse ? 1.0 : -1.0;
  for (int a = 0; a < T; ++a) {
    for (int b = a; b < T; ++b) {
      const std::uint64_t prod = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
      const double phase = sign * 2.0 * kPi * static_cast<double>(prod % T) / T;
      w(a, b) = scale * cxd(std::cos(phase), std::sin(phase));
      w(b, a) = w(a, b);
    }
  }
  return w;
}

}  // namespace

MatrixXcd dft_block(const MatrixXcd& x, bool inverse) {
  const int T = static_cast<int>(x.cols());
  if (T < 1) throw std::invalid_argument("dft_block: empty block");
  return x * dft_matrix(T, inverse);
}

SymbolBlock draw_symbols(int K, int T, double rho, SymbolDistribution dist, Rng& rng) {
  if (rho <= 0.0) throw std::invalid_argument("draw_symbols: rho must be > 0");
  if (K < 1 || T < 1) throw std::invalid_argument("draw_symbols: K and T must be >= 1");
  SymbolBlock block;
  block.distribution = dist;
  block.rho = rho;
  const double amp = std::sqrt(rho);
  if (dist == SymbolDistribution::Gaussian) {
    block.x_freq.resize(K, T);
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < K; ++k) block.x_freq(k, t) = amp * rng.cgaussian();
  } else {
    static const cxd qpsk[4] = {{0.70710678118654752440, 0.70710678118654752440},
                                {0.70710678118654752440, -0.70710678118654752440},
                                {-0.70710678118654752440, 0.70710678118654752440},
                                {-0.70710678118654752440, -0.70710678118654752440}};
    MatrixXcd x_time(K, T);
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < K; ++k) {
        const int idx = std::min(3, static_cast<int>(4.0 * rng.uniform()));
        x_time(k, t) = amp * qpsk[idx];
      }
    block.x_freq = dft_block(x_time, false);
  }
  return block;
}

RxBlock simulate_rx(const std::vector<MatrixXcd>& H, const SymbolBlock& symbols, Rng& rng,
                    double noise_amp, int T_D) {
  const int T = static_cast<int>(H.size());
  if (T < 1) throw std::invalid_argument("simulate_rx: empty channel");
  const int N = static_cast<int>(H[0].rows());
  const int K = static_cast<int>(H[0].cols());
  if (symbols.x_freq.rows() != K || symbols.x_freq.cols() != T)
    throw std::invalid_argument("simulate_rx: symbol block dimensions do not match channel");

  RxBlock rx;
  rx.rho = symbols.rho;
  rx.dims = {N, K, T, T_D};
  rx.y_freq.resize(N, T);
  for (int m = 0; m < T; ++m) {
    rx.y_freq.col(m) = H[m] * symbols.x_freq.col(m);
    for (int n = 0; n < N; ++n) rx.y_freq(n, m) += noise_amp * rng.cgaussian();
  }
  return rx;
}

MatrixXcd quantize_signs(const MatrixXcd& x) {
  const double q = 0.70710678118654752440;
  MatrixXcd r(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const cxd v = x(i, j);
      r(i, j) = cxd(v.real() >= 0.0 ? q : -q, v.imag() >= 0.0 ? q : -q);
    }
  return r;
}

RxBlock quantize_onebit(const RxBlock& rx) {
  if (rx.y_freq.size() == 0) throw std::invalid_argument("quantize_onebit: y_freq missing");
  RxBlock out = rx;
  const MatrixXcd y_time = dft_block(rx.y_freq, true);
  out.r_time = quantize_signs(y_time);
  out.r_freq = dft_block(*out.r_time, false);
  return out;
}

}  // namespace blindmimo
