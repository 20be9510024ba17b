#pragma once

#include <optional>
#include <vector>

#include "blindmimo/rng.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

enum class SymbolDistribution { Gaussian, QPSK };

/// Transmitted block in the DFT domain, one column per frequency bin.
struct SymbolBlock {
  MatrixXcd x_freq;  // K x T
  SymbolDistribution distribution = SymbolDistribution::Gaussian;
  double rho = 1.0;  // per-symbol variance (linear SNR)
};

struct BlockDims {
  int N = 0, K = 0, T = 0, T_D = 0;
};

/// One coherence block of receiver observations. y_freq holds the
/// unquantized DFT-domain vectors; after one-bit quantization r_time holds
/// the sign observations (entries in {+-1/sqrt2 +- j/sqrt2}) and r_freq their
/// unitary DFT.
struct RxBlock {
  MatrixXcd y_freq;  // N x T
  std::optional<MatrixXcd> r_time;
  std::optional<MatrixXcd> r_freq;
  double rho = 1.0;
  BlockDims dims;

  bool onebit() const { return r_freq.has_value(); }
};

/// Unitary DFT along the column index of a (rows x T) block; round trip with
/// the inverse is the identity and Parseval holds exactly up to rounding.
MatrixXcd dft_block(const MatrixXcd& x, bool inverse);

/// I.i.d. symbols with per-entry variance rho. Gaussian symbols are drawn in
/// the DFT domain directly; QPSK symbols are drawn in the time domain (constant
/// modulus sqrt(rho)) and transformed.
SymbolBlock draw_symbols(int K, int T, double rho, SymbolDistribution dist, Rng& rng);

/// y[m] = H[m] x[m] + noise_amp * z[m], z[m] i.i.d. CN(0, I). noise_amp is a
/// test hook; production use leaves it at 1.
RxBlock simulate_rx(const std::vector<MatrixXcd>& H, const SymbolBlock& symbols, Rng& rng,
                    double noise_amp = 1.0, int T_D = 0);

/// Elementwise one-bit quantizer (sign of real and imaginary parts, scaled to
/// unit modulus). sign(0) := +1.
MatrixXcd quantize_signs(const MatrixXcd& x);

/// Fills the one-bit fields: r_time = quantize_signs(idft(y_freq)),
/// r_freq = dft(r_time). Throws if y_freq is empty.
RxBlock quantize_onebit(const RxBlock& rx);

}  // namespace blindmimo
