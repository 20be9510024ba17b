#pragma once

#include <vector>

#include "blindmimo/dictionary.hpp"
#include "blindmimo/rng.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// One multipath component: arrival angles, delay in seconds, complex gain.
struct PathComponent {
  double theta = 0.0;
  double phi = 0.0;
  double delay_s = 0.0;
  cxd gain{0.0, 0.0};
};

/// Ground truth is the path list; `coeffs` is the P x K coefficient matrix on
/// the dictionary grid. For on-grid draws the columns are exactly L-sparse
/// and reproduce the channel exactly; for off-grid draws `coeffs` is the
/// least-squares projection onto the dictionary and serves diagnostics only
/// (metrics are always evaluated against the exact transfer function).
struct ChannelRealization {
  std::vector<std::vector<PathComponent>> paths;  // [user][path]
  MatrixXcd coeffs;
  bool on_grid = false;

  int K() const { return static_cast<int>(paths.size()); }
};

/// Draws K users with L paths each. Arrival angles are uniform on (0, pi),
/// delays uniform on [0, T_D/B], gains CN(0,1). With on_grid set, angles snap
/// to the dictionary grid and delays to integer symbols.
ChannelRealization draw_channel(const Dictionary& dict, int K, int L, bool on_grid, Rng& rng);

/// H[m] = F_m * S for every frequency bin.
std::vector<MatrixXcd> channel_transfer(const MatrixXcd& S, const Dictionary& dict);

/// Exact transfer function h_k(w_m) = sum_l gain * a(theta,phi,w_m) * e^{-j w_m t},
/// evaluated from the continuous path parameters without grid projection.
std::vector<MatrixXcd> exact_transfer(const ChannelRealization& chan, const Dictionary& dict);

/// Least-squares projection of a transfer-function sequence onto the
/// dictionary: argmin_S sum_m ||F_m S - H[m]||_F^2.
MatrixXcd project_to_grid(const std::vector<MatrixXcd>& H, const Dictionary& dict);

}  // namespace blindmimo
