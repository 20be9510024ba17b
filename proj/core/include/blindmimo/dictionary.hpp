#pragma once

#include <vector>

#include "blindmimo/geometry.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Delay-angle dictionary: per frequency bin m the matrix
///   F_m = [1, e^{-j*w_m/B}, ..., e^{-j*T_D*w_m/B}] (x) A(w_m),
/// where A(w) stacks N steering atoms on the spatial-frequency grid and (x)
/// is the Kronecker product over delay taps 0..T_D. Column d*N + i is the
/// atom for grid direction i at integer delay d.
///
/// When the band is narrow relative to the aperture (sqrt(N)*B/fc < 0.1) the
/// frequency dependence of A is dropped and a single frequency-flat A is
/// reused across bins; with T_D == 0 that collapses the whole dictionary to
/// one matrix, which downstream solvers exploit.
struct Dictionary {
  ArrayGeometry geometry;
  int T = 0;
  int T_D = 0;
  VectorXd omega;  ///< T angular frequencies (rad/s)
  bool frequency_flat = false;

  int N() const { return geometry.N(); }
  int P() const { return geometry.N() * (T_D + 1); }

  /// F_m; a reference into shared storage when the dictionary is flat.
  const MatrixXcd& F(int m) const { return store_[store_.size() == 1 ? 0 : static_cast<size_t>(m)]; }
  /// True when a single matrix serves all frequency bins.
  bool single_F() const { return store_.size() == 1; }

  std::vector<MatrixXcd> store_;
};

/// Builds the dictionary for a T-length block. Throws if T_D >= T (delay
/// spread must stay inside the cyclic prefix) or the geometry is invalid.
Dictionary build_dictionary(const ArrayGeometry& geom, int T, int T_D);

}  // namespace blindmimo
