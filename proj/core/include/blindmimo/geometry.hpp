#pragma once

#include "blindmimo/types.hpp"

namespace blindmimo {

enum class ArrayKind { ULA, UPA };

/// Receive array description. Spacing is in carrier wavelengths.
struct ArrayGeometry {
  ArrayKind kind = ArrayKind::ULA;
  int n1 = 1;  ///< antenna count along dimension 1
  int n2 = 1;  ///< antenna count along dimension 2 (1 for ULA)
  double spacing = 0.5;
  double carrier_hz = 60.5e9;
  double bandwidth_hz = 0.0;

  int N() const { return n1 * n2; }
  /// Throws std::invalid_argument on an inconsistent geometry.
  void validate() const;
};

/// Broadband steering vector of length N for arrival angles (theta, phi) at
/// baseband angular frequency omega (rad/s). The phase of element (a1, a2) is
///   -2*pi*d*sin(theta)*(a1*sin(phi) + a2*cos(phi)) * (1 + omega/(2*pi*fc)),
/// the last factor being the beam-squint correction across the band. For a
/// ULA the exponent reduces to the conventional a1*sin(theta) form and phi is
/// ignored. Entries are scaled by 1/sqrt(N), so the 2-norm is always 1.
VectorXcd steering_vector(const ArrayGeometry& geom, double theta, double phi, double omega);

/// Dictionary atom addressed by spatial frequencies u1 = sin(theta)*sin(phi),
/// u2 = sin(theta)*cos(phi) instead of physical angles. At omega = 0 the atoms
/// on the grid u = 2i/N (wrapped to [-1,1)) are exactly the unitary DFT
/// columns.
VectorXcd steering_atom(const ArrayGeometry& geom, double u1, double u2, double omega);

/// DFT bin angular frequencies (rad/s) for a block of length T over bandwidth
/// B (Hz): omega_m = 2*pi*B*(m/T - floor(m/T + 1/2)), all in [-pi*B, pi*B).
VectorXd frequency_grid(int T, double bandwidth_hz);

/// Spatial-frequency grid 2i/N wrapped to [-1, 1), in DFT column order.
VectorXd spatial_frequency_grid(int n);

}  // namespace blindmimo
