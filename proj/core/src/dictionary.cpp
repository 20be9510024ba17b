#include "blindmimo/dictionary.hpp"

#include <cmath>
#include <stdexcept>

namespace blindmimo {

namespace {

// N1*N2 atoms on the product spatial-frequency grid, in DFT column order so
// that A(0) is the unitary DFT matrix (Kronecker of the two axis DFTs for a
// UPA).
MatrixXcd angular_matrix(const ArrayGeometry& geom, double omega) {
  const int n = geom.N();
  const VectorXd u1 = spatial_frequency_grid(geom.n1);
  const VectorXd u2 = spatial_frequency_grid(geom.n2);
  MatrixXcd a(n, n);
  for (int i1 = 0; i1 < geom.n1; ++i1)
    for (int i2 = 0; i2 < geom.n2; ++i2)
      a.col(i1 * geom.n2 + i2) = steering_atom(geom, u1(i1), u2(i2), omega);
  return a;
}

MatrixXcd delay_expand(const MatrixXcd& a, double omega, double bandwidth_hz, int T_D) {
  if (T_D == 0) return a;
  const int n = static_cast<int>(a.rows());
  MatrixXcd f(n, n * (T_D + 1));
  for (int d = 0; d <= T_D; ++d) {
    const double phase = (bandwidth_hz > 0.0) ? -d * omega / bandwidth_hz : 0.0;
    f.middleCols(d * n, n) = cxd(std::cos(phase), std::sin(phase)) * a;
  }
  return f;
}

}  // namespace

Dictionary build_dictionary(const ArrayGeometry& geom, int T, int T_D) {
  geom.validate();
  if (T < 1) throw std::invalid_argument("build_dictionary: T must be >= 1");
  if (T_D < 0) throw std::invalid_argument("build_dictionary: T_D must be >= 0");
  if (T_D >= T) throw std::invalid_argument("build_dictionary: T_D must be < T (cyclic prefix)");

  Dictionary dict;
  dict.geometry = geom;
  dict.T = T;
  dict.T_D = T_D;
  dict.omega = frequency_grid(T, geom.bandwidth_hz);

  const double aperture = std::sqrt(static_cast<double>(std::max(geom.n1, geom.n2)));
  dict.frequency_flat = aperture * geom.bandwidth_hz / geom.carrier_hz < 0.1;

  if (dict.frequency_flat && T_D == 0) {
    dict.store_.push_back(angular_matrix(geom, 0.0));
    return dict;
  }

  MatrixXcd a_flat;
  if (dict.frequency_flat) a_flat = angular_matrix(geom, 0.0);
  dict.store_.reserve(T);
  for (int m = 0; m < T; ++m) {
    const MatrixXcd a = dict.frequency_flat ? a_flat : angular_matrix(geom, dict.omega(m));
    dict.store_.push_back(delay_expand(a, dict.omega(m), geom.bandwidth_hz, T_D));
  }
  return dict;
}

}  // namespace blindmimo
