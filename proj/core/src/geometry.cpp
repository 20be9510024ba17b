#include "blindmimo/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace blindmimo {

void ArrayGeometry::validate() const {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("geometry: antenna counts must be >= 1");
  if (kind == ArrayKind::ULA && n2 != 1) throw std::invalid_argument("geometry: ULA requires n2 == 1");
  if (spacing <= 0.0) throw std::invalid_argument("geometry: spacing must be > 0");
  if (carrier_hz <= 0.0) throw std::invalid_argument("geometry: carrier frequency must be > 0");
  if (bandwidth_hz < 0.0 || bandwidth_hz > carrier_hz)
    throw std::invalid_argument("geometry: bandwidth must lie in [0, carrier]");
}

VectorXcd steering_atom(const ArrayGeometry& geom, double u1, double u2, double omega) {
  geom.validate();
  const int n = geom.N();
  const double squint = 1.0 + omega / (2.0 * kPi * geom.carrier_hz);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  VectorXcd a(n);
  for (int a1 = 0; a1 < geom.n1; ++a1) {
    for (int a2 = 0; a2 < geom.n2; ++a2) {
      const double phase = -2.0 * kPi * geom.spacing * (a1 * u1 + a2 * u2) * squint;
      a(a1 * geom.n2 + a2) = scale * cxd(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

VectorXcd steering_vector(const ArrayGeometry& geom, double theta, double phi, double omega) {
  if (geom.kind == ArrayKind::ULA) {
    // phi fixed so the exponent is a1*sin(theta)
    return steering_atom(geom, std::sin(theta), 0.0, omega);
  }
  return steering_atom(geom, std::sin(theta) * std::sin(phi), std::sin(theta) * std::cos(phi), omega);
}

VectorXd frequency_grid(int T, double bandwidth_hz) {
  if (T < 1) throw std::invalid_argument("frequency_grid: T must be >= 1");
  VectorXd omega(T);
  for (int m = 0; m < T; ++m) {
    const double frac = static_cast<double>(m) / T;
    omega(m) = 2.0 * kPi * bandwidth_hz * (frac - std::floor(frac + 0.5));
  }
  return omega;
}

VectorXd spatial_frequency_grid(int n) {
  VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    double v = 2.0 * static_cast<double>(i) / n;
    if (v >= 1.0) v -= 2.0;
    u(i) = v;
  }
  return u;
}

}  // namespace blindmimo
