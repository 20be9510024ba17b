#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "blindmimo/dictionary.hpp"
#include "blindmimo/geometry.hpp"
#include "blindmimo/rng.hpp"

using namespace blindmimo;

namespace {
ArrayGeometry ula(int n, double b = 0.0, double fc = 60.5e9, double d = 0.5) {
  ArrayGeometry g;
  g.kind = ArrayKind::ULA;
  g.n1 = n;
  g.n2 = 1;
  g.spacing = d;
  g.carrier_hz = fc;
  g.bandwidth_hz = b;
  return g;
}
}  // namespace

TEST_CASE("steering vector at broadside is all ones over sqrt(N)") {
  const ArrayGeometry g = ula(8, 1e9);
  for (double omega : {0.0, 1e9, -2e9}) {
    const VectorXcd a = steering_vector(g, 0.0, 1.234, omega);
    for (int n = 0; n < 8; ++n) {
      CHECK(a(n).real() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-14));
      CHECK(a(n).imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("two-element ULA endfire at omega = 0") {
  const ArrayGeometry g = ula(2);
  const VectorXcd a = steering_vector(g, kPi / 2.0, 0.0, 0.0);  // sin(theta) = 1
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(a(0) - cxd(s, 0.0)) < 1e-12);
  CHECK(std::abs(a(1) - s * std::exp(cxd(0.0, -kPi))) < 1e-12);
}

TEST_CASE("wideband phases carry the (1 + omega/(2 pi fc)) squint factor") {
  const double B = 7e9, fc = 60.5e9;
  const ArrayGeometry g = ula(4, B, fc);
  const double theta = kPi / 6.0;
  const double omega = 2.0 * kPi * B / 2.0;  // band edge
  const VectorXcd a = steering_vector(g, theta, 0.0, omega);
  for (int n = 0; n < 4; ++n) {
    // independent scalar evaluation of the exponent
    const double exponent = -2.0 * kPi * 0.5 * n * std::sin(theta) * (1.0 + omega / (2.0 * kPi * fc));
    const cxd expected = std::exp(cxd(0.0, exponent)) / 2.0;
    CHECK(std::abs(a(n) - expected) < 1e-13);
  }
}

TEST_CASE("steering vectors are unit norm for random angles and frequencies") {
  Rng rng(7);
  ArrayGeometry gu = ula(16, 7e9);
  ArrayGeometry gp;
  gp.kind = ArrayKind::UPA;
  gp.n1 = 4;
  gp.n2 = 3;
  gp.carrier_hz = 60.5e9;
  gp.bandwidth_hz = 7e9;
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = kPi * rng.uniform();
    const double phi = 2.0 * kPi * rng.uniform();
    const double omega = 2.0 * kPi * 7e9 * (rng.uniform() - 0.5);
    const ArrayGeometry& g = (trial % 2 == 0) ? gu : gp;
    CHECK(std::abs(steering_vector(g, theta, phi, omega).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("UPA steering matches the elementwise formula") {
  ArrayGeometry g;
  g.kind = ArrayKind::UPA;
  g.n1 = 3;
  g.n2 = 2;
  g.spacing = 0.5;
  g.carrier_hz = 60.5e9;
  g.bandwidth_hz = 7e9;
  const double theta = 0.7, phi = 2.1, omega = 3e9;
  const VectorXcd a = steering_vector(g, theta, phi, omega);
  const double squint = 1.0 + omega / (2.0 * kPi * g.carrier_hz);
  for (int n1 = 0; n1 < 3; ++n1)
    for (int n2 = 0; n2 < 2; ++n2) {
      const double expo =
          -2.0 * kPi * 0.5 * std::sin(theta) * (n1 * std::sin(phi) + n2 * std::cos(phi)) * squint;
      const cxd expected = std::exp(cxd(0.0, expo)) / std::sqrt(6.0);
      CHECK(std::abs(a(n1 * 2 + n2) - expected) < 1e-13);
    }
}

TEST_CASE("frequency grid matches hand-evaluated bins") {
  const VectorXd w2 = frequency_grid(2, 1.0 / (2.0 * kPi));  // B such that 2 pi B = 1
  CHECK(w2(0) == doctest::Approx(0.0));
  CHECK(w2(1) == doctest::Approx(-0.5));

  const VectorXd w4 = frequency_grid(4, 1.0);
  CHECK(w4(0) == doctest::Approx(0.0));
  CHECK(w4(1) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
  CHECK(w4(2) == doctest::Approx(-kPi).epsilon(1e-14));
  CHECK(w4(3) == doctest::Approx(-kPi / 2.0).epsilon(1e-14));
}

TEST_CASE("frequency grid stays in [-pi B, pi B) and enumerates every bin once") {
  const int T = 37;
  const double B = 3.5e9;
  const VectorXd w = frequency_grid(T, B);
  std::vector<int> seen(T, 0);
  for (int m = 0; m < T; ++m) {
    CHECK(w(m) >= -kPi * B);
    CHECK(w(m) < kPi * B);
    // map back to a bin index
    const double bin = w(m) * T / (2.0 * kPi * B);
    const int idx = static_cast<int>(std::lround(bin < 0 ? bin + T : bin));
    CHECK(idx >= 0);
    CHECK(idx < T);
    seen[idx] += 1;
  }
  for (int m = 0; m < T; ++m) CHECK(seen[m] == 1);
}

TEST_CASE("narrowband ULA dictionary is the unitary DFT matrix") {
  const Dictionary dict = build_dictionary(ula(8), 16, 0);
  CHECK(dict.single_F());
  const MatrixXcd& F = dict.F(0);
  const MatrixXcd gram = F.adjoint() * F;
  CHECK((gram - MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  for (int n = 0; n < 8; ++n)
    for (int i = 0; i < 8; ++i) {
      const cxd expected = std::exp(cxd(0.0, -2.0 * kPi * n * i / 8.0)) / std::sqrt(8.0);
      CHECK(std::abs(F(n, i) - expected) < 1e-12);
    }
}

TEST_CASE("delay taps follow the Kronecker phase-ramp structure") {
  ArrayGeometry g = ula(4, 1e9, 60.5e9);
  const Dictionary dict = build_dictionary(g, 8, 1);
  for (int m = 0; m < 8; ++m) {
    const MatrixXcd& F = dict.F(m);
    REQUIRE(F.cols() == 8);  // 2N columns for T_D = 1
    const cxd ramp = std::exp(cxd(0.0, -dict.omega(m) / g.bandwidth_hz));
    for (int n = 0; n < 4; ++n)
      CHECK((F.col(4 + n) - ramp * F.col(n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("averaged narrowband gram is the identity (discrete resolution of identity)") {
  ArrayGeometry g = ula(6, 1e6, 60.5e9);  // tiny fractional bandwidth: flat A
  const int T = 8, T_D = 2;
  const Dictionary dict = build_dictionary(g, T, T_D);
  CHECK(dict.frequency_flat);
  MatrixXcd acc = MatrixXcd::Zero(dict.P(), dict.P());
  for (int m = 0; m < T; ++m) acc += dict.F(m).adjoint() * dict.F(m);
  acc /= static_cast<double>(T);
  CHECK((acc - MatrixXcd::Identity(dict.P(), dict.P())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("wideband dictionary varies across frequency") {
  ArrayGeometry g = ula(32, 7e9, 60.5e9);
  const Dictionary dict = build_dictionary(g, 8, 0);
  CHECK_FALSE(dict.frequency_flat);
  CHECK_FALSE(dict.single_F());
  CHECK((dict.F(1) - dict.F(0)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("dictionary rejects a delay spread reaching the block length") {
  CHECK_THROWS_AS(build_dictionary(ula(4), 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_dictionary(ula(4), 8, 9), std::invalid_argument);
  CHECK_NOTHROW(build_dictionary(ula(4), 8, 7));
}
