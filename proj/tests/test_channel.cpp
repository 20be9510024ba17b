#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blindmimo/channel.hpp"
#include "blindmimo/dictionary.hpp"
#include "blindmimo/rng.hpp"

using namespace blindmimo;

namespace {
ArrayGeometry ula(int n, double b, double fc = 60.5e9) {
  ArrayGeometry g;
  g.n1 = n;
  g.bandwidth_hz = b;
  g.carrier_hz = fc;
  return g;
}
}  // namespace

TEST_CASE("on-grid single path lands on one dictionary atom") {
  const Dictionary dict = build_dictionary(ula(8, 0.0), 32, 0);
  Rng rng(3);
  const ChannelRealization chan = draw_channel(dict, 1, 1, true, rng);
  int nonzeros = 0;
  for (int i = 0; i < dict.P(); ++i)
    if (chan.coeffs(i, 0) != cxd(0.0, 0.0)) ++nonzeros;
  CHECK(nonzeros == 1);
  CHECK(chan.coeffs.cwiseAbs().maxCoeff() > 0.0);
  CHECK(chan.paths[0].size() == 1);
}

TEST_CASE("three paths per user at K = 2") {
  const Dictionary dict = build_dictionary(ula(16, 0.0), 64, 0);
  Rng rng(11);
  const ChannelRealization chan = draw_channel(dict, 2, 3, true, rng);
  REQUIRE(chan.K() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(chan.paths[k].size() == 3);
    int nonzeros = 0;
    for (int i = 0; i < dict.P(); ++i)
      if (chan.coeffs(i, k) != cxd(0.0, 0.0)) ++nonzeros;
    CHECK(nonzeros <= 3);  // grid collisions can merge atoms
    CHECK(nonzeros >= 1);
  }
}

TEST_CASE("fixed seed reproduces the realization bit for bit") {
  const Dictionary dict = build_dictionary(ula(8, 7e9), 16, 2);
  Rng a(42), b(42);
  const ChannelRealization ca = draw_channel(dict, 2, 3, false, a);
  const ChannelRealization cb = draw_channel(dict, 2, 3, false, b);
  CHECK((ca.coeffs - cb.coeffs).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 2; ++k)
    for (size_t l = 0; l < 3; ++l) {
      CHECK(ca.paths[k][l].theta == cb.paths[k][l].theta);
      CHECK(ca.paths[k][l].delay_s == cb.paths[k][l].delay_s);
      CHECK(ca.paths[k][l].gain == cb.paths[k][l].gain);
    }
}

TEST_CASE("draw statistics: angles in (0, pi), delays within the spread") {
  const Dictionary dict = build_dictionary(ula(8, 7e9), 32, 4);
  Rng rng(5);
  const ChannelRealization chan = draw_channel(dict, 4, 8, false, rng);
  for (const auto& user : chan.paths)
    for (const auto& p : user) {
      CHECK(p.theta >= 0.0);
      CHECK(p.theta < kPi);
      CHECK(p.delay_s >= 0.0);
      CHECK(p.delay_s <= 4.0 / 7e9);
    }
}

TEST_CASE("channel transfer of zero coefficients is zero") {
  const Dictionary dict = build_dictionary(ula(4, 0.0), 8, 0);
  const auto H = channel_transfer(MatrixXcd::Zero(dict.P(), 2), dict);
  for (const auto& h : H) CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit coefficient reproduces the dictionary column at every bin") {
  const Dictionary dict = build_dictionary(ula(8, 0.0), 16, 0);
  MatrixXcd s = MatrixXcd::Zero(dict.P(), 1);
  s(5, 0) = cxd(1.0, 0.0);
  const auto H = channel_transfer(s, dict);
  for (int m = 0; m < dict.T; ++m)
    CHECK((H[m].col(0) - dict.F(m).col(5)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exact transfer equals an independent evaluation of the path sum") {
  const ArrayGeometry g = ula(8, 7e9);
  const Dictionary dict = build_dictionary(g, 16, 3);
  Rng rng(17);
  const ChannelRealization chan = draw_channel(dict, 1, 1, false, rng);
  const auto H = exact_transfer(chan, dict);
  const PathComponent& p = chan.paths[0][0];
  for (int m = 0; m < dict.T; ++m) {
    const double w = dict.omega(m);
    const double squint = 1.0 + w / (2.0 * kPi * g.carrier_hz);
    for (int n = 0; n < 8; ++n) {
      // independent scalar evaluation: gain * e^{-j 2 pi d n sin(theta) squint} / sqrt(N) * e^{-j w t}
      const cxd steer = std::exp(cxd(0.0, -2.0 * kPi * 0.5 * n * std::sin(p.theta) * squint)) /
                        std::sqrt(8.0);
      const cxd expected = p.gain * steer * std::exp(cxd(0.0, -w * p.delay_s));
      CHECK(std::abs(H[m](n, 0) - expected) < 1e-13);
    }
  }
}

TEST_CASE("on-grid channels: grid transfer equals the exact transfer") {
  const Dictionary dict = build_dictionary(ula(8, 7e9), 16, 2);  // wideband, per-bin atoms
  Rng rng(23);
  const ChannelRealization chan = draw_channel(dict, 2, 3, true, rng);
  const auto Hg = channel_transfer(chan.coeffs, dict);
  const auto He = exact_transfer(chan, dict);
  for (int m = 0; m < dict.T; ++m)
    CHECK((Hg[m] - He[m]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("off-grid projection reproduces the transfer in the least-squares sense") {
  const Dictionary dict = build_dictionary(ula(8, 0.0), 32, 0);
  Rng rng(29);
  const ChannelRealization chan = draw_channel(dict, 2, 2, false, rng);
  const auto He = exact_transfer(chan, dict);
  // narrowband square unitary dictionary: projection is exact reconstruction
  const auto Hp = channel_transfer(chan.coeffs, dict);
  for (int m = 0; m < dict.T; ++m)
    CHECK((Hp[m] - He[m]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transfer rejects mismatched coefficient rows") {
  const Dictionary dict = build_dictionary(ula(4, 0.0), 8, 0);
  CHECK_THROWS_AS(channel_transfer(MatrixXcd::Zero(5, 1), dict), std::invalid_argument);
}
