#include "blindmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace blindmimo {

namespace {

// Nearest grid index in wrapped spatial-frequency distance.
int snap_to_grid(double u, const VectorXd& grid) {
  int best = 0;
  double best_dist = 1e300;
  for (int i = 0; i < grid.size(); ++i) {
    double d = std::abs(u - grid(i));
    d = std::min(d, 2.0 - d);  // period-2 wraparound
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

ChannelRealization draw_channel(const Dictionary& dict, int K, int L, bool on_grid, Rng& rng) {
  if (K < 1 || L < 1) throw std::invalid_argument("draw_channel: K and L must be >= 1");
  const ArrayGeometry& geom = dict.geometry;
  const double B = geom.bandwidth_hz;
  const double max_delay = (B > 0.0) ? dict.T_D / B : 0.0;
  const VectorXd u1_grid = spatial_frequency_grid(geom.n1);
  const VectorXd u2_grid = spatial_frequency_grid(geom.n2);

  ChannelRealization chan;
  chan.on_grid = on_grid;
  chan.paths.resize(K);
  chan.coeffs = MatrixXcd::Zero(dict.P(), K);

  for (int k = 0; k < K; ++k) {
    chan.paths[k].reserve(L);
    for (int l = 0; l < L; ++l) {
      PathComponent p;
      p.theta = kPi * rng.uniform();
      p.phi = (geom.kind == ArrayKind::UPA) ? 2.0 * kPi * rng.uniform() : kPi / 2.0;
      p.delay_s = max_delay * rng.uniform();
      p.gain = rng.cgaussian();

      if (on_grid) {
        int d = 0;
        if (B > 0.0) {
          d = static_cast<int>(std::lround(p.delay_s * B));
          d = std::min(std::max(d, 0), dict.T_D);
          p.delay_s = d / B;
        }
        const double u1 = (geom.kind == ArrayKind::ULA) ? std::sin(p.theta)
                                                        : std::sin(p.theta) * std::sin(p.phi);
        const int i1 = snap_to_grid(u1, u1_grid);
        int i2 = 0;
        if (geom.kind == ArrayKind::UPA) {
          i2 = snap_to_grid(std::sin(p.theta) * std::cos(p.phi), u2_grid);
          // keep the stored angles consistent with the snapped atom
          const double su1 = u1_grid(i1), su2 = u2_grid(i2);
          const double st = std::min(1.0, std::hypot(su1, su2));
          p.theta = std::asin(st);
          p.phi = std::atan2(su1, su2);
        } else {
          p.theta = std::asin(u1_grid(i1));
        }
        chan.coeffs(d * geom.N() + i1 * geom.n2 + i2, k) += p.gain;
      }
      chan.paths[k].push_back(p);
    }
  }

  if (!on_grid) chan.coeffs = project_to_grid(exact_transfer(chan, dict), dict);
  return chan;
}

std::vector<MatrixXcd> channel_transfer(const MatrixXcd& S, const Dictionary& dict) {
  if (S.rows() != dict.P()) throw std::invalid_argument("channel_transfer: S rows must equal N*(T_D+1)");
  std::vector<MatrixXcd> H(dict.T);
  for (int m = 0; m < dict.T; ++m) H[m] = dict.F(m) * S;
  return H;
}

std::vector<MatrixXcd> exact_transfer(const ChannelRealization& chan, const Dictionary& dict) {
  const int K = chan.K();
  std::vector<MatrixXcd> H(dict.T, MatrixXcd::Zero(dict.N(), K));
  for (int m = 0; m < dict.T; ++m) {
    const double w = dict.omega(m);
    for (int k = 0; k < K; ++k) {
      VectorXcd h = VectorXcd::Zero(dict.N());
      for (const PathComponent& p : chan.paths[k]) {
        const double phase = -w * p.delay_s;
        h += p.gain * cxd(std::cos(phase), std::sin(phase)) *
             steering_vector(dict.geometry, p.theta, p.phi, w);
      }
      H[m].col(k) = h;
    }
  }
  return H;
}

MatrixXcd project_to_grid(const std::vector<MatrixXcd>& H, const Dictionary& dict) {
  if (static_cast<int>(H.size()) != dict.T) throw std::invalid_argument("project_to_grid: H size mismatch");
  const int P = dict.P();
  const int K = static_cast<int>(H[0].cols());
  MatrixXcd gram = MatrixXcd::Zero(P, P);
  MatrixXcd rhs = MatrixXcd::Zero(P, K);
  if (dict.single_F()) {
    const MatrixXcd& F = dict.F(0);
    MatrixXcd sum = MatrixXcd::Zero(dict.N(), K);
    for (const auto& Hm : H) sum += Hm;
    gram = static_cast<double>(dict.T) * (F.adjoint() * F);
    rhs = F.adjoint() * sum;
  } else {
    for (int m = 0; m < dict.T; ++m) {
      const MatrixXcd& F = dict.F(m);
      gram += F.adjoint() * F;
      rhs += F.adjoint() * H[m];
    }
  }
  return gram.ldlt().solve(rhs);
}

}  // namespace blindmimo
