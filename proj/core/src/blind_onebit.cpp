#include "blindmimo/blind_onebit.hpp"

#include <cmath>
#include <stdexcept>

#include "prox_solver.hpp"

namespace blindmimo {

namespace {

// G[m] = sum over retained lags of the sin-mapped autocorrelation, i.e. the
// non-normalized forward transform that sends delta[n]*I to I at every bin.
std::vector<MatrixXcd> spectral_kernel(const QuantizedCovariance& c, int bins) {
  const int T = c.T;
  std::vector<MatrixXcd> g;
  g.reserve(bins);
  std::vector<MatrixXcd> mapped(c.T_D + 1);
  for (int l = 0; l <= c.T_D; ++l) mapped[l] = sin_halfpi(c.lags[l]);
  for (int b = 0; b < bins; ++b) {
    MatrixXcd gm = mapped[0];
    for (int l = 1; l <= c.T_D; ++l) {
      const double phase = -2.0 * kPi * l * b / T;
      const cxd e(std::cos(phase), std::sin(phase));
      gm += e * mapped[l] + std::conj(e) * mapped[l].adjoint();
    }
    g.push_back(std::move(gm));
  }
  return g;
}

MatrixXcd diag_scale(const MatrixXcd& g, const VectorXd& d_sqrt) {
  return d_sqrt.asDiagonal() * g * d_sqrt.asDiagonal();
}

}  // namespace

MatrixXcd QuantizedCovariance::lag(int n) const {
  if (n < 0 || n >= T) throw std::invalid_argument("QuantizedCovariance::lag: index out of range");
  if (n <= T_D) return lags[n];
  if (n >= T - T_D) return lags[T - n].adjoint();
  return MatrixXcd::Zero(lags[0].rows(), lags[0].cols());
}

QuantizedCovariance sample_quantized_autocorr(const MatrixXcd& r_time, int T_D) {
  const int T = static_cast<int>(r_time.cols());
  const int N = static_cast<int>(r_time.rows());
  if (T <= 2 * T_D) throw std::invalid_argument("sample_quantized_autocorr: window longer than block (need T > 2*T_D)");
  QuantizedCovariance c;
  c.T = T;
  c.T_D = T_D;
  c.lags.resize(T_D + 1);
  for (int l = 0; l <= T_D; ++l) {
    MatrixXcd acc = MatrixXcd::Zero(N, N);
    for (int n = 0; n < T; ++n) acc.noalias() += r_time.col((n + l) % T) * r_time.col(n).adjoint();
    c.lags[l] = acc / static_cast<double>(T);
  }
  return c;
}

MatrixXcd arcsine_forward(const MatrixXcd& c) {
  MatrixXcd out(c.rows(), c.cols());
  const double tol = 1e-9;
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      double re = c(i, j).real();
      double im = c(i, j).imag();
      if (std::abs(re) > 1.0 + tol || std::abs(im) > 1.0 + tol)
        throw std::invalid_argument("arcsine_forward: entry outside [-1,1]; input must be unit-diagonal normalized");
      re = std::clamp(re, -1.0, 1.0);
      im = std::clamp(im, -1.0, 1.0);
      out(i, j) = (2.0 / kPi) * cxd(std::asin(re), std::asin(im));
    }
  return out;
}

MatrixXcd sin_halfpi(const MatrixXcd& c) {
  MatrixXcd out(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      out(i, j) = cxd(std::sin(kPi / 2.0 * c(i, j).real()), std::sin(kPi / 2.0 * c(i, j).imag()));
  return out;
}

VectorXd estep_scale_diag(const MatrixXcd& S_prev, const Dictionary& dict, double rho) {
  if (S_prev.rows() != dict.P()) throw std::invalid_argument("estep_scale_diag: S rows must equal N*(T_D+1)");
  VectorXd d = VectorXd::Zero(dict.N());
  if (dict.single_F()) {
    d = rho * (dict.F(0) * S_prev).rowwise().squaredNorm();
  } else {
    for (int m = 0; m < dict.T; ++m) d += rho * (dict.F(m) * S_prev).rowwise().squaredNorm();
    d /= static_cast<double>(dict.T);
  }
  return d.array() + 1.0;
}

std::vector<MatrixXcd> estep_cov(const QuantizedCovariance& c_r, const MatrixXcd& S_prev,
                                 const Dictionary& dict, double rho) {
  for (const auto& l : c_r.lags)
    if (!l.allFinite()) throw std::invalid_argument("estep_cov: non-finite autocorrelation");
  if ((c_r.lags[0] - c_r.lags[0].adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("estep_cov: lag-0 autocorrelation must be Hermitian");
  const VectorXd d_sqrt = estep_scale_diag(S_prev, dict, rho).cwiseSqrt();
  std::vector<MatrixXcd> phi = spectral_kernel(c_r, dict.T);
  for (auto& p : phi) p = diag_scale(p, d_sqrt);
  return phi;
}

double em_surrogate(const MatrixXcd& S, const std::vector<MatrixXcd>& phi_y,
                    const Dictionary& dict, double rho) {
  if (phi_y.empty()) throw std::invalid_argument("em_surrogate: empty covariance sequence");
  const bool shared_phi = phi_y.size() == 1;
  if (!shared_phi && static_cast<int>(phi_y.size()) != dict.T)
    throw std::invalid_argument("em_surrogate: covariance sequence size mismatch");
  const int Kc = static_cast<int>(S.cols());
  const MatrixXcd id = MatrixXcd::Identity(Kc, Kc);

  if (dict.single_F() && shared_phi) {
    const MatrixXcd P1 = dict.F(0) * S;
    const MatrixXcd W = id + rho * (P1.adjoint() * P1);
    Eigen::LLT<MatrixXcd> llt(W);
    const MatrixXcd inner = P1.adjoint() * phi_y[0] * P1;
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < Kc; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
    const double tr_term = phi_y[0].trace().real() - rho * llt.solve(inner).trace().real();
    return -dict.T * (tr_term + logdet);
  }

  double value = 0.0;
  for (int m = 0; m < dict.T; ++m) {
    const MatrixXcd& phi = phi_y[shared_phi ? 0 : m];
    const MatrixXcd P1 = dict.F(m) * S;
    const MatrixXcd W = id + rho * (P1.adjoint() * P1);
    Eigen::LLT<MatrixXcd> llt(W);
    const MatrixXcd inner = P1.adjoint() * phi * P1;
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < Kc; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
    value -= phi.trace().real() - rho * llt.solve(inner).trace().real() + logdet;
  }
  return value;
}

MatrixXcd em_gradient(const MatrixXcd& S_prev, const std::vector<MatrixXcd>& phi_y,
                      const Dictionary& dict, double rho) {
  if (phi_y.empty()) throw std::invalid_argument("em_gradient: empty covariance sequence");
  const bool shared_phi = phi_y.size() == 1;
  if (!shared_phi && static_cast<int>(phi_y.size()) != dict.T)
    throw std::invalid_argument("em_gradient: covariance sequence size mismatch");
  const int Kc = static_cast<int>(S_prev.cols());
  const MatrixXcd id = MatrixXcd::Identity(Kc, Kc);

  auto per_bin = [&](const MatrixXcd& F, const MatrixXcd& phi) -> MatrixXcd {
    const MatrixXcd P1 = F * S_prev;
    const MatrixXcd W = id + rho * (P1.adjoint() * P1);
    const MatrixXcd Winv = Eigen::LLT<MatrixXcd>(W).solve(id);
    const MatrixXcd P4 = P1 * Winv;                // Q^{-1} F S
    const MatrixXcd t = phi * P4;                  // N x Kc
    const MatrixXcd u = t - rho * (P1 * (Winv * (P1.adjoint() * t)));  // Q^{-1} Phi Q^{-1} F S
    return rho * (F.adjoint() * (P4 - u));
  };

  if (dict.single_F() && shared_phi)
    return static_cast<double>(dict.T) * per_bin(dict.F(0), phi_y[0]);

  MatrixXcd delta = MatrixXcd::Zero(dict.P(), Kc);
  for (int m = 0; m < dict.T; ++m) delta += per_bin(dict.F(m), phi_y[shared_phi ? 0 : m]);
  return delta;
}

SparseEstimate onebit_subspace_init(const RxBlock& rx, const Dictionary& dict, double rho, int K) {
  if (!rx.r_freq) throw std::invalid_argument("onebit_subspace_init: one-bit observations missing");
  if (rho <= 0.0) throw std::invalid_argument("onebit_subspace_init: rho must be > 0");
  return detail::subspace_core(*rx.r_freq, dict, K, std::sqrt(kPi / (2.0 * dict.T * rho)));
}

SparseEstimate estimate_blind_onebit(const RxBlock& rx, const Dictionary& dict, double rho,
                                     const SolverConfig& config) {
  config.validate();
  if (!rx.r_time || !rx.r_freq)
    throw std::invalid_argument("estimate_blind_onebit: one-bit observations missing");

  const QuantizedCovariance c = sample_quantized_autocorr(*rx.r_time, dict.T_D);
  SparseEstimate init = onebit_subspace_init(rx, dict, rho, rx.dims.K);

  // The sin-mapped kernel does not depend on S, so it is computed once; the
  // E-step per iteration only refreshes the diagonal variance profile.
  const bool flat = dict.single_F() && dict.T_D == 0;
  struct KernelState {
    std::vector<MatrixXcd> g;
    std::vector<MatrixXcd> phi;
  } state;
  state.g = flat ? std::vector<MatrixXcd>{sin_halfpi(c.lags[0])} : spectral_kernel(c, dict.T);
  state.phi.resize(state.g.size());

  detail::ProxProblem prob;
  prob.refresh = [&](const MatrixXcd& s) {
    const VectorXd d_sqrt = estep_scale_diag(s, dict, rho).cwiseSqrt();
    for (size_t i = 0; i < state.g.size(); ++i)
      state.phi[i] = d_sqrt.asDiagonal() * state.g[i] * d_sqrt.asDiagonal();
  };
  prob.objective = [&](const MatrixXcd& s) { return em_surrogate(s, state.phi, dict, rho); };
  prob.descent = [&](const MatrixXcd& s) { return em_gradient(s, state.phi, dict, rho); };

  SparseEstimate est = detail::run_prox_loop(init.S_hat, config, prob);
  est.rank_deficient = init.rank_deficient;
  prob.refresh(est.S_hat);
  est.kkt_residual =
      kkt_residual_from_gradient(est.S_hat, em_gradient(est.S_hat, state.phi, dict, rho), config.lambda);
  return est;
}

double onebit_prob_firstorder(const VectorXcd& r, const MatrixXcd& H, double rho) {
  const int N = static_cast<int>(r.size());
  const double quad = (H.adjoint() * r).squaredNorm() - H.squaredNorm();
  return std::pow(4.0, -N) * (1.0 + rho * (2.0 / kPi) * quad);
}

double onebit_prob_firstorder_nondiag(const VectorXcd& r, const MatrixXcd& H, double rho) {
  const int N = static_cast<int>(r.size());
  MatrixXcd hh = H * H.adjoint();
  hh.diagonal().setZero();
  const double quad = (r.adjoint() * hh * r).value().real();
  return std::pow(4.0, -N) * (1.0 + rho * (2.0 / kPi) * quad);
}

std::pair<cxd, cxd> sign_enumeration_identity(const MatrixXcd& D, const MatrixXcd& B) {
  const int N = static_cast<int>(D.rows());
  if (D.cols() != N || B.rows() != N || B.cols() != N)
    throw std::invalid_argument("sign_enumeration_identity: D and B must be square and same size");
  if (N > 8) throw std::invalid_argument("sign_enumeration_identity: N too large for enumeration (N <= 8)");

  const double q = 0.70710678118654752440;
  const cxd table[4] = {{q, q}, {q, -q}, {-q, q}, {-q, -q}};
  const std::uint64_t total = 1ULL << (2 * N);
  cxd lhs(0.0, 0.0);
  VectorXcd r(N);
  for (std::uint64_t g = 0; g < total; ++g) {
    for (int i = 0; i < N; ++i) r(i) = table[(g >> (2 * i)) & 3];
    const cxd qd = (r.adjoint() * D * r).value();
    const cxd qb = (r.adjoint() * B * r).value();
    lhs += qd * qb;
  }
  lhs /= static_cast<double>(total);

  MatrixXcd nd = B;
  nd.diagonal().setZero();
  const cxd rhs = (D * nd).trace() + D.trace() * B.trace();
  return {lhs, rhs};
}

}  // namespace blindmimo
