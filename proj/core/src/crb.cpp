#include "blindmimo/crb.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace blindmimo {

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

const MatrixXcd& bin(const std::vector<MatrixXcd>& H, int m) {
  return H[H.size() == 1 ? 0 : static_cast<size_t>(m)];
}

void check_channel(const std::vector<MatrixXcd>& H, const Dictionary& dict) {
  if (H.empty()) throw std::invalid_argument("fisher: empty channel");
  if (H.size() != 1 && static_cast<int>(H.size()) != dict.T)
    throw std::invalid_argument("fisher: channel sequence length must be 1 or T");
  if (H[0].rows() != dict.N()) throw std::invalid_argument("fisher: channel rows must equal N");
}

}  // namespace

std::vector<int> support_indices(const MatrixXcd& S) {
  std::vector<int> idx;
  const int P = static_cast<int>(S.rows());
  for (int k = 0; k < S.cols(); ++k)
    for (int i = 0; i < P; ++i)
      if (S(i, k) != cxd(0.0, 0.0)) idx.push_back(k * P + i);
  return idx;
}

FisherMatrix fisher_ideal(const std::vector<MatrixXcd>& H, const Dictionary& dict, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("fisher_ideal: rho must be > 0");
  check_channel(H, dict);
  const int K = static_cast<int>(H[0].cols());
  const int P = dict.P();
  const MatrixXcd idn = MatrixXcd::Identity(dict.N(), dict.N());

  FisherMatrix out;
  out.kind = FisherKind::IdealExact;
  out.J = MatrixXcd::Zero(K * P, K * P);
  const bool collapsible = dict.single_F() && H.size() == 1;
  const int loop = collapsible ? 1 : dict.T;
  for (int m = 0; m < loop; ++m) {
    const MatrixXcd& Hm = bin(H, m);
    const MatrixXcd& F = dict.F(m);
    const MatrixXcd Q = rho * (Hm * Hm.adjoint()) + idn;
    Eigen::LLT<MatrixXcd> llt(Q);
    const MatrixXcd QinvH = llt.solve(Hm);
    const MatrixXcd QinvF = llt.solve(F);
    const MatrixXcd A = Hm.adjoint() * QinvH;  // K x K
    const MatrixXcd B = F.adjoint() * QinvF;   // P x P
    out.J.noalias() += rho * rho * kron(A.transpose(), B);
  }
  if (collapsible) out.J *= static_cast<double>(dict.T);
  return out;
}

FisherMatrix fisher_ideal_lowsnr(const std::vector<MatrixXcd>& H, const Dictionary& dict, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("fisher_ideal_lowsnr: rho must be > 0");
  check_channel(H, dict);
  const int K = static_cast<int>(H[0].cols());
  const int P = dict.P();

  FisherMatrix out;
  out.kind = FisherKind::IdealLowSnr;
  out.J = MatrixXcd::Zero(K * P, K * P);
  const bool collapsible = dict.single_F() && H.size() == 1;
  const int loop = collapsible ? 1 : dict.T;
  for (int m = 0; m < loop; ++m) {
    const MatrixXcd& Hm = bin(H, m);
    const MatrixXcd& F = dict.F(m);
    out.J.noalias() += rho * rho * kron((Hm.adjoint() * Hm).transpose(), F.adjoint() * F);
  }
  if (collapsible) out.J *= static_cast<double>(dict.T);
  return out;
}

FisherMatrix fisher_onebit_flat(const MatrixXcd& H, const MatrixXcd& F, double rho, int T) {
  if (rho <= 0.0) throw std::invalid_argument("fisher_onebit_flat: rho must be > 0");
  if (H.rows() != F.rows()) throw std::invalid_argument("fisher_onebit_flat: dimension mismatch");
  const int K = static_cast<int>(H.cols());
  const int P = static_cast<int>(F.cols());
  const double scale = T * std::pow(2.0 * rho / kPi, 2);

  FisherMatrix out;
  out.kind = FisherKind::OneBitLowSnrFlat;
  out.J = scale * kron((H.adjoint() * H).transpose(), F.adjoint() * F);
  for (int k = 0; k < K; ++k)
    for (int kp = 0; kp < K; ++kp) {
      // diagonal-product correction: block (k,k') -= F^H diag(h_k .* conj(h_k')) F
      const VectorXcd d = H.col(k).cwiseProduct(H.col(kp).conjugate());
      out.J.block(k * P, kp * P, P, P).noalias() -= scale * (F.adjoint() * d.asDiagonal() * F);
    }
  return out;
}

FisherMatrix fisher_onebit_wideband(const std::vector<MatrixXcd>& H, const Dictionary& dict,
                                    double rho) {
  if (rho <= 0.0) throw std::invalid_argument("fisher_onebit_wideband: rho must be > 0");
  check_channel(H, dict);
  const int N = dict.N();
  const int T = dict.T;
  if (static_cast<long>(N) * T > 2048)
    throw std::invalid_argument("fisher_onebit_wideband: N*T exceeds the 2048 size guard");
  const int K = static_cast<int>(H[0].cols());
  const int P = dict.P();
  const double scale = std::pow(2.0 * rho / kPi, 2);

  // Per-frequency Gram sequences and the per-antenna cross profiles
  // X[k*P+i](a) = sum_m H[m](a,k) * conj(F_m(a,i)); the identity over QPSK
  // sign vectors reduces each Fisher entry to
  //   sum_m [F_m^H F_m]_{i,i'} [H^H H]_{k',k} - (1/T) sum_a X_{ki}(a) conj(X_{k'i'}(a)).
  std::vector<MatrixXcd> gram(T), hgram(T);
  for (int m = 0; m < T; ++m) {
    const MatrixXcd& F = dict.F(m);
    const MatrixXcd& Hm = bin(H, m);
    gram[m] = F.adjoint() * F;
    hgram[m] = Hm.adjoint() * Hm;
  }
  std::vector<VectorXcd> cross(static_cast<size_t>(K) * P, VectorXcd::Zero(N));
  for (int m = 0; m < T; ++m) {
    const MatrixXcd& F = dict.F(m);
    const MatrixXcd& Hm = bin(H, m);
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < P; ++i)
        cross[static_cast<size_t>(k) * P + i] += Hm.col(k).cwiseProduct(F.col(i).conjugate());
  }

  FisherMatrix out;
  out.kind = FisherKind::OneBitLowSnrWideband;
  out.J = MatrixXcd::Zero(K * P, K * P);
  for (int row = 0; row < K * P; ++row) {
    const int k = row / P, i = row % P;
    for (int col = row; col < K * P; ++col) {
      const int kp = col / P, ip = col % P;
      cxd term1(0.0, 0.0);
      for (int m = 0; m < T; ++m) term1 += gram[m](i, ip) * hgram[m](kp, k);
      const cxd term2 =
          cross[static_cast<size_t>(kp) * P + ip].dot(cross[static_cast<size_t>(k) * P + i]);
      const cxd value = scale * (term1 - term2 / static_cast<double>(T));
      out.J(row, col) = value;
      out.J(col, row) = std::conj(value);
    }
  }
  return out;
}

FisherMatrix reduce_support(const FisherMatrix& fisher, const MatrixXcd& S_true) {
  const std::vector<int> idx = support_indices(S_true);
  if (idx.empty()) throw std::invalid_argument("reduce_support: empty support");
  if (static_cast<int>(S_true.rows() * S_true.cols()) != fisher.J.rows())
    throw std::invalid_argument("reduce_support: S dimensions do not match the Fisher matrix");
  FisherMatrix out;
  out.kind = fisher.kind;
  out.support = idx;
  const int n = static_cast<int>(idx.size());
  out.J.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.J(a, b) = fisher.J(idx[a], idx[b]);
  return out;
}

std::vector<EtaCrb> eta_crb(const FisherMatrix& J_reduced, const MatrixXcd& S_pattern,
                            const std::vector<MatrixXcd>& H_true, const Dictionary& dict) {
  const std::vector<int> idx = support_indices(S_pattern);
  if (idx.empty()) throw std::invalid_argument("eta_crb: empty support pattern");
  if (!J_reduced.support.empty() && J_reduced.support != idx)
    throw std::invalid_argument("eta_crb: support pattern does not match the reduced Fisher matrix");
  const int n = static_cast<int>(idx.size());
  if (J_reduced.J.rows() != n) throw std::invalid_argument("eta_crb: Fisher size does not match support");
  const int P = static_cast<int>(S_pattern.rows());
  const int K = static_cast<int>(S_pattern.cols());

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig((J_reduced.J + J_reduced.J.adjoint()) * 0.5);
  const double ev_min = eig.eigenvalues().minCoeff();
  const double ev_max = eig.eigenvalues().maxCoeff();
  const bool singular = !(ev_min > 0.0) || !(ev_max > 0.0);
  const bool ill_conditioned = !singular && ev_max / ev_min > 1e12;

  std::vector<EtaCrb> out(K);
  if (singular) {
    for (auto& e : out) e = {0.0, false};
    return out;
  }
  const MatrixXcd Jinv = eig.eigenvectors() *
                         eig.eigenvalues().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().adjoint();

  for (int k = 0; k < K; ++k) {
    // positions of user k's coefficients inside the reduced index set
    std::vector<int> pos, rows;
    for (int a = 0; a < n; ++a)
      if (idx[a] / P == k) {
        pos.push_back(a);
        rows.push_back(idx[a] % P);
      }
    double err = 0.0;
    if (!pos.empty()) {
      MatrixXcd Jsub(pos.size(), pos.size());
      for (size_t a = 0; a < pos.size(); ++a)
        for (size_t b = 0; b < pos.size(); ++b) Jsub(a, b) = Jinv(pos[a], pos[b]);
      for (int m = 0; m < dict.T; ++m) {
        const MatrixXcd& F = dict.F(m);
        MatrixXcd gram(pos.size(), pos.size());
        for (size_t a = 0; a < pos.size(); ++a)
          for (size_t b = 0; b < pos.size(); ++b) gram(a, b) = F.col(rows[a]).dot(F.col(rows[b]));
        err += (Jsub * gram).trace().real();
      }
    }
    double signal = 0.0;
    for (int m = 0; m < dict.T; ++m) signal += bin(H_true, m).col(k).squaredNorm();
    out[k].value = (signal > 0.0) ? 1.0 / std::sqrt(1.0 + err / signal) : 0.0;
    out[k].reliable = !ill_conditioned && signal > 0.0;
  }
  return out;
}

}  // namespace blindmimo
