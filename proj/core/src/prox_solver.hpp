#pragma once

#include <cmath>
#include <functional>

#include "blindmimo/blind_ideal.hpp"
#include "blindmimo/dictionary.hpp"

namespace blindmimo::detail {

// Shared eigen-step of the subspace initializers (defined in blind_ideal.cpp).
SparseEstimate subspace_core(const MatrixXcd& V, const Dictionary& dict, int K, double scale);

// One maximization problem for the shared gradient/threshold loop. refresh,
// when set, recomputes iteration-level state anchored at the current iterate
// (the EM E-step); it runs at the start of every iteration, so the objective
// seen by the backtracking test is always anchored at the iterate being
// stepped from.
struct ProxProblem {
  std::function<void(const MatrixXcd&)> refresh;
  std::function<double(const MatrixXcd&)> objective;   // smooth part L(S)
  std::function<MatrixXcd(const MatrixXcd&)> descent;  // -dL/dS*
};

inline double l1_norm(const MatrixXcd& s) { return s.cwiseAbs().sum(); }

// Gradient step followed by soft-thresholding with tau = mu*lambda/2, with a
// backtracking line search on the regularized objective: each iteration the
// step starts from the previous accepted step grown by one 1/beta factor
// (capped at mu0) and shrinks by beta until the step strictly improves. A
// candidate identical to the iterate is an exact fixed point of the update
// map and terminates the solver; running out of step floor reports
// non-convergence instead of failing. The relative-objective-change stop
// requires two consecutive small gains, so a single grazing line-search
// accept cannot end the run early.
inline SparseEstimate run_prox_loop(MatrixXcd s0, const SolverConfig& cfg, const ProxProblem& prob) {
  cfg.validate();
  const bool dynamic_objective = static_cast<bool>(prob.refresh);

  SparseEstimate est;
  MatrixXcd s = std::move(s0);

  if (dynamic_objective) prob.refresh(s);
  double r_anchor = prob.objective(s) - cfg.lambda * l1_norm(s);
  est.objective_trace.push_back(r_anchor);

  double mu_accepted = cfg.mu0;
  int small_gain_streak = 0;
  while (est.iterations < cfg.max_iters) {
    if (dynamic_objective) {
      prob.refresh(s);
      r_anchor = prob.objective(s) - cfg.lambda * l1_norm(s);
    }
    const MatrixXcd delta = prob.descent(s);

    double mu = std::min(mu_accepted / cfg.beta, cfg.mu0);
    bool accepted = false;
    double r_cand = r_anchor;
    MatrixXcd cand;
    while (mu >= cfg.min_step) {
      cand = soft_threshold(s - mu * delta, mu * cfg.lambda / 2.0);
      if ((cand - s).cwiseAbs().maxCoeff() == 0.0) {  // exact fixed point
        est.converged = true;
        est.S_hat = std::move(s);
        return est;
      }
      r_cand = prob.objective(cand) - cfg.lambda * l1_norm(cand);
      if (r_cand > r_anchor) {
        accepted = true;
        break;
      }
      mu *= cfg.beta;
    }
    if (!accepted) break;  // step floor reached without improvement

    mu_accepted = mu;
    const double gain = r_cand - r_anchor;
    s = std::move(cand);
    ++est.iterations;
    est.objective_trace.push_back(r_cand);
    est.step_gains.push_back(gain);
    if (gain <= cfg.tol_rel_obj * std::max(1.0, std::abs(r_anchor))) {
      if (++small_gain_streak >= 2) {
        est.converged = true;
        break;
      }
    } else {
      small_gain_streak = 0;
    }
    r_anchor = r_cand;
  }

  est.S_hat = std::move(s);
  return est;
}

}  // namespace blindmimo::detail
