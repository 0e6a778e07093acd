#pragma once

#include <cstdint>
#include <vector>

#include "nfg/oracle.hpp"

namespace nfg {

// ---------------------------------------------------------------------------
// Strongly convex synthetic quadratics: f_i(x) = (q_i/2) ||x - a_i||^2.
// L = max q_i, mu = min q_i > 0.
// ---------------------------------------------------------------------------
class QuadraticProblem final : public FiniteSumOracle {
 public:
  QuadraticProblem(std::vector<ParamVector> anchors, std::vector<double> curvatures);

  double component_loss(std::size_t i, const ParamVector& x) const override;
  void component_gradient_raw(std::size_t i, const ParamVector& x,
                              ParamVector& out) const override;

  const ParamVector& anchor(std::size_t i) const { return anchors_[i]; }
  double curvature(std::size_t i) const { return curvatures_[i]; }

  // Closed-form minimizer sum(q_i a_i) / sum(q_i) and its objective value.
  ParamVector minimizer() const;
  double optimal_value() const;

 private:
  std::vector<ParamVector> anchors_;
  std::vector<double> curvatures_;
};

// ---------------------------------------------------------------------------
// Sigmoid least squares: f_i(x) = (y_i - h_i)^2 with h_i = 1/(1+exp(-A_i.x)).
// Declared smoothness is the loose bound max_i ||A_i||^2 (sigmoid-residual
// curvature bounded by 1).
// ---------------------------------------------------------------------------
class SigmoidLsqProblem final : public FiniteSumOracle {
 public:
  SigmoidLsqProblem(std::vector<ParamVector> rows, std::vector<double> targets);

  double component_loss(std::size_t i, const ParamVector& x) const override;
  void component_gradient_raw(std::size_t i, const ParamVector& x,
                              ParamVector& out) const override;

  const ParamVector& row(std::size_t i) const { return rows_[i]; }
  double target(std::size_t i) const { return targets_[i]; }

 private:
  std::vector<ParamVector> rows_;
  std::vector<double> targets_;
};

// ---------------------------------------------------------------------------
// Zero-chain hard instance. Building blocks of l(x) = sum_j l_j(x):
//   psi(z) = 0 for z <= 1/2, exp(1 - 1/(2z-1)^2) for z > 1/2
//   phi(z) = sqrt(e) * integral_{-inf}^{z} exp(-t^2/2) dt
//   l_1(x) = -psi(1) phi([x]_1)
//   l_j(x) = psi(-[x]_{j-1}) phi(-[x]_j) - psi([x]_{j-1}) phi([x]_j), j >= 2
// A gradient evaluation can activate at most one new coordinate:
// prog(grad l(x)) <= prog(x) + 1.
// ---------------------------------------------------------------------------

double psi(double z);
double psi_prime(double z);
double phi(double z);        // via the error function, <= 1e-10 relative
double phi_prime(double z);  // sqrt(e) * exp(-z^2/2)

// Largest 1-based index of a nonzero coordinate; 0 for the zero vector.
// Exact zero comparison: the chain structure produces exact zeros.
std::size_t prog(const ParamVector& x);

double zero_chain_l_value(const ParamVector& x);
ParamVector zero_chain_l_gradient(const ParamVector& x);
double zero_chain_lj_value(std::size_t j, const ParamVector& x);  // 1-based j
// Adds grad l_j(x) into acc.
void zero_chain_lj_gradient_accumulate(std::size_t j, const ParamVector& x,
                                       ParamVector& acc);

// Finite-sum split f_i(x) = (L C^2 / L0) * sum_{j == i (mod n)} l_j(x / C)
// over 1-based chain terms i in {1..n}; the 0-based internal component k owns
// the 1-based coordinates j with j mod n == (k+1) mod n.
class ZeroChainProblem final : public FiniteSumOracle {
 public:
  static constexpr double kChainSmoothness = 152.0;  // L_0
  static constexpr double kChainGradBound = 23.0;    // G_0

  ZeroChainProblem(std::size_t d, std::size_t n, double target_smoothness = kChainSmoothness,
                   double scale = 1.0);

  double component_loss(std::size_t i, const ParamVector& x) const override;
  void component_gradient_raw(std::size_t i, const ParamVector& x,
                              ParamVector& out) const override;

  double scale() const { return scale_; }
  // 1-based coordinate blocks owned by internal component i.
  const std::vector<std::size_t>& block(std::size_t i) const { return blocks_[i]; }

 private:
  double scale_;
  double outer_factor_;  // L C^2 / L0
  std::vector<std::vector<std::size_t>> blocks_;
};

}  // namespace nfg
