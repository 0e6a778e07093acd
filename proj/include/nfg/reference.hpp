#pragma once

#include "nfg/optimizers.hpp"
#include "nfg/replay.hpp"

namespace nfg {

// Independent brute-force oracles consumed by tests only. None of these call
// the counted gradient entry points, so invoking them cannot perturb tallies.

// Exact mean of the logged gradients, summed in ascending t: the direct
// memory-heavy form of the streaming epoch average. Restart records (no
// gradient) are skipped.
ParamVector replay_epoch_average(const ReplayLog& log);

// Central differences per coordinate of the component loss.
ParamVector finite_difference_gradient(const FiniteSumOracle& oracle, std::size_t i,
                                       const ParamVector& x, double h);

// Adaptive-Simpson evaluation of sqrt(e) * integral_{-inf}^{z} exp(-t^2/2) dt,
// the quadrature cross-check for the closed-form phi().
double phi_quadrature(double z, double rel_tol = 1e-12);

// Exhaustive trajectory statistics over every per-epoch permutation sequence.
struct TrajectoryEnsemble {
  std::vector<ParamVector> finals;  // end-of-run iterate per permutation sequence
  ParamVector mean;
};

// n! <= 720 per epoch and (n!)^epochs <= 50000 sequences; ContractViolation
// beyond that.
TrajectoryEnsemble enumerate_permutation_trajectories(const FiniteSumOracle& oracle,
                                                      Method method, double gamma,
                                                      std::size_t epochs,
                                                      const ParamVector& x0);

}  // namespace nfg
