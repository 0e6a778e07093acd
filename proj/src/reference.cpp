#include "nfg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nfg {

ParamVector replay_epoch_average(const ReplayLog& log) {
  std::size_t count = 0;
  std::size_t d = 0;
  for (const StepRecord& rec : log) {
    if (rec.component < 0) continue;
    if (rec.grad.empty()) throw ContractViolation("incomplete log: missing gradient");
    if (d == 0) d = rec.grad.size();
    if (rec.grad.size() != d) throw ContractViolation("incomplete log: dimension mismatch");
    ++count;
  }
  if (count == 0) throw ContractViolation("incomplete log: no gradient records");
  ParamVector acc = zeros(d);
  for (const StepRecord& rec : log) {
    if (rec.component < 0) continue;
    axpy(acc, 1.0, rec.grad);
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (double& v : acc) v *= inv;
  return acc;
}

ParamVector finite_difference_gradient(const FiniteSumOracle& oracle, std::size_t i,
                                       const ParamVector& x, double h) {
  if (!(h > 0.0)) throw ContractViolation("step h must be positive");
  ParamVector g(x.size());
  ParamVector probe = x;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + h;
    const double fp = oracle.component_loss(i, probe);
    probe[k] = saved - h;
    const double fm = oracle.component_loss(i, probe);
    probe[k] = saved;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

double gaussian(double t) { return std::exp(-0.5 * t * t); }

double simpson(double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (gaussian(a) + 4.0 * gaussian(m) + gaussian(b));
}

double adaptive(double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(a, m);
  const double right = simpson(m, b);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(a, m, left, 0.5 * tol, depth - 1) +
         adaptive(m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double phi_quadrature(double z, double rel_tol) {
  // the integrand is below 1e-320 outside [-40, 40]
  const double lo = -40.0;
  if (z <= lo) return 0.0;
  const double hi = std::min(z, 40.0);
  const double scale = std::sqrt(2.0 * M_PI);  // magnitude of the full integral
  const double integral = adaptive(lo, hi, simpson(lo, hi), rel_tol * scale, 48);
  return std::sqrt(std::exp(1.0)) * integral;
}

TrajectoryEnsemble enumerate_permutation_trajectories(const FiniteSumOracle& oracle,
                                                      Method method, double gamma,
                                                      std::size_t epochs,
                                                      const ParamVector& x0) {
  const std::size_t n = oracle.component_count();
  if (n > 6) throw ContractViolation("enumeration limited to n <= 6");
  if (epochs == 0) throw ContractViolation("need at least one epoch");
  double factorial = 1.0;
  for (std::size_t k = 2; k <= n; ++k) factorial *= static_cast<double>(k);
  if (std::pow(factorial, static_cast<double>(epochs)) > 50000.0)
    throw ContractViolation("too many permutation sequences to enumerate");

  TrajectoryEnsemble out;
  Permutation base(n);
  std::iota(base.begin(), base.end(), std::size_t{0});

  // depth-first over the per-epoch permutation choices
  struct Frame {
    OptimizerRun run;
    std::size_t depth;
  };
  std::vector<Frame> stack;
  stack.push_back({OptimizerRun(method, x0), 0});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    if (frame.depth == epochs) {
      out.finals.push_back(frame.run.iterate());
      continue;
    }
    Permutation perm = base;
    do {
      Frame next{frame.run, frame.depth + 1};
      OracleTally scratch;
      next.run.run_epoch(oracle, perm, gamma, scratch);
      stack.push_back(std::move(next));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  out.mean = zeros(oracle.dimension());
  for (const ParamVector& f : out.finals) axpy(out.mean, 1.0, f);
  const double inv = 1.0 / static_cast<double>(out.finals.size());
  for (double& v : out.mean) v *= inv;
  return out;
}

}  // namespace nfg
