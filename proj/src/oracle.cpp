#include "nfg/oracle.hpp"

namespace nfg {

FiniteSumOracle::FiniteSumOracle(std::size_t n, std::size_t d,
                                 std::optional<double> smoothness,
                                 std::optional<double> strong_convexity)
    : n_(n), d_(d), smoothness_(smoothness), strong_convexity_(strong_convexity) {
  if (n == 0) throw ContractViolation("component count must be positive");
  if (d == 0) throw ContractViolation("dimension must be positive");
  if (smoothness_ && *smoothness_ <= 0.0)
    throw ContractViolation("smoothness constant must be positive");
  if (strong_convexity_ && *strong_convexity_ < 0.0)
    throw ContractViolation("strong convexity constant must be non-negative");
  if (smoothness_ && strong_convexity_ && *strong_convexity_ > 0.0 &&
      *strong_convexity_ > *smoothness_)
    throw ContractViolation("mu must not exceed L");
}

namespace {

void check_point(const FiniteSumOracle& oracle, const ParamVector& x) {
  if (x.size() != oracle.dimension())
    throw ContractViolation("point dimension mismatch");
}

void check_index(const FiniteSumOracle& oracle, std::size_t i) {
  if (i >= oracle.component_count())
    throw ContractViolation("component index out of range");
}

}  // namespace

void component_gradient_into(const FiniteSumOracle& oracle, std::size_t i,
                             const ParamVector& x, ParamVector& out, OracleTally& tally) {
  check_index(oracle, i);
  check_point(oracle, x);
  oracle.component_gradient_raw(i, x, out);
  tally.component_grad_calls += 1;
  if (!all_finite(out)) throw NumericFailure("non-finite component gradient", i, x);
}

ParamVector component_gradient(const FiniteSumOracle& oracle, std::size_t i,
                               const ParamVector& x, OracleTally& tally) {
  ParamVector out(oracle.dimension());
  component_gradient_into(oracle, i, x, out, tally);
  return out;
}

ParamVector full_gradient_untallied(const FiniteSumOracle& oracle, const ParamVector& x) {
  check_point(oracle, x);
  const std::size_t n = oracle.component_count();
  ParamVector acc = zeros(oracle.dimension());
  ParamVector g(oracle.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    oracle.component_gradient_raw(i, x, g);
    if (!all_finite(g)) throw NumericFailure("non-finite component gradient", i, x);
    axpy(acc, 1.0, g);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : acc) v *= inv_n;
  return acc;
}

ParamVector full_gradient(const FiniteSumOracle& oracle, const ParamVector& x,
                          OracleTally& tally) {
  ParamVector acc = full_gradient_untallied(oracle, x);
  tally.full_grad_calls += 1;
  return acc;
}

double loss(const FiniteSumOracle& oracle, const ParamVector& x) {
  check_point(oracle, x);
  const std::size_t n = oracle.component_count();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += oracle.component_loss(i, x);
  const double f = acc / static_cast<double>(n);
  if (!std::isfinite(f)) throw NumericFailure("non-finite loss", n, x);
  return f;
}

}  // namespace nfg
