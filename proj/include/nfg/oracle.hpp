#pragma once

#include <cstdint>
#include <optional>

#include "nfg/errors.hpp"
#include "nfg/vec.hpp"

namespace nfg {

// Counter of gradient-oracle work. Component-gradient evaluations are the
// complexity currency; a full-gradient evaluation converts to n component units.
// Loss evaluations are free and never touch the tally.
struct OracleTally {
  std::uint64_t component_grad_calls = 0;
  std::uint64_t full_grad_calls = 0;

  std::uint64_t component_units(std::size_t n) const {
    return component_grad_calls + static_cast<std::uint64_t>(n) * full_grad_calls;
  }
};

// Finite-sum problem f(x) = (1/n) sum_i f_i(x). Immutable after construction;
// safe to share read-only across concurrent runs. Derived classes implement the
// raw (uncounted) per-component evaluations; counted access goes through the
// free functions below so that every code path is metered identically.
class FiniteSumOracle {
 public:
  virtual ~FiniteSumOracle() = default;

  std::size_t component_count() const { return n_; }
  std::size_t dimension() const { return d_; }
  std::optional<double> smoothness() const { return smoothness_; }
  std::optional<double> strong_convexity() const { return strong_convexity_; }

  virtual double component_loss(std::size_t i, const ParamVector& x) const = 0;
  // Overwrites `out` (resized to d) with grad f_i(x).
  virtual void component_gradient_raw(std::size_t i, const ParamVector& x,
                                      ParamVector& out) const = 0;

 protected:
  FiniteSumOracle(std::size_t n, std::size_t d, std::optional<double> smoothness = {},
                  std::optional<double> strong_convexity = {});

 private:
  std::size_t n_;
  std::size_t d_;
  std::optional<double> smoothness_;
  std::optional<double> strong_convexity_;
};

// grad f_i(x); counts exactly one component call.
ParamVector component_gradient(const FiniteSumOracle& oracle, std::size_t i,
                               const ParamVector& x, OracleTally& tally);

// Buffer variant for allocation-free inner loops; counts identically.
void component_gradient_into(const FiniteSumOracle& oracle, std::size_t i,
                             const ParamVector& x, ParamVector& out, OracleTally& tally);

// Exact mean of all n component gradients, summed in ascending index order
// (fixed order keeps runs bit-reproducible). Counts one full-gradient call.
ParamVector full_gradient(const FiniteSumOracle& oracle, const ParamVector& x,
                          OracleTally& tally);

// f(x); free, does not touch any tally.
double loss(const FiniteSumOracle& oracle, const ParamVector& x);

// Uncounted full gradient for telemetry (epoch-end diagnostics must not
// distort the complexity measure).
ParamVector full_gradient_untallied(const FiniteSumOracle& oracle, const ParamVector& x);

}  // namespace nfg
