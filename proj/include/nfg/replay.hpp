#pragma once

#include <cstddef>
#include <vector>

#include "nfg/vec.hpp"

namespace nfg {

// One inner step of an epoch, recorded before the iterate update at t.
// `component` is -1 for a gradient-free restart step (recursive methods).
struct StepRecord {
  std::size_t t = 0;
  std::ptrdiff_t component = -1;
  ParamVector point;      // iterate x^t at evaluation time
  ParamVector grad;       // component gradient at `point` (empty if none)
  ParamVector grad_prev;  // recursive methods: gradient at the previous iterate
  ParamVector direction;  // v^t actually applied in x^{t+1} = x^t - gamma v^t
};

// Full log of one epoch: n records, or n+1 including a restart step.
using ReplayLog = std::vector<StepRecord>;

}  // namespace nfg
