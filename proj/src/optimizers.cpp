#include "nfg/optimizers.hpp"

#include <cmath>

namespace nfg {

const char* method_name(Method m) {
  switch (m) {
    case Method::Sgd: return "sgd";
    case Method::Svrg: return "svrg";
    case Method::Sarah: return "sarah";
    case Method::NfgSvrg: return "nfg_svrg";
    case Method::NfgSarah: return "nfg_sarah";
    case Method::Sag: return "sag";
    case Method::Saga: return "saga";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "sgd") return Method::Sgd;
  if (name == "svrg") return Method::Svrg;
  if (name == "sarah") return Method::Sarah;
  if (name == "nfg_svrg") return Method::NfgSvrg;
  if (name == "nfg_sarah") return Method::NfgSarah;
  if (name == "sag") return Method::Sag;
  if (name == "saga") return Method::Saga;
  throw ContractViolation("unknown method: " + name);
}

namespace {

void check_epoch_args(const FiniteSumOracle& oracle, const Permutation& perm, double gamma) {
  if (!(gamma > 0.0)) throw ContractViolation("stepsize must be positive");
  if (perm.size() != oracle.component_count())
    throw ContractViolation("permutation length must equal component count");
}

// Applies x -= gamma * dir and aborts on blow-up.
void step_checked(ParamVector& x, double gamma, const ParamVector& dir,
                  std::uint64_t epoch, std::size_t t, double gamma_for_error) {
  double maxabs = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] -= gamma * dir[k];
    maxabs = std::max(maxabs, std::fabs(x[k]));
  }
  if (!(maxabs <= kDivergenceThreshold))  // catches NaN as well
    throw DivergenceError(epoch, t, gamma_for_error);
}

}  // namespace

// ------------------------------------ SGD ----------------------------------

void sgd_epoch(SgdState& state, const FiniteSumOracle& oracle, const Permutation& perm,
               double gamma, OracleTally& tally, ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  const std::size_t n = oracle.component_count();
  ParamVector g(oracle.dimension());
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = perm[t];
    component_gradient_into(oracle, i, state.x, g, tally);
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(i), state.x, g, {}, g});
    step_checked(state.x, gamma, g, state.epoch, t, gamma);
  }
  state.epoch += 1;
}

// --------------------------------- NFG-SVRG --------------------------------

void nfg_svrg_epoch(NfgSvrgState& state, const FiniteSumOracle& oracle,
                    const Permutation& perm, double gamma, OracleTally& tally,
                    ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  const std::size_t n = oracle.component_count();
  const std::size_t d = oracle.dimension();
  ParamVector g_x(d), g_ref(d);
  for (std::size_t t = 0; t < n; ++t) {
    state.inner_t = t;
    const std::size_t i = perm[t];
    // one evaluation at x^t shared by the moving-average and estimator lines
    component_gradient_into(oracle, i, state.x, g_x, tally);
    const double w = 1.0 / static_cast<double>(t + 1);
    const double keep = static_cast<double>(t) * w;
    for (std::size_t k = 0; k < d; ++k)
      state.v_tilde[k] = keep * state.v_tilde[k] + w * g_x[k];
    component_gradient_into(oracle, i, state.omega, g_ref, tally);
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(i), state.x, g_x, {}, {}});
    // v_s^t = grad_i(x^t) - grad_i(omega_s) + v_s, reusing g_ref as direction
    for (std::size_t k = 0; k < d; ++k) g_ref[k] = g_x[k] - g_ref[k] + state.v[k];
    if (trace) trace->back().direction = g_ref;
    step_checked(state.x, gamma, g_ref, state.epoch, t, gamma);
  }
  state.omega = state.x;
  state.v = state.v_tilde;
  std::fill(state.v_tilde.begin(), state.v_tilde.end(), 0.0);
  state.epoch += 1;
  state.inner_t = 0;
}

// -------------------------------- NFG-SARAH --------------------------------

void nfg_sarah_epoch(NfgSarahState& state, const FiniteSumOracle& oracle,
                     const Permutation& perm, double gamma, OracleTally& tally,
                     ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  const std::size_t n = oracle.component_count();
  const std::size_t d = oracle.dimension();
  // restart step: v_s^0 = v_s, x^1 = x^0 - gamma v^0 (no oracle call)
  state.inner_t = 0;
  state.v_t = state.v;
  state.x_prev = state.x;
  if (trace) trace->push_back({0, -1, state.x, {}, {}, state.v_t});
  step_checked(state.x, gamma, state.v_t, state.epoch, 0, gamma);

  ParamVector g_x(d), g_prev(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 1; t <= n; ++t) {
    state.inner_t = t;
    const std::size_t i = perm[t - 1];
    component_gradient_into(oracle, i, state.x, g_x, tally);
    const double w = 1.0 / static_cast<double>(t);
    const double keep = static_cast<double>(t - 1) * w;
    for (std::size_t k = 0; k < d; ++k)
      state.v_tilde[k] = keep * state.v_tilde[k] + w * g_x[k];
    component_gradient_into(oracle, i, state.x_prev, g_prev, tally);
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(i), state.x, g_x, g_prev, {}});
    // v_s^t = (1/n)(grad_i(x^t) - grad_i(x^{t-1})) + v_s^{t-1}
    for (std::size_t k = 0; k < d; ++k) state.v_t[k] += inv_n * (g_x[k] - g_prev[k]);
    if (trace) trace->back().direction = state.v_t;
    state.x_prev = state.x;
    step_checked(state.x, gamma, state.v_t, state.epoch, t, gamma);
  }
  state.v = state.v_tilde;
  std::fill(state.v_tilde.begin(), state.v_tilde.end(), 0.0);
  state.epoch += 1;
  state.inner_t = 0;
}

// ------------------------------- classic SVRG ------------------------------

void svrg_epoch(SvrgState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                double gamma, OracleTally& tally, ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  const std::size_t n = oracle.component_count();
  const std::size_t d = oracle.dimension();
  state.omega = state.x;
  state.full_grad = full_gradient(oracle, state.omega, tally);
  ParamVector g_x(d), g_ref(d);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = perm[t];
    component_gradient_into(oracle, i, state.x, g_x, tally);
    component_gradient_into(oracle, i, state.omega, g_ref, tally);
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(i), state.x, g_x, {}, {}});
    for (std::size_t k = 0; k < d; ++k)
      g_ref[k] = g_x[k] - g_ref[k] + state.full_grad[k];
    if (trace) trace->back().direction = g_ref;
    step_checked(state.x, gamma, g_ref, state.epoch, t, gamma);
  }
  state.epoch += 1;
}

// ------------------------------ classic SARAH ------------------------------

void sarah_epoch(SarahState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                 double gamma, OracleTally& tally, ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  const std::size_t n = oracle.component_count();
  const std::size_t d = oracle.dimension();
  // restart with the exact full gradient
  state.v_t = full_gradient(oracle, state.x, tally);
  state.x_prev = state.x;
  if (trace) trace->push_back({0, -1, state.x, {}, {}, state.v_t});
  step_checked(state.x, gamma, state.v_t, state.epoch, 0, gamma);

  ParamVector g_x(d), g_prev(d);
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t i = perm[t - 1];
    component_gradient_into(oracle, i, state.x, g_x, tally);
    component_gradient_into(oracle, i, state.x_prev, g_prev, tally);
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(i), state.x, g_x, g_prev, {}});
    for (std::size_t k = 0; k < d; ++k) state.v_t[k] += g_x[k] - g_prev[k];
    if (trace) trace->back().direction = state.v_t;
    state.x_prev = state.x;
    step_checked(state.x, gamma, state.v_t, state.epoch, t, gamma);
  }
  state.epoch += 1;
}

// -------------------------------- SAG / SAGA --------------------------------

void SagaMemory::initialize(const FiniteSumOracle& oracle, const ParamVector& x,
                            OracleTally& tally) {
  const std::size_t n = oracle.component_count();
  stored.assign(n, ParamVector(oracle.dimension()));
  running_sum = zeros(oracle.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    component_gradient_into(oracle, i, x, stored[i], tally);
    axpy(running_sum, 1.0, stored[i]);
  }
}

namespace {

enum class MemoryRule { Sag, Saga };

void stored_gradient_step(SagaMemory& memory, const FiniteSumOracle& oracle, std::size_t i,
                          ParamVector& x, double gamma, OracleTally& tally, MemoryRule rule,
                          std::uint64_t epoch, std::size_t t) {
  if (!memory.initialized()) throw ContractViolation("SAG/SAGA memory not initialized");
  if (i >= memory.stored.size()) throw ContractViolation("component index out of range");
  const std::size_t d = x.size();
  ParamVector g(d);
  component_gradient_into(oracle, i, x, g, tally);
  const double n = static_cast<double>(memory.stored.size());
  ParamVector& old = memory.stored[i];
  if (rule == MemoryRule::Sag) {
    // x -= (gamma/n) (g - old_i + sum_j stored_j)
    const double scale = gamma / n;
    double maxabs = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] -= scale * (g[k] - old[k] + memory.running_sum[k]);
      maxabs = std::max(maxabs, std::fabs(x[k]));
    }
    if (!(maxabs <= kDivergenceThreshold)) throw DivergenceError(epoch, t, gamma);
  } else {
    // x -= gamma (g - old_i + (1/n) sum_j stored_j)
    const double inv_n = 1.0 / n;
    double maxabs = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] -= gamma * (g[k] - old[k] + inv_n * memory.running_sum[k]);
      maxabs = std::max(maxabs, std::fabs(x[k]));
    }
    if (!(maxabs <= kDivergenceThreshold)) throw DivergenceError(epoch, t, gamma);
  }
  for (std::size_t k = 0; k < d; ++k) {
    memory.running_sum[k] += g[k] - old[k];
    old[k] = g[k];
  }
}

}  // namespace

void sag_step(SagaMemory& memory, const FiniteSumOracle& oracle, std::size_t i,
              ParamVector& x, double gamma, OracleTally& tally) {
  stored_gradient_step(memory, oracle, i, x, gamma, tally, MemoryRule::Sag, 0, 0);
}

void saga_step(SagaMemory& memory, const FiniteSumOracle& oracle, std::size_t i,
               ParamVector& x, double gamma, OracleTally& tally) {
  stored_gradient_step(memory, oracle, i, x, gamma, tally, MemoryRule::Saga, 0, 0);
}

void sag_epoch(SagState& state, const FiniteSumOracle& oracle, const Permutation& perm,
               double gamma, OracleTally& tally, ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  if (!state.memory.initialized()) state.memory.initialize(oracle, state.x, tally);
  for (std::size_t t = 0; t < perm.size(); ++t) {
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(perm[t]), state.x, {}, {}, {}});
    stored_gradient_step(state.memory, oracle, perm[t], state.x, gamma, tally,
                         MemoryRule::Sag, state.epoch, t);
  }
  state.epoch += 1;
}

void saga_epoch(SagaState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                double gamma, OracleTally& tally, ReplayLog* trace) {
  check_epoch_args(oracle, perm, gamma);
  if (!state.memory.initialized()) state.memory.initialize(oracle, state.x, tally);
  for (std::size_t t = 0; t < perm.size(); ++t) {
    if (trace)
      trace->push_back({t, static_cast<std::ptrdiff_t>(perm[t]), state.x, {}, {}, {}});
    stored_gradient_step(state.memory, oracle, perm[t], state.x, gamma, tally,
                         MemoryRule::Saga, state.epoch, t);
  }
  state.epoch += 1;
}

// ------------------------------ stepsize policy -----------------------------

double theoretical_stepsize(const StepsizePolicy& policy, double L, std::size_t n) {
  if (n == 0) throw ContractViolation("n must be positive");
  switch (policy.kind) {
    case StepsizePolicy::Kind::Fixed:
      if (!(policy.fixed > 0.0)) throw ContractViolation("fixed stepsize must be positive");
      return policy.fixed;
    case StepsizePolicy::Kind::TheoreticalNfgSvrg:
      if (!(L > 0.0)) throw ContractViolation("L must be positive");
      return 1.0 / (20.0 * L * static_cast<double>(n));
    case StepsizePolicy::Kind::TheoreticalNfgSarah:
      if (!(L > 0.0)) throw ContractViolation("L must be positive");
      return 1.0 / (20.0 * L * static_cast<double>(n + 1));
    case StepsizePolicy::Kind::Grid:
      throw ContractViolation("grid policy has no single stepsize");
  }
  throw ContractViolation("unknown stepsize policy");
}

double theoretical_stepsize_for_method(Method m, double L, std::size_t n) {
  const bool sarah_family = (m == Method::Sarah || m == Method::NfgSarah);
  return theoretical_stepsize(sarah_family ? StepsizePolicy::theoretical_nfg_sarah()
                                           : StepsizePolicy::theoretical_nfg_svrg(),
                              L, n);
}

std::vector<double> default_stepsize_grid(Method m, double L, std::size_t n) {
  const double base = theoretical_stepsize_for_method(m, L, n);
  std::vector<double> grid;
  grid.reserve(13);
  double g = base;
  for (int k = 0; k <= 12; ++k) {
    grid.push_back(g);
    g *= 2.0;
  }
  return grid;
}

// ------------------------------- uniform driver -----------------------------

OptimizerRun::OptimizerRun(Method m, const ParamVector& x0)
    : method_(m), state_(SgdState(x0)) {
  switch (m) {
    case Method::Sgd: state_ = SgdState(x0); break;
    case Method::Svrg: state_ = SvrgState(x0); break;
    case Method::Sarah: state_ = SarahState(x0); break;
    case Method::NfgSvrg: state_ = NfgSvrgState(x0); break;
    case Method::NfgSarah: state_ = NfgSarahState(x0); break;
    case Method::Sag: state_ = SagState(x0); break;
    case Method::Saga: state_ = SagaState(x0); break;
  }
}

const ParamVector& OptimizerRun::iterate() const {
  return std::visit([](const auto& s) -> const ParamVector& { return s.x; }, state_);
}

void OptimizerRun::run_epoch(const FiniteSumOracle& oracle, const Permutation& perm,
                             double gamma, OracleTally& tally, ReplayLog* trace) {
  switch (method_) {
    case Method::Sgd:
      sgd_epoch(std::get<SgdState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::Svrg:
      svrg_epoch(std::get<SvrgState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::Sarah:
      sarah_epoch(std::get<SarahState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::NfgSvrg:
      nfg_svrg_epoch(std::get<NfgSvrgState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::NfgSarah:
      nfg_sarah_epoch(std::get<NfgSarahState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::Sag:
      sag_epoch(std::get<SagState>(state_), oracle, perm, gamma, tally, trace);
      break;
    case Method::Saga:
      saga_epoch(std::get<SagaState>(state_), oracle, perm, gamma, tally, trace);
      break;
  }
}

}  // namespace nfg
