#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nfg/oracle.hpp"
#include "nfg/replay.hpp"
#include "nfg/shuffling.hpp"

namespace nfg {

enum class Method { Sgd, Svrg, Sarah, NfgSvrg, NfgSarah, Sag, Saga };

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // ContractViolation on unknown

// Iterates above this magnitude (or any non-finite value) abort the run.
inline constexpr double kDivergenceThreshold = 1e100;

// ---------------------------------------------------------------------------
// Optimizer states. The no-full-grad states hold a fixed number of d-vectors
// independent of n; vector_count() exposes that for the memory accounting
// tests. SagaMemory is the deliberate O(nd) contrast.
// ---------------------------------------------------------------------------

struct NfgSvrgState {
  ParamVector x;        // current iterate x_s^t
  ParamVector omega;    // reference point omega_s
  ParamVector v;        // epoch-start estimate v_s
  ParamVector v_tilde;  // streaming accumulator vtilde_s^t
  std::uint64_t epoch = 0;
  std::size_t inner_t = 0;

  static constexpr std::size_t kVectorCount = 4;
  std::size_t vector_count() const { return kVectorCount; }

  explicit NfgSvrgState(const ParamVector& x0)
      : x(x0), omega(x0), v(zeros(x0.size())), v_tilde(zeros(x0.size())) {}
};

struct NfgSarahState {
  ParamVector x;
  ParamVector x_prev;
  ParamVector v_t;      // recursive estimator v_s^t
  ParamVector v;        // epoch-start estimate v_s
  ParamVector v_tilde;  // streaming accumulator
  std::uint64_t epoch = 0;
  std::size_t inner_t = 0;

  static constexpr std::size_t kVectorCount = 5;
  std::size_t vector_count() const { return kVectorCount; }

  explicit NfgSarahState(const ParamVector& x0)
      : x(x0), x_prev(x0), v_t(zeros(x0.size())), v(zeros(x0.size())),
        v_tilde(zeros(x0.size())) {}
};

struct SgdState {
  ParamVector x;
  std::uint64_t epoch = 0;

  static constexpr std::size_t kVectorCount = 1;
  std::size_t vector_count() const { return kVectorCount; }

  explicit SgdState(const ParamVector& x0) : x(x0) {}
};

struct SvrgState {
  ParamVector x;
  ParamVector omega;
  ParamVector full_grad;
  std::uint64_t epoch = 0;

  static constexpr std::size_t kVectorCount = 3;
  std::size_t vector_count() const { return kVectorCount; }

  explicit SvrgState(const ParamVector& x0)
      : x(x0), omega(x0), full_grad(zeros(x0.size())) {}
};

struct SarahState {
  ParamVector x;
  ParamVector x_prev;
  ParamVector v_t;
  std::uint64_t epoch = 0;

  static constexpr std::size_t kVectorCount = 3;
  std::size_t vector_count() const { return kVectorCount; }

  explicit SarahState(const ParamVector& x0) : x(x0), x_prev(x0), v_t(zeros(x0.size())) {}
};

// Stored per-component gradients plus their exact running sum, maintained
// incrementally.
struct SagaMemory {
  std::vector<ParamVector> stored;
  ParamVector running_sum;

  std::size_t vector_count() const { return stored.size() + 1; }
  bool initialized() const { return !stored.empty(); }

  // stored_i = grad f_i(x) for all i via one counted full pass (n component
  // calls); establishes the running-sum invariant from step one.
  void initialize(const FiniteSumOracle& oracle, const ParamVector& x, OracleTally& tally);
};

struct SagState {
  ParamVector x;
  SagaMemory memory;
  std::uint64_t epoch = 0;
  explicit SagState(const ParamVector& x0) : x(x0) {}
};

struct SagaState {
  ParamVector x;
  SagaMemory memory;
  std::uint64_t epoch = 0;
  explicit SagaState(const ParamVector& x0) : x(x0) {}
};

// ---------------------------------------------------------------------------
// Epoch drivers. Each consumes a bijection on {0..n-1} (component indices are
// 0-based everywhere, including the restart-style methods) and a positive
// stepsize, mutates the state in place, and meters the tally exactly:
//   SGD n, NFG-SVRG 2n, NFG-SARAH 2n, SVRG 3n, SARAH 3n component units.
// The restart-style epochs perform n+1 parameter updates; the restart step
// reuses the carried estimate and costs no oracle call.
// When `trace` is non-null the epoch is logged step by step.
// ---------------------------------------------------------------------------

void sgd_epoch(SgdState& state, const FiniteSumOracle& oracle, const Permutation& perm,
               double gamma, OracleTally& tally, ReplayLog* trace = nullptr);

void nfg_svrg_epoch(NfgSvrgState& state, const FiniteSumOracle& oracle,
                    const Permutation& perm, double gamma, OracleTally& tally,
                    ReplayLog* trace = nullptr);

void nfg_sarah_epoch(NfgSarahState& state, const FiniteSumOracle& oracle,
                     const Permutation& perm, double gamma, OracleTally& tally,
                     ReplayLog* trace = nullptr);

void svrg_epoch(SvrgState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                double gamma, OracleTally& tally, ReplayLog* trace = nullptr);

void sarah_epoch(SarahState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                 double gamma, OracleTally& tally, ReplayLog* trace = nullptr);

// Single steps (1 component call each). The gradient is evaluated at the
// pre-update iterate and becomes the new stored value.
//   SAG:  x -= (gamma/n) (grad_i(x) - stored_i + sum_j stored_j)
//   SAGA: x -= gamma (grad_i(x) - stored_i + (1/n) sum_j stored_j)
void sag_step(SagaMemory& memory, const FiniteSumOracle& oracle, std::size_t i,
              ParamVector& x, double gamma, OracleTally& tally);
void saga_step(SagaMemory& memory, const FiniteSumOracle& oracle, std::size_t i,
               ParamVector& x, double gamma, OracleTally& tally);

void sag_epoch(SagState& state, const FiniteSumOracle& oracle, const Permutation& perm,
               double gamma, OracleTally& tally, ReplayLog* trace = nullptr);
void saga_epoch(SagaState& state, const FiniteSumOracle& oracle, const Permutation& perm,
                double gamma, OracleTally& tally, ReplayLog* trace = nullptr);

// ---------------------------------------------------------------------------
// Stepsize policies.
// ---------------------------------------------------------------------------

struct StepsizePolicy {
  enum class Kind { TheoreticalNfgSvrg, TheoreticalNfgSarah, Fixed, Grid };
  Kind kind = Kind::TheoreticalNfgSvrg;
  double fixed = 0.0;
  std::vector<double> grid;

  static StepsizePolicy theoretical_nfg_svrg() { return {Kind::TheoreticalNfgSvrg, 0.0, {}}; }
  static StepsizePolicy theoretical_nfg_sarah() { return {Kind::TheoreticalNfgSarah, 0.0, {}}; }
  static StepsizePolicy fixed_gamma(double g) { return {Kind::Fixed, g, {}}; }
  static StepsizePolicy grid_of(std::vector<double> g) { return {Kind::Grid, 0.0, std::move(g)}; }
};

// TheoreticalNfgSvrg -> 1/(20 L n); TheoreticalNfgSarah -> 1/(20 L (n+1));
// Fixed passes through. Grid has no single value (ContractViolation).
double theoretical_stepsize(const StepsizePolicy& policy, double L, std::size_t n);

// Per-method theoretical base: restart-style methods (SARAH family) use the
// (n+1) denominator, everything else 1/(20 L n).
double theoretical_stepsize_for_method(Method m, double L, std::size_t n);

// The tuned-stepsize grid {2^k * gamma_theory : k = 0..12}.
std::vector<double> default_stepsize_grid(Method m, double L, std::size_t n);

// ---------------------------------------------------------------------------
// Uniform driver over all methods, for the runner and the enumerator.
// ---------------------------------------------------------------------------

class OptimizerRun {
 public:
  OptimizerRun(Method m, const ParamVector& x0);

  Method method() const { return method_; }
  const ParamVector& iterate() const;

  void run_epoch(const FiniteSumOracle& oracle, const Permutation& perm, double gamma,
                 OracleTally& tally, ReplayLog* trace = nullptr);

 private:
  Method method_;
  std::variant<SgdState, SvrgState, SarahState, NfgSvrgState, NfgSarahState, SagState,
               SagaState>
      state_;
};

}  // namespace nfg
