#pragma once

#include <memory>
#include <optional>
#include <string>

#include "nfg/data.hpp"
#include "nfg/optimizers.hpp"

namespace nfg {

// ---------------------------------------------------------------------------
// Run configuration. Populated from a line-oriented `key = value` file with
// `[section]` headers; every key can be overridden from the command line.
// ---------------------------------------------------------------------------
struct RunConfig {
  // [problem]
  std::string problem = "quadratic";  // quadratic | sigmoid_lsq | zero_chain
  std::size_t n = 50;
  std::size_t d = 10;
  double L = 1.0;
  double mu = 1.0;
  std::uint64_t problem_seed = 1;
  std::string dataset;             // LIBSVM path for sigmoid_lsq (else synthetic)
  bool unit_feature_scaling = false;
  double chain_smoothness = ZeroChainProblem::kChainSmoothness;
  double chain_scale = 1.0;

  // [method]
  Method method = Method::NfgSvrg;

  // [stepsize]  policy = theory | fixed | grid
  StepsizePolicy stepsize = StepsizePolicy::theoretical_nfg_svrg();
  bool stepsize_theory = true;  // resolve the theoretical kind from the method

  // [run]
  ShuffleStrategy shuffle{ShuffleKind::RandomReshuffle, 0};
  std::size_t epochs = 100;
  std::optional<double> eps_grad_sq;  // stop when ||grad f||^2 <= this ...
  std::optional<double> eps_gap;      // ... and f - f* <= this (all set targets)
  std::string out;                    // CSV path ("" = don't write)
  bool record_timing = false;         // off by default: zero seconds column keeps
                                      // CSV output byte-reproducible
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);
// `key = value` with the file's section prefix, e.g. "problem.kind".
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Per-epoch telemetry. The measurement point is the end-of-epoch iterate
// (the next reference point for the SVRG family, x_{s+1}^0 for the SARAH
// family, the final iterate for SGD).
struct RunRecord {
  std::size_t epoch = 0;
  std::uint64_t oracle_units = 0;
  double grad_norm_sq = 0.0;
  double loss_gap = 0.0;  // NaN when f* is unknown
  double running_mean_grad_sq = 0.0;
  double seconds = 0.0;
};

// Header `epoch,oracle_units,grad_norm_sq,loss_gap,running_mean_grad_sq,seconds`,
// 17 significant digits, '\n' line ends. Empty input is a contract violation.
std::string emit_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(const std::string& text);

enum class RunStatus { Ok, TargetMiss, Diverged };

struct GridCellResult {
  double gamma = 0.0;
  RunStatus status = RunStatus::Ok;
  double final_loss = 0.0;
  double final_grad_norm_sq = 0.0;
  std::uint64_t oracle_units = 0;
};

struct RunResult {
  RunStatus status = RunStatus::Ok;
  double gamma = 0.0;
  std::size_t epochs_run = 0;
  std::uint64_t oracle_units = 0;
  std::vector<RunRecord> records;  // best grid cell's records under Grid policy
  std::optional<std::size_t> epochs_to_target;
  std::optional<std::uint64_t> units_to_target;
  bool fstar_known = false;
  double fstar = 0.0;
  std::uint64_t presolve_grad_evals = 0;  // disclosed, excluded from run tallies
  std::optional<double> best_gamma;
  std::vector<GridCellResult> grid;

  std::string summary_json() const;
};

// Builds the configured problem (throws on config errors).
std::unique_ptr<FiniteSumOracle> build_problem(const RunConfig& cfg);

// Executes the configured run; under the Grid policy every cell is run and the
// best final loss wins. Divergence marks the cell failed instead of aborting.
RunResult run_experiment(const RunConfig& cfg);

}  // namespace nfg
