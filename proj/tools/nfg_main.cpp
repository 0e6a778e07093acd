#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nfg/checks.hpp"
#include "nfg/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;  // divergence or target miss
constexpr int kExitUsage = 2;

struct RunFlags {
  std::string config;
  std::string method;
  std::string gamma;  // number | "theory" | "grid"
  std::string shuffle;
  std::string seed;
  std::string epochs;
  std::string out;
  std::string timing;
  std::vector<std::string> sets;  // generic key=value overrides
};

void apply_flags(nfg::RunConfig& cfg, const RunFlags& flags) {
  for (const std::string& kv : flags.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw nfg::ContractViolation("--set expects key=value, got '" + kv + "'");
    nfg::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!flags.method.empty()) nfg::apply_config_entry(cfg, "method.name", flags.method);
  if (!flags.gamma.empty()) {
    if (flags.gamma == "theory") {
      nfg::apply_config_entry(cfg, "stepsize.policy", "theory");
    } else if (flags.gamma == "grid") {
      nfg::apply_config_entry(cfg, "stepsize.policy", "grid");
    } else {
      nfg::apply_config_entry(cfg, "stepsize.gamma", flags.gamma);
    }
  }
  if (!flags.shuffle.empty()) nfg::apply_config_entry(cfg, "run.shuffle", flags.shuffle);
  if (!flags.seed.empty()) nfg::apply_config_entry(cfg, "run.seed", flags.seed);
  if (!flags.epochs.empty()) nfg::apply_config_entry(cfg, "run.epochs", flags.epochs);
  if (!flags.out.empty()) nfg::apply_config_entry(cfg, "run.out", flags.out);
  if (!flags.timing.empty()) nfg::apply_config_entry(cfg, "run.timing", flags.timing);
}

nfg::RunConfig load_config(const RunFlags& flags) {
  // a config that cannot be read or parsed is a usage problem, not a run failure
  try {
    nfg::RunConfig cfg = nfg::parse_config_file(flags.config);
    apply_flags(cfg, flags);
    return cfg;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    std::exit(kExitUsage);
  }
}

int cmd_run(const RunFlags& flags) {
  const nfg::RunConfig cfg = load_config(flags);
  const nfg::RunResult result = nfg::run_experiment(cfg);
  std::cout << result.summary_json() << "\n";
  return result.status == nfg::RunStatus::Ok ? kExitOk : kExitRunFailed;
}

int cmd_validate(const RunFlags& flags) {
  const nfg::RunConfig cfg = load_config(flags);
  const auto problem = nfg::build_problem(cfg);  // dry-run construction
  std::printf("config ok: problem=%s n=%zu d=%zu method=%s epochs=%zu\n",
              cfg.problem.c_str(), problem->component_count(), problem->dimension(),
              nfg::method_name(cfg.method), cfg.epochs);
  return kExitOk;
}

int cmd_identity_check() {
  const std::vector<nfg::CheckResult> results = nfg::run_acceptance_checks();
  bool all_ok = true;
  for (const nfg::CheckResult& r : results) {
    std::printf("[%s] %2d. %s — %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    all_ok = all_ok && r.passed;
  }
  return all_ok ? kExitOk : kExitRunFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-sum optimization benchmark runner (no-full-gradient "
               "variance reduction and baselines)"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "execute a configured experiment");
  run->add_option("--config", flags.config, "config file path")->required();
  run->add_option("--method", flags.method,
                  "sgd|svrg|sarah|nfg_svrg|nfg_sarah|sag|saga");
  run->add_option("--gamma", flags.gamma, "stepsize: a number, 'theory' or 'grid'");
  run->add_option("--shuffle", flags.shuffle, "rr|so|cyclic");
  run->add_option("--seed", flags.seed, "shuffle seed");
  run->add_option("--epochs", flags.epochs, "epoch budget");
  run->add_option("--out", flags.out, "CSV output path");
  run->add_option("--timing", flags.timing, "on|off wall-clock column (off = reproducible)");
  run->add_option("--set", flags.sets, "override any config key, e.g. --set problem.n=100");

  CLI::App* validate = app.add_subcommand("validate", "dry-run config check");
  validate->add_option("--config", flags.config, "config file path")->required();
  validate->add_option("--set", flags.sets, "override any config key");

  CLI::App* identity =
      app.add_subcommand("identity-check", "run the full invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(flags);
    if (validate->parsed()) return cmd_validate(flags);
    if (identity->parsed()) return cmd_identity_check();
  } catch (const nfg::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRunFailed;
  } catch (const nfg::ContractViolation& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRunFailed;
  }
  return kExitUsage;
}
