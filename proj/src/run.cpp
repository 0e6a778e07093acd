#include "nfg/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nfg {

// ------------------------------ config parsing ------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

// strips a trailing `#` comment when it starts a line or follows whitespace
std::string strip_comment(const std::string& s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '#' && (k == 0 || s[k - 1] == ' ' || s[k - 1] == '\t'))
      return s.substr(0, k);
  }
  return s;
}

double to_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw ContractViolation("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    throw ContractViolation("config key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ContractViolation("config key '" + key + "': expected on/off, got '" + v + "'");
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "problem.kind") {
    if (value != "quadratic" && value != "sigmoid_lsq" && value != "zero_chain")
      throw ContractViolation("unknown problem kind: " + value);
    cfg.problem = value;
  } else if (key == "problem.n") {
    cfg.n = static_cast<std::size_t>(to_u64(value, key));
  } else if (key == "problem.d") {
    cfg.d = static_cast<std::size_t>(to_u64(value, key));
  } else if (key == "problem.L") {
    cfg.L = to_double(value, key);
  } else if (key == "problem.mu") {
    cfg.mu = to_double(value, key);
  } else if (key == "problem.seed") {
    cfg.problem_seed = to_u64(value, key);
  } else if (key == "problem.dataset") {
    cfg.dataset = value;
  } else if (key == "problem.feature_scaling") {
    if (value == "unit") cfg.unit_feature_scaling = true;
    else if (value == "none") cfg.unit_feature_scaling = false;
    else throw ContractViolation("feature_scaling must be none or unit");
  } else if (key == "problem.chain_smoothness") {
    cfg.chain_smoothness = to_double(value, key);
  } else if (key == "problem.chain_scale") {
    cfg.chain_scale = to_double(value, key);
  } else if (key == "method.name") {
    cfg.method = method_from_name(value);
  } else if (key == "stepsize.policy") {
    if (value == "theory") {
      cfg.stepsize_theory = true;
      cfg.stepsize = StepsizePolicy::theoretical_nfg_svrg();
    } else if (value == "fixed") {
      cfg.stepsize_theory = false;
      cfg.stepsize.kind = StepsizePolicy::Kind::Fixed;
    } else if (value == "grid") {
      cfg.stepsize_theory = false;
      cfg.stepsize.kind = StepsizePolicy::Kind::Grid;
    } else {
      throw ContractViolation("stepsize policy must be theory, fixed or grid");
    }
  } else if (key == "stepsize.gamma") {
    cfg.stepsize_theory = false;
    cfg.stepsize.kind = StepsizePolicy::Kind::Fixed;
    cfg.stepsize.fixed = to_double(value, key);
  } else if (key == "run.shuffle") {
    if (value == "rr") cfg.shuffle.kind = ShuffleKind::RandomReshuffle;
    else if (value == "so") cfg.shuffle.kind = ShuffleKind::ShuffleOnce;
    else if (value == "cyclic") cfg.shuffle.kind = ShuffleKind::Cyclic;
    else throw ContractViolation("shuffle must be rr, so or cyclic");
  } else if (key == "run.seed") {
    cfg.shuffle.seed = to_u64(value, key);
  } else if (key == "run.epochs") {
    cfg.epochs = static_cast<std::size_t>(to_u64(value, key));
    if (cfg.epochs == 0) throw ContractViolation("epochs must be >= 1");
  } else if (key == "run.eps_grad_sq") {
    cfg.eps_grad_sq = to_double(value, key);
  } else if (key == "run.eps_gap") {
    cfg.eps_gap = to_double(value, key);
  } else if (key == "run.out") {
    cfg.out = value;
  } else if (key == "run.timing") {
    cfg.record_timing = to_bool(value, key);
  } else {
    throw ContractViolation("unknown config key: " + key);
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ContractViolation("config line " + std::to_string(line_no) +
                                ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractViolation("config line " + std::to_string(line_no) +
                              ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ContractViolation("config line " + std::to_string(line_no) + ": empty key");
    apply_config_entry(cfg, section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

// ------------------------------- CSV emit/parse -----------------------------

static const char kCsvHeader[] =
    "epoch,oracle_units,grad_norm_sq,loss_gap,running_mean_grad_sq,seconds";

std::string emit_csv(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ContractViolation("no records to emit");
  std::string out(kCsvHeader);
  out += '\n';
  char buf[256];
  for (const RunRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.epoch),
                  static_cast<unsigned long long>(r.oracle_units), r.grad_norm_sq,
                  r.loss_gap, r.running_mean_grad_sq, r.seconds);
    out += buf;
  }
  return out;
}

std::vector<RunRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ParseError("bad CSV header", 1, 1);
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    RunRecord r;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
      if (k == line.size() || line[k] == ',') {
        fields.push_back(line.substr(start, k - start));
        start = k + 1;
      }
    }
    if (fields.size() != 6) throw ParseError("expected 6 fields", line_no, 1);
    char* end = nullptr;
    const auto integer = [&](const std::string& f) {
      const std::uint64_t v = std::strtoull(f.c_str(), &end, 10);
      if (f.empty() || end != f.c_str() + f.size())
        throw ParseError("bad integer field '" + f + "'", line_no, 1);
      return v;
    };
    const auto real = [&](const std::string& f) {
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size())
        throw ParseError("bad numeric field '" + f + "'", line_no, 1);
      return v;
    };
    r.epoch = static_cast<std::size_t>(integer(fields[0]));
    r.oracle_units = integer(fields[1]);
    r.grad_norm_sq = real(fields[2]);
    r.loss_gap = real(fields[3]);
    r.running_mean_grad_sq = real(fields[4]);
    r.seconds = real(fields[5]);
    records.push_back(r);
  }
  if (records.empty()) throw ParseError("no rows", 0, 0);
  return records;
}

// ------------------------------ problem building ----------------------------

std::unique_ptr<FiniteSumOracle> build_problem(const RunConfig& cfg) {
  if (cfg.problem == "quadratic") {
    return std::make_unique<QuadraticProblem>(
        make_quadratic_suite(cfg.n, cfg.d, cfg.L, cfg.mu, cfg.problem_seed));
  }
  if (cfg.problem == "sigmoid_lsq") {
    if (!cfg.dataset.empty()) {
      LabeledDataset ds = load_libsvm_file(cfg.dataset);
      if (cfg.unit_feature_scaling) apply_unit_feature_scaling(ds);
      return std::make_unique<SigmoidLsqProblem>(make_sigmoid_problem(ds));
    }
    return std::make_unique<SigmoidLsqProblem>(
        make_synthetic_sigmoid(cfg.n, cfg.d, cfg.problem_seed));
  }
  if (cfg.problem == "zero_chain") {
    return std::make_unique<ZeroChainProblem>(cfg.d, cfg.n, cfg.chain_smoothness,
                                              cfg.chain_scale);
  }
  throw ContractViolation("unknown problem kind: " + cfg.problem);
}

// --------------------------------- f* lookup --------------------------------

namespace {

struct FstarInfo {
  bool known = false;
  double value = 0.0;
  std::uint64_t presolve_grad_evals = 0;
};

// Full-gradient descent with Armijo backtracking; gradient work is counted for
// disclosure only and never enters a run tally.
FstarInfo presolve_minimum(const FiniteSumOracle& problem) {
  FstarInfo info;
  ParamVector x = zeros(problem.dimension());
  double fx = loss(problem, x);
  double step = 1.0;
  const std::size_t n = problem.component_count();
  for (int it = 0; it < 20000; ++it) {
    ParamVector g = full_gradient_untallied(problem, x);
    info.presolve_grad_evals += n;
    const double gsq = norm_sq(g);
    if (gsq <= 1e-22) break;
    step *= 2.0;
    ParamVector trial(x.size());
    double ftrial = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] - step * g[k];
      ftrial = loss(problem, trial);
      if (ftrial <= fx - 0.25 * step * gsq) break;
      step *= 0.5;
    }
    if (ftrial >= fx) break;  // no progress at any tried step
    x = trial;
    fx = ftrial;
  }
  info.known = true;
  info.value = fx;
  return info;
}

FstarInfo resolve_fstar(const RunConfig& cfg, const FiniteSumOracle& problem) {
  FstarInfo info;
  if (const auto* quad = dynamic_cast<const QuadraticProblem*>(&problem)) {
    info.known = true;
    info.value = quad->optimal_value();
    return info;
  }
  if (cfg.problem == "sigmoid_lsq") {
    // presolve only when the gap actually matters; cache next to the dataset
    if (!cfg.eps_gap && cfg.dataset.empty()) return info;
    const std::string cache_path = cfg.dataset.empty() ? "" : cfg.dataset + ".fstar";
    if (!cache_path.empty()) {
      std::ifstream in(cache_path);
      double v = 0.0;
      std::uint64_t evals = 0;
      if (in >> v >> evals) {
        info.known = true;
        info.value = v;
        info.presolve_grad_evals = evals;
        return info;
      }
    }
    info = presolve_minimum(problem);
    if (!cache_path.empty()) {
      std::ofstream out(cache_path);
      if (out) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g %llu\n", info.value,
                      static_cast<unsigned long long>(info.presolve_grad_evals));
        out << buf;
      }
    }
    return info;
  }
  return info;  // zero_chain: unknown
}

struct CellOutcome {
  GridCellResult cell;
  std::vector<RunRecord> records;
  std::optional<std::size_t> epochs_to_target;
  std::optional<std::uint64_t> units_to_target;
};

CellOutcome run_cell(const FiniteSumOracle& problem, const RunConfig& cfg, double gamma,
                     const FstarInfo& fstar) {
  CellOutcome out;
  out.cell.gamma = gamma;
  const std::size_t n = problem.component_count();
  OptimizerRun run(cfg.method, zeros(problem.dimension()));
  OracleTally tally;
  double grad_sq_sum = 0.0;
  const bool have_targets = cfg.eps_grad_sq.has_value() || cfg.eps_gap.has_value();
  bool target_met = false;
  const auto t0 = std::chrono::steady_clock::now();

  for (std::size_t s = 0; s < cfg.epochs; ++s) {
    const Permutation perm = permutation_for_epoch(cfg.shuffle, s, n);
    double f = 0.0;
    ParamVector g;
    try {
      run.run_epoch(problem, perm, gamma, tally);
      g = full_gradient_untallied(problem, run.iterate());
      f = loss(problem, run.iterate());
    } catch (const DivergenceError&) {
      out.cell.status = RunStatus::Diverged;
      break;
    } catch (const NumericFailure&) {
      // overflowing losses/gradients on a too-aggressive stepsize
      out.cell.status = RunStatus::Diverged;
      break;
    }
    if (!(f <= kDivergenceThreshold)) {  // the iterate is bounded but f blew up
      out.cell.status = RunStatus::Diverged;
      break;
    }
    const double gns = norm_sq(g);
    grad_sq_sum += gns;
    const double gap =
        fstar.known ? f - fstar.value : std::numeric_limits<double>::quiet_NaN();
    RunRecord rec;
    rec.epoch = s;
    rec.oracle_units = tally.component_units(n);
    rec.grad_norm_sq = gns;
    rec.loss_gap = gap;
    rec.running_mean_grad_sq = grad_sq_sum / static_cast<double>(s + 1);
    rec.seconds =
        cfg.record_timing
            ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            : 0.0;
    out.records.push_back(rec);
    out.cell.final_loss = f;
    out.cell.final_grad_norm_sq = gns;
    out.cell.oracle_units = rec.oracle_units;

    if (have_targets) {
      bool met = true;
      if (cfg.eps_grad_sq && gns > *cfg.eps_grad_sq) met = false;
      if (cfg.eps_gap && !(fstar.known && gap <= *cfg.eps_gap)) met = false;
      if (met) {
        target_met = true;
        out.epochs_to_target = s + 1;
        out.units_to_target = rec.oracle_units;
        break;
      }
    }
  }

  if (out.cell.status != RunStatus::Diverged && have_targets && !target_met)
    out.cell.status = RunStatus::TargetMiss;
  return out;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg) {
  if (cfg.epochs == 0) throw ContractViolation("epochs must be >= 1");
  const std::unique_ptr<FiniteSumOracle> problem = build_problem(cfg);
  if (cfg.eps_gap && cfg.problem == "zero_chain")
    throw ContractViolation("loss-gap target requires a problem with known f*");

  const FstarInfo fstar = resolve_fstar(cfg, *problem);
  const double L = problem->smoothness().value_or(cfg.L);

  std::vector<double> gammas;
  if (cfg.stepsize.kind == StepsizePolicy::Kind::Grid) {
    gammas = cfg.stepsize.grid.empty()
                 ? default_stepsize_grid(cfg.method, L, problem->component_count())
                 : cfg.stepsize.grid;
  } else if (cfg.stepsize_theory) {
    gammas.push_back(
        theoretical_stepsize_for_method(cfg.method, L, problem->component_count()));
  } else {
    gammas.push_back(theoretical_stepsize(cfg.stepsize, L, problem->component_count()));
  }

  RunResult result;
  result.fstar_known = fstar.known;
  result.fstar = fstar.value;
  result.presolve_grad_evals = fstar.presolve_grad_evals;

  std::optional<std::size_t> best_index;
  std::vector<CellOutcome> outcomes;
  outcomes.reserve(gammas.size());
  for (double gamma : gammas) {
    outcomes.push_back(run_cell(*problem, cfg, gamma, fstar));
    const CellOutcome& oc = outcomes.back();
    result.grid.push_back(oc.cell);
    if (oc.cell.status == RunStatus::Diverged) continue;
    if (!best_index || oc.cell.final_loss < result.grid[*best_index].final_loss)
      best_index = outcomes.size() - 1;
  }

  if (!best_index) {
    result.status = RunStatus::Diverged;
    result.gamma = gammas.front();
    if (!outcomes.empty()) result.records = outcomes.front().records;
    result.epochs_run = result.records.size();
    result.oracle_units = result.records.empty() ? 0 : result.records.back().oracle_units;
  } else {
    const CellOutcome& best = outcomes[*best_index];
    result.status = best.cell.status;
    result.gamma = best.cell.gamma;
    result.records = best.records;
    result.epochs_run = best.records.size();
    result.oracle_units = best.cell.oracle_units;
    result.epochs_to_target = best.epochs_to_target;
    result.units_to_target = best.units_to_target;
    if (gammas.size() > 1) result.best_gamma = best.cell.gamma;
  }

  if (!cfg.out.empty() && !result.records.empty()) {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw std::runtime_error(cfg.out + ": cannot open output file");
    out << emit_csv(result.records);
    if (!out) throw std::runtime_error(cfg.out + ": write error");
  }
  return result;
}

// --------------------------------- summary ----------------------------------

namespace {

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::TargetMiss: return "target_miss";
    case RunStatus::Diverged: return "diverged";
  }
  return "?";
}

}  // namespace

std::string RunResult::summary_json() const {
  nlohmann::json j;
  j["status"] = status_name(status);
  j["gamma"] = gamma;
  j["epochs_run"] = epochs_run;
  j["oracle_units"] = oracle_units;
  if (!records.empty()) {
    j["final"]["grad_norm_sq"] = records.back().grad_norm_sq;
    j["final"]["running_mean_grad_sq"] = records.back().running_mean_grad_sq;
    if (fstar_known) j["final"]["loss_gap"] = records.back().loss_gap;
  }
  if (epochs_to_target) j["epochs_to_target"] = *epochs_to_target;
  else j["epochs_to_target"] = nullptr;
  if (units_to_target) j["units_to_target"] = *units_to_target;
  else j["units_to_target"] = nullptr;
  j["fstar"]["known"] = fstar_known;
  if (fstar_known) j["fstar"]["value"] = fstar;
  j["fstar"]["presolve_grad_evals"] = presolve_grad_evals;
  if (best_gamma) j["best_gamma"] = *best_gamma;
  if (grid.size() > 1) {
    nlohmann::json cells = nlohmann::json::array();
    for (const GridCellResult& c : grid) {
      nlohmann::json cell;
      cell["gamma"] = c.gamma;
      cell["status"] = status_name(c.status);
      cell["final_loss"] = c.final_loss;
      cell["final_grad_norm_sq"] = c.final_grad_norm_sq;
      cell["oracle_units"] = c.oracle_units;
      cells.push_back(cell);
    }
    j["grid"] = cells;
  }
  return j.dump(2);
}

}  // namespace nfg
