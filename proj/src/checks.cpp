#include "nfg/checks.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "nfg/data.hpp"
#include "nfg/optimizers.hpp"
#include "nfg/reference.hpp"
#include "nfg/run.hpp"

namespace nfg {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel_diff(const ParamVector& a, const ParamVector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::fabs(a[k] - b[k]));
    den = std::max({den, std::fabs(a[k]), std::fabs(b[k])});
  }
  return num / std::max(den, 1e-300);
}

const std::vector<ShuffleStrategy> kStrategies = {
    {ShuffleKind::RandomReshuffle, 42},
    {ShuffleKind::ShuffleOnce, 42},
    {ShuffleKind::Cyclic, 0},
};

const char* strategy_name(ShuffleKind k) {
  switch (k) {
    case ShuffleKind::RandomReshuffle: return "rr";
    case ShuffleKind::ShuffleOnce: return "so";
    case ShuffleKind::Cyclic: return "cyclic";
  }
  return "?";
}

// --- 1. epoch-average identity (streaming v_{s+1} vs brute-force mean) ------

CheckResult check_epoch_average() {
  CheckResult res{1, "epoch-average identity (NFG-SVRG vs replay log)", true, ""};
  double worst = 0.0;
  for (std::size_t n : {std::size_t{2}, std::size_t{17}, std::size_t{256}}) {
    for (const ShuffleStrategy& strat : kStrategies) {
      QuadraticProblem prob = make_quadratic_suite(n, 8, 2.0, 0.5, 7 + n);
      NfgSvrgState state(zeros(8));
      OracleTally tally;
      const double gamma = theoretical_stepsize_for_method(Method::NfgSvrg, 2.0, n);
      for (std::size_t s = 0; s < 3; ++s) {
        ReplayLog log;
        nfg_svrg_epoch(state, prob, permutation_for_epoch(strat, s, n), gamma, tally, &log);
        const double diff = rel_diff(state.v, replay_epoch_average(log));
        worst = std::max(worst, diff);
        if (diff > 1e-12) {
          res.passed = false;
          res.detail = "n=" + std::to_string(n) + " " + strategy_name(strat.kind) +
                       " epoch " + std::to_string(s) + ": rel diff " + fmt(diff);
          return res;
        }
      }
    }
  }
  res.detail = "worst rel diff " + fmt(worst) + " (tol 1e-12)";
  return res;
}

// --- 2. telescoping partial sums (NFG-SARAH) --------------------------------

CheckResult check_telescoping() {
  CheckResult res{2, "telescoping identity (NFG-SARAH partial sums)", true, ""};
  double worst = 0.0;
  for (std::size_t n : {std::size_t{2}, std::size_t{17}, std::size_t{256}}) {
    for (const ShuffleStrategy& strat : kStrategies) {
      QuadraticProblem prob = make_quadratic_suite(n, 8, 2.0, 0.5, 11 + n);
      NfgSarahState state(zeros(8));
      OracleTally tally;
      const double gamma = theoretical_stepsize_for_method(Method::NfgSarah, 2.0, n);
      for (std::size_t s = 0; s < 3; ++s) {
        ReplayLog log;
        nfg_sarah_epoch(state, prob, permutation_for_epoch(strat, s, n), gamma, tally, &log);
        // log[t].direction = v_s^t for t = 0..n; walk k downward keeping
        // lhs_k = sum_{t=k}^n v^t and wsum_k = sum_{t=k+1}^n (n-t+1)(g_t - gp_t)
        const std::size_t d = prob.dimension();
        ParamVector lhs = zeros(d), wsum = zeros(d), rhs(d);
        for (std::size_t k = n + 1; k-- > 0;) {
          axpy(lhs, 1.0, log[k].direction);
          if (k < n) {
            const double w = static_cast<double>(n - k);
            for (std::size_t j = 0; j < d; ++j)
              wsum[j] += w * (log[k + 1].grad[j] - log[k + 1].grad_prev[j]);
          }
          const double head = static_cast<double>(n - k + 1);
          for (std::size_t j = 0; j < d; ++j)
            rhs[j] = wsum[j] / static_cast<double>(n) + head * log[k].direction[j];
          const double diff = rel_diff(lhs, rhs);
          worst = std::max(worst, diff);
          if (diff > 1e-12) {
            res.passed = false;
            res.detail = "n=" + std::to_string(n) + " " + strategy_name(strat.kind) +
                         " epoch " + std::to_string(s) + " k=" + std::to_string(k) +
                         ": rel diff " + fmt(diff);
            return res;
          }
        }
      }
    }
  }
  res.detail = "worst rel diff " + fmt(worst) + " (tol 1e-12)";
  return res;
}

// --- 3. oracle accounting ----------------------------------------------------

CheckResult check_oracle_accounting() {
  CheckResult res{3, "per-epoch oracle units {SGD:n, NFG:2n, classic:3n}", true, ""};
  for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{100}}) {
    QuadraticProblem prob = make_quadratic_suite(n, 4, 1.0, 1.0, 3);
    const Permutation perm =
        permutation_for_epoch({ShuffleKind::RandomReshuffle, 5}, 0, n);
    const struct {
      Method m;
      std::uint64_t expect;
    } cases[] = {
        {Method::Sgd, n},          {Method::NfgSvrg, 2 * n}, {Method::NfgSarah, 2 * n},
        {Method::Svrg, 3 * n},     {Method::Sarah, 3 * n},
    };
    for (const auto& c : cases) {
      OptimizerRun run(c.m, zeros(4));
      OracleTally tally;
      run.run_epoch(prob, perm, 1e-3, tally);
      if (tally.component_units(n) != c.expect) {
        res.passed = false;
        res.detail = std::string(method_name(c.m)) + " n=" + std::to_string(n) +
                     ": got " + std::to_string(tally.component_units(n)) + ", want " +
                     std::to_string(c.expect);
        return res;
      }
    }
  }
  res.detail = "exact for n in {1,7,100}";
  return res;
}

// --- 4. memory accounting ----------------------------------------------------

CheckResult check_memory() {
  CheckResult res{4, "state memory: NFG O(d) vectors, SAGA n+1", true, ""};
  for (std::size_t n : {std::size_t{10}, std::size_t{10000}}) {
    NfgSvrgState svrg_state(zeros(4));
    NfgSarahState sarah_state(zeros(4));
    if (svrg_state.vector_count() != 4 || sarah_state.vector_count() != 5) {
      res.passed = false;
      res.detail = "NFG state vector count drifted";
      return res;
    }
    QuadraticProblem prob = make_quadratic_suite(n, 4, 1.0, 1.0, 9);
    SagaMemory memory;
    OracleTally tally;
    memory.initialize(prob, zeros(4), tally);
    if (memory.vector_count() != n + 1) {
      res.passed = false;
      res.detail = "SAGA memory at n=" + std::to_string(n) + ": " +
                   std::to_string(memory.vector_count()) + " vectors, want " +
                   std::to_string(n + 1);
      return res;
    }
  }
  res.detail = "NFG-SVRG 4, NFG-SARAH 5 at n in {10,10000}; SAGA n+1";
  return res;
}

// --- 5. linear rate under strong convexity -----------------------------------

struct LyapunovSeries {
  std::vector<double> delta;
  double contraction = 0.0;  // 1 - gamma mu n_eff / 2
};

template <class State, class EpochFn>
LyapunovSeries lyapunov_run(const QuadraticProblem& prob, State state, EpochFn epoch_fn,
                            double gamma, double n_eff, std::size_t epochs) {
  const std::size_t n = prob.component_count();
  const double fstar = prob.optimal_value();
  const double mu = prob.strong_convexity().value();
  LyapunovSeries out;
  out.contraction = 1.0 - gamma * mu * n_eff / 2.0;
  OracleTally tally;
  ShuffleStrategy strat{ShuffleKind::RandomReshuffle, 19};
  for (std::size_t s = 0; s < epochs; ++s) {
    const ParamVector v_used = state.v;  // estimate in force during epoch s
    epoch_fn(state, prob, permutation_for_epoch(strat, s, n), gamma, tally);
    const double gap = loss(prob, state.x) - fstar;
    out.delta.push_back(gap + 0.1 * gamma * n_eff * norm_sq(v_used));
  }
  return out;
}

CheckResult check_linear_rate() {
  CheckResult res{5, "Lyapunov contraction at theoretical stepsizes", true, ""};
  const std::size_t n = 50, d = 10, epochs = 121;
  for (double L : {1.0, 10.0}) {
    QuadraticProblem prob = make_quadratic_suite(n, d, L, 1.0, 23);
    const double g_svrg = 1.0 / (20.0 * L * static_cast<double>(n));
    const double g_sarah = 1.0 / (20.0 * L * static_cast<double>(n + 1));
    const LyapunovSeries runs[] = {
        lyapunov_run(prob, NfgSvrgState(zeros(d)),
                     [](NfgSvrgState& st, const QuadraticProblem& p, const Permutation& pm,
                        double g, OracleTally& t) { nfg_svrg_epoch(st, p, pm, g, t); },
                     g_svrg, static_cast<double>(n), epochs),
        lyapunov_run(prob, NfgSarahState(zeros(d)),
                     [](NfgSarahState& st, const QuadraticProblem& p, const Permutation& pm,
                        double g, OracleTally& t) { nfg_sarah_epoch(st, p, pm, g, t); },
                     g_sarah, static_cast<double>(n + 1), epochs),
    };
    const char* names[] = {"nfg_svrg", "nfg_sarah"};
    for (int which = 0; which < 2; ++which) {
      const LyapunovSeries& series = runs[which];
      for (std::size_t s = 1; s + 1 < series.delta.size(); ++s) {
        if (!(series.delta[s + 1] <= series.delta[s] * (1.0 + 1e-12))) {
          res.passed = false;
          res.detail = std::string(names[which]) + " L=" + fmt(L) +
                       ": Lyapunov increased at epoch " + std::to_string(s + 1);
          return res;
        }
      }
      const std::size_t last = series.delta.size() - 1;
      const double bound = 1.01 *
                           std::pow(series.contraction, static_cast<double>(last)) *
                           series.delta[1];
      if (!(series.delta[last] <= bound)) {
        res.passed = false;
        res.detail = std::string(names[which]) + " L=" + fmt(L) + ": Delta_S " +
                     fmt(series.delta[last]) + " above bound " + fmt(bound);
        return res;
      }
    }
  }
  res.detail = "non-increasing from epoch 1; rate bound met for L/mu in {1,10}";
  return res;
}

// --- 6. non-convex running-mean trend ----------------------------------------

CheckResult check_nonconvex_trend() {
  CheckResult res{6, "running mean of grad norms follows the O(1/S) trend", true, ""};
  // realizable sigmoid instance: targets generated by a planted parameter, so
  // the gradient norms genuinely decay over the run
  const std::size_t n = 80, d = 15;
  CounterStream stream(31);
  std::vector<ParamVector> rows(n, ParamVector(d));
  const double row_scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& r : rows)
    for (double& v : r) v = row_scale * stream.next_normal();
  ParamVector planted(d);
  for (double& v : planted) v = stream.next_normal();
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i)
    targets[i] = 1.0 / (1.0 + std::exp(-dot(rows[i], planted)));
  SigmoidLsqProblem prob(std::move(rows), std::move(targets));
  const double L = prob.smoothness().value();
  const double gamma = theoretical_stepsize_for_method(Method::NfgSvrg, L, n);
  NfgSvrgState state(zeros(prob.dimension()));
  OracleTally tally;
  ShuffleStrategy strat{ShuffleKind::RandomReshuffle, 37};
  double sum = 0.0, mean20 = 0.0, mean200 = 0.0;
  for (std::size_t s = 0; s < 200; ++s) {
    nfg_svrg_epoch(state, prob, permutation_for_epoch(strat, s, n), gamma, tally);
    sum += norm_sq(full_gradient_untallied(prob, state.x));
    if (s + 1 == 20) mean20 = sum / 20.0;
    if (s + 1 == 200) mean200 = sum / 200.0;
  }
  res.passed = mean200 < 10.0 * mean20;
  res.detail = "mean@200 " + fmt(mean200) + " vs mean@20 " + fmt(mean20) + " (ratio " +
               fmt(mean200 / mean20) + ", require < 10)";
  return res;
}

// --- 7. zero-chain properties -------------------------------------------------

CheckResult check_zero_chain() {
  CheckResult res{7, "zero-chain: prog bound and gradient envelope", true, ""};
  const std::size_t d = 10;
  CounterStream stream(57);
  double max_inf = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = static_cast<std::size_t>(stream.next_below(d + 1));
    ParamVector x = zeros(d);
    const double scale = (trial % 3 == 0) ? 0.3 : (trial % 3 == 1) ? 1.0 : 3.0;
    for (std::size_t k = 0; k < p; ++k) x[k] = scale * stream.next_normal();
    if (p > 0 && x[p - 1] == 0.0) x[p - 1] = scale;
    const ParamVector g = zero_chain_l_gradient(x);
    const double gi = inf_norm(g);
    max_inf = std::max(max_inf, gi);
    if (prog(g) > prog(x) + 1) {
      res.passed = false;
      res.detail = "prog(grad)=" + std::to_string(prog(g)) + " above prog(x)+1=" +
                   std::to_string(prog(x) + 1);
      return res;
    }
    if (x[d - 1] == 0.0 && !(gi >= 1.0)) {
      res.passed = false;
      res.detail = "inf-norm " + fmt(gi) + " below 1 with last coordinate zero";
      return res;
    }
    if (!(gi <= ZeroChainProblem::kChainGradBound)) {
      res.passed = false;
      res.detail = "inf-norm " + fmt(gi) + " above 23";
      return res;
    }
  }
  res.detail = "1000 samples; max inf-norm " + fmt(max_inf) + " <= 23";
  return res;
}

// --- 8. analytic vs finite-difference gradients -------------------------------

CheckResult check_gradients() {
  CheckResult res{8, "analytic gradients match central differences", true, ""};
  const double h = 1e-6, tol = 1e-5;
  double worst = 0.0;
  CounterStream stream(71);

  auto compare = [&](const FiniteSumOracle& prob, const ParamVector& x, std::size_t i) {
    ParamVector g(prob.dimension());
    prob.component_gradient_raw(i, x, g);
    const ParamVector fd = finite_difference_gradient(prob, i, x, h);
    double dev = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      dev = std::max(dev, std::fabs(g[k] - fd[k]));
    worst = std::max(worst, dev);
    return dev <= tol;
  };

  QuadraticProblem quad = make_quadratic_suite(6, 10, 3.0, 0.5, 83);
  SigmoidLsqProblem sig = make_synthetic_sigmoid(6, 15, 89);
  ZeroChainProblem chain(10, 4);
  for (int trial = 0; trial < 100; ++trial) {
    {
      ParamVector x(10);
      for (double& v : x) v = stream.next_normal();
      if (!compare(quad, x, stream.next_below(6))) {
        res.passed = false;
        res.detail = "quadratic deviation " + fmt(worst);
        return res;
      }
    }
    {
      ParamVector x(15);
      for (double& v : x) v = 0.5 * stream.next_normal();
      if (!compare(sig, x, stream.next_below(6))) {
        res.passed = false;
        res.detail = "sigmoid deviation " + fmt(worst);
        return res;
      }
    }
    {
      ParamVector x(10);
      for (double& v : x) {
        do {
          v = stream.next_normal();
        } while (std::fabs(std::fabs(v) - 0.5) < 1e-3);  // keep clear of the psi seam
      }
      if (!compare(chain, x, stream.next_below(4))) {
        res.passed = false;
        res.detail = "zero-chain deviation " + fmt(worst);
        return res;
      }
    }
  }
  res.detail = "300 points, max abs deviation " + fmt(worst) + " (tol 1e-5)";
  return res;
}

// --- 9. determinism -----------------------------------------------------------

CheckResult check_determinism() {
  CheckResult res{9, "identical configs produce byte-identical CSV", true, ""};
  RunConfig cfg;
  cfg.problem = "quadratic";
  cfg.n = 20;
  cfg.d = 5;
  cfg.L = 2.0;
  cfg.mu = 0.5;
  cfg.problem_seed = 12;
  cfg.method = Method::NfgSvrg;
  cfg.shuffle = {ShuffleKind::RandomReshuffle, 7};
  cfg.epochs = 30;
  const std::string a = emit_csv(run_experiment(cfg).records);
  const std::string b = emit_csv(run_experiment(cfg).records);
  res.passed = (a == b);
  res.detail = res.passed ? std::to_string(a.size()) + " bytes, equal"
                          : "outputs differ";
  return res;
}

// --- 10. parser robustness ------------------------------------------------------

CheckResult check_parser() {
  CheckResult res{10, "LIBSVM parser: round-trip, located errors, fuzz", true, ""};
  CounterStream stream(101);
  // round-trip equality on generated datasets
  for (int trial = 0; trial < 100; ++trial) {
    LabeledDataset ds;
    const std::size_t rows = 1 + stream.next_below(12);
    for (std::size_t r = 0; r < rows; ++r) {
      ds.labels.push_back(stream.next_normal());
      std::vector<SparseEntry> row;
      std::uint32_t idx = 0;
      const std::size_t entries = stream.next_below(8);
      for (std::size_t e = 0; e < entries; ++e) {
        idx += 1 + static_cast<std::uint32_t>(stream.next_below(5));
        double val = stream.next_normal() * std::pow(10.0, stream.next_normal());
        row.push_back({idx - 1, val});
        ds.dimension = std::max(ds.dimension, static_cast<std::size_t>(idx));
      }
      ds.rows.push_back(std::move(row));
    }
    const LabeledDataset back = parse_libsvm(serialize_libsvm(ds));
    bool equal = back.size() == ds.size() && back.dimension == ds.dimension;
    for (std::size_t r = 0; equal && r < ds.size(); ++r) {
      equal = back.labels[r] == ds.labels[r] && back.rows[r].size() == ds.rows[r].size();
      for (std::size_t e = 0; equal && e < ds.rows[r].size(); ++e)
        equal = back.rows[r][e].index == ds.rows[r][e].index &&
                back.rows[r][e].value == ds.rows[r][e].value;
    }
    if (!equal) {
      res.passed = false;
      res.detail = "round-trip mismatch on generated dataset";
      return res;
    }
  }
  // located errors on malformed lines
  const char* malformed[] = {
      "",                      // no rows
      "abc 1:2\n",             // bad label
      "1 0:5\n",               // zero index
      "1 2:1 2:3\n",           // non-increasing
      "1 3:1 2:3\n",           // decreasing
      "1 a:2\n",               // bad index
      "1 1:\n",                // missing value
      "1 1:x\n",               // bad value
      "1 1\n",                 // missing colon
      "1 1:inf\n",             // non-finite value
  };
  for (const char* text : malformed) {
    try {
      parse_libsvm(std::string_view(text));
      res.passed = false;
      res.detail = std::string("accepted malformed input: '") + text + "'";
      return res;
    } catch (const ParseError&) {
    }
  }
  // fuzz: parser is total
  const char alphabet[] = "0123456789.:+-eE #\n\t\rabz\x01\x80\xff";
  for (int trial = 0; trial < 10000; ++trial) {
    std::string input;
    const std::size_t len = stream.next_below(60);
    for (std::size_t k = 0; k < len; ++k)
      input += alphabet[stream.next_below(sizeof alphabet - 1)];
    try {
      parse_libsvm(std::string_view(input));
    } catch (const ParseError&) {
    } catch (...) {
      res.passed = false;
      res.detail = "non-ParseError escape on fuzz input";
      return res;
    }
  }
  res.detail = "100 round-trips, 10 located errors, 10000 fuzz inputs";
  return res;
}

// --- 11. tuned vs theoretical, NFG vs classic per oracle unit -------------------

CheckResult check_qualitative_ordering() {
  CheckResult res{11, "tuned > theoretical; NFG matches/beats classic per unit", true, ""};
  // prefer the real dataset when present, else the seeded stand-in
  LabeledDataset ds;
  bool loaded = false;
  for (const char* path : {"data/a9a", "a9a"}) {
    std::ifstream probe(path);
    if (probe) {
      ds = load_libsvm_file(path);
      loaded = true;
      break;
    }
  }
  if (!loaded) ds = parse_libsvm(make_adult_standin_libsvm(2000, 123, 5));
  if (ds.size() > 2000) {
    ds.rows.resize(2000);
    ds.labels.resize(2000);
  }
  SigmoidLsqProblem prob = make_sigmoid_problem(ds);
  const std::size_t n = prob.component_count();
  const double L = prob.smoothness().value();
  const ShuffleStrategy strat{ShuffleKind::RandomReshuffle, 13};

  auto run_for = [&](Method m, double gamma, std::size_t epochs) {
    OptimizerRun run(m, zeros(prob.dimension()));
    OracleTally tally;
    for (std::size_t s = 0; s < epochs; ++s) {
      run.run_epoch(prob, permutation_for_epoch(strat, s, n), gamma, tally);
    }
    return std::pair<double, std::uint64_t>(loss(prob, run.iterate()),
                                            tally.component_units(n));
  };

  // equal budget: 120n units = 60 NFG epochs = 40 classic epochs
  const double g_svrg = theoretical_stepsize_for_method(Method::NfgSvrg, L, n);
  const double g_sarah = theoretical_stepsize_for_method(Method::NfgSarah, L, n);
  const auto [nfg_svrg_loss, u1] = run_for(Method::NfgSvrg, g_svrg, 60);
  const auto [svrg_loss, u2] = run_for(Method::Svrg, g_svrg, 40);
  const auto [nfg_sarah_loss, u3] = run_for(Method::NfgSarah, g_sarah, 60);
  const auto [sarah_loss, u4] = run_for(Method::Sarah, g_sarah, 40);
  if (u1 != u2 || u3 != u4) {
    res.passed = false;
    res.detail = "oracle budgets not matched";
    return res;
  }

  double best_tuned = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0;
  for (double gamma : default_stepsize_grid(Method::NfgSvrg, L, n)) {
    try {
      const auto [l, u] = run_for(Method::NfgSvrg, gamma, 60);
      if (l < best_tuned) {
        best_tuned = l;
        best_gamma = gamma;
      }
    } catch (const DivergenceError&) {
      // grid treats a diverging stepsize as failed
    }
  }

  const bool tuned_wins = best_tuned < nfg_svrg_loss;
  const bool svrg_ok = nfg_svrg_loss <= svrg_loss * 1.05 + 1e-12;
  const bool sarah_ok = nfg_sarah_loss <= sarah_loss * 1.05 + 1e-12;
  res.passed = tuned_wins && svrg_ok && sarah_ok;
  res.detail = "tuned " + fmt(best_tuned) + " (gamma " + fmt(best_gamma) +
               ") vs theory " + fmt(nfg_svrg_loss) + "; nfg/svrg " + fmt(nfg_svrg_loss) +
               "/" + fmt(svrg_loss) + "; nfg/sarah " + fmt(nfg_sarah_loss) + "/" +
               fmt(sarah_loss);
  return res;
}

CheckResult guarded(CheckResult (*fn)(), int id, const char* name) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {id, name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_acceptance_checks() {
  std::vector<CheckResult> out;
  out.push_back(guarded(check_epoch_average, 1, "epoch-average identity"));
  out.push_back(guarded(check_telescoping, 2, "telescoping identity"));
  out.push_back(guarded(check_oracle_accounting, 3, "oracle accounting"));
  out.push_back(guarded(check_memory, 4, "memory accounting"));
  out.push_back(guarded(check_linear_rate, 5, "linear rate"));
  out.push_back(guarded(check_nonconvex_trend, 6, "non-convex trend"));
  out.push_back(guarded(check_zero_chain, 7, "zero-chain properties"));
  out.push_back(guarded(check_gradients, 8, "gradient correctness"));
  out.push_back(guarded(check_determinism, 9, "determinism"));
  out.push_back(guarded(check_parser, 10, "parser robustness"));
  out.push_back(guarded(check_qualitative_ordering, 11, "qualitative ordering"));
  return out;
}

}  // namespace nfg
