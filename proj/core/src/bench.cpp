#include "stabsens/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "stabsens/sensitivity.hpp"

namespace stabsens {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int effective_threads(const BenchConfig& cfg) {
  int threads = cfg.max_threads > 0
                    ? cfg.max_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("STABSENS_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) threads = std::min(threads, limit);
  }
  return std::max(threads, 1);
}

ScenarioRecord evaluate_scenario(const ParametricJacobian& pj,
                                 const BenchConfig& cfg,
                                 const Eigen::VectorXd& d) {
  const int p = pj.param_count();
  ScenarioRecord rec;
  rec.d = d;
  rec.fd_values.assign(cfg.fd_steps.size(),
                       Eigen::VectorXd::Constant(
                           p, std::numeric_limits<double>::quiet_NaN()));
  rec.t_fd_s.assign(cfg.fd_steps.size(), 0.0);

  const Eigen::MatrixXd J = jacobian_at(pj, d);
  const StabilityCertificate cert = stability_index(J, cfg.eps, cfg.tol);
  rec.eta = cert.eta;
  rec.status = cert.status;
  rec.t_solve_s = cert.solve_time_s;
  if (cert.status != SolveStatus::Optimal) return rec;

  rec.constraint_ok = cert.eta < cfg.eta_bar;

  ParametricJacobian at_point = pj;
  at_point.d = d;
  const SensitivityReport analytic = sens_params(cert, at_point);
  rec.analytic = analytic.d_eta_d_params;
  rec.degenerate = analytic.degenerate;
  rec.t_analytic_s = analytic.elapsed_s;

  // Forward differences reuse the base solve: p extra solves per step.
  for (std::size_t s = 0; s < cfg.fd_steps.size(); ++s) {
    const double h = cfg.fd_steps[s];
    for (int k = 0; k < p; ++k) {
      Eigen::VectorXd d_hi = d;
      d_hi[k] += h;
      const StabilityCertificate perturbed =
          stability_index(jacobian_at(pj, d_hi), cfg.eps, cfg.tol);
      rec.t_fd_s[s] += perturbed.solve_time_s;
      if (perturbed.status == SolveStatus::Optimal) {
        rec.fd_values[s][k] = (perturbed.eta - cert.eta) / h;
      }
    }
  }
  return rec;
}

}  // namespace

double accuracy_degree(const std::vector<double>& analytic,
                       const std::vector<double>& numerical,
                       int* excluded_count) {
  if (analytic.empty() || analytic.size() != numerical.size()) {
    throw ConfigError(
        "accuracy_degree: inputs must be nonempty and of equal length");
  }
  double acc = 0.0;
  int used = 0;
  int excluded = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (analytic[i] == 0.0 || !std::isfinite(analytic[i]) ||
        !std::isfinite(numerical[i])) {
      ++excluded;
      continue;
    }
    acc += std::abs(analytic[i] - numerical[i]) / std::abs(analytic[i]);
    ++used;
  }
  if (excluded_count != nullptr) *excluded_count = excluded;
  if (used == 0) {
    throw ConfigError("accuracy_degree: every entry was excluded");
  }
  return (1.0 - acc / used) * 100.0;
}

BenchReport run_bench(const ParametricJacobian& pj, const BenchConfig& cfg) {
  pj.validate();
  if (cfg.scenarios < 1) throw ConfigError("run_bench: scenarios must be >= 1");
  if (cfg.fd_steps.empty()) throw ConfigError("run_bench: fd_steps is empty");
  for (double h : cfg.fd_steps) {
    if (!(h > 0.0)) throw ConfigError("run_bench: fd steps must be positive");
  }

  const int p = pj.param_count();
  const std::size_t n_steps = cfg.fd_steps.size();
  const std::vector<Eigen::VectorXd> scenarios =
      scenario_gen(pj, cfg.scenarios, cfg.seed);

  BenchReport report;
  report.n = pj.dim();
  report.config = cfg;
  for (const auto& mode : pj.modes) report.param_names.push_back(mode.name);
  report.records.resize(scenarios.size());

  if (cfg.parallel) {
    const int threads =
        std::min<int>(effective_threads(cfg),
                      static_cast<int>(scenarios.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t s = next.fetch_add(1); s < scenarios.size();
             s = next.fetch_add(1)) {
          report.records[s] = evaluate_scenario(pj, cfg, scenarios[s]);
        }
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      report.records[s] = evaluate_scenario(pj, cfg, scenarios[s]);
    }
  }

  // Aggregation runs in scenario order, so results do not depend on the
  // thread schedule.
  report.t_cpu_fd_s.assign(n_steps, 0.0);
  report.r_t.assign(n_steps, 0.0);
  report.median_abs_dev.assign(n_steps, 0.0);
  report.alpha.resize(static_cast<Eigen::Index>(n_steps), p);

  std::vector<std::vector<std::vector<double>>> a_lists(
      n_steps, std::vector<std::vector<double>>(p));
  std::vector<std::vector<std::vector<double>>> n_lists = a_lists;
  std::vector<std::vector<double>> devs(n_steps);

  int included = 0;
  for (const ScenarioRecord& rec : report.records) {
    if (rec.status != SolveStatus::Optimal) {
      ++report.n_nonoptimal;
      continue;
    }
    if (rec.degenerate) ++report.n_degenerate;
    report.t_cpu_analytic_s += rec.t_solve_s + rec.t_analytic_s;
    for (std::size_t s = 0; s < n_steps; ++s) {
      report.t_cpu_fd_s[s] += rec.t_solve_s + rec.t_fd_s[s];
    }
    if (cfg.exclude_degenerate && rec.degenerate) continue;
    ++included;
    for (std::size_t s = 0; s < n_steps; ++s) {
      for (int k = 0; k < p; ++k) {
        a_lists[s][k].push_back(rec.analytic[k]);
        n_lists[s][k].push_back(rec.fd_values[s][k]);
        if (std::isfinite(rec.fd_values[s][k])) {
          devs[s].push_back(std::abs(rec.analytic[k] - rec.fd_values[s][k]));
        }
      }
    }
  }
  if (included == 0) {
    throw Error("run_bench: no usable scenarios (all non-optimal or "
                "degenerate)");
  }

  for (std::size_t s = 0; s < n_steps; ++s) {
    for (int k = 0; k < p; ++k) {
      int excluded = 0;
      report.alpha(static_cast<Eigen::Index>(s), k) =
          accuracy_degree(a_lists[s][k], n_lists[s][k], &excluded);
      report.alpha_excluded += excluded;
    }
    report.median_abs_dev[s] = median(devs[s]);
    report.r_t[s] =
        report.t_cpu_fd_s[s] > 0.0
            ? (report.t_cpu_fd_s[s] - report.t_cpu_analytic_s) /
                  report.t_cpu_fd_s[s]
            : 0.0;
  }
  return report;
}

}  // namespace stabsens
