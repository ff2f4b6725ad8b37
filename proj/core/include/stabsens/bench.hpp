#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stabsens/stability_sdp.hpp"
#include "stabsens/system_model.hpp"

namespace stabsens {

/// Monte-Carlo benchmark settings. The timing comparison is only
/// meaningful in sequential mode; `parallel` trades that for throughput.
struct BenchConfig {
  int scenarios = 1000;
  std::uint64_t seed = 1;
  std::vector<double> fd_steps = {1e-1, 1e-2, 1e-3};
  double eps = kDefaultEps;
  double tol = kDefaultTol;
  double eta_bar = 0.0;
  bool exclude_degenerate = true;
  bool parallel = false;
  int max_threads = 0;  // 0 = hardware concurrency; STABSENS_THREADS caps it
};

struct ScenarioRecord {
  Eigen::VectorXd d;
  double eta = 0.0;
  SolveStatus status = SolveStatus::NumericalTrouble;
  bool degenerate = false;
  bool constraint_ok = false;  // eta < eta_bar
  Eigen::VectorXd analytic;
  std::vector<Eigen::VectorXd> fd_values;  // one vector per fd step
  double t_solve_s = 0.0;                  // base SDP solve
  double t_analytic_s = 0.0;               // analytic sensitivity extraction
  std::vector<double> t_fd_s;              // perturbed solves, per fd step
};

struct BenchReport {
  int n = 0;
  std::vector<std::string> param_names;
  BenchConfig config;
  std::vector<ScenarioRecord> records;

  int n_degenerate = 0;
  int n_nonoptimal = 0;
  int alpha_excluded = 0;  // (scenario, param) pairs dropped from alpha

  /// accuracy degree in percent, alpha(step, param).
  Eigen::MatrixXd alpha;
  /// median of |analytic - fd| pooled over (scenario, param), per step.
  std::vector<double> median_abs_dev;

  double t_cpu_analytic_s = 0.0;   // sum of base solve + analytic extraction
  std::vector<double> t_cpu_fd_s;  // per step: base solve + perturbed solves
  std::vector<double> r_t;         // per step: (fd - analytic) / fd
};

/// Accuracy degree in percent: (1 - mean_i |a_i - n_i| / |a_i|) * 100.
/// Entries with a_i = 0 or non-finite n_i are excluded (reported through
/// excluded_count when given); throws when nothing remains.
double accuracy_degree(const std::vector<double>& analytic,
                       const std::vector<double>& numerical,
                       int* excluded_count = nullptr);

/// Runs the full scenario study: one SDP solve plus analytic parameter
/// sensitivities per scenario, then forward-difference sensitivities for
/// every configured step reusing the base solve. Deterministic for a fixed
/// seed (timings aside), independent of thread count.
BenchReport run_bench(const ParametricJacobian& pj, const BenchConfig& cfg);

}  // namespace stabsens
