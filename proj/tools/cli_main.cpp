#include "cli_main.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabsens/stabsens.hpp"

namespace stabsens_cli {

namespace {

using namespace stabsens;

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload << std::endl;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw ConfigError("cannot write output file '" + out_path + "'");
  }
  out << payload << "\n";
}

struct CommonOpts {
  double eps = kDefaultEps;
  double tol = kDefaultTol;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--eps", opts->eps, "Lower-bound margin of the certificate")
      ->check(CLI::Range(1e-300, 1.0));
  cmd->add_option("--tol", opts->tol, "Solver tolerance (>= 1e-10)");
  cmd->add_option("--out", opts->out, "Output file (default: stdout)");
}

SensitivityReport fd_matrix_report(const Eigen::MatrixXd& J, FdScheme scheme,
                                   double step, double eps, double tol) {
  FdConfig cfg;
  cfg.scheme = scheme;
  cfg.eps_p = step;
  const FdMatrixReport fd = fd_sens_matrix(J, cfg, eps, tol);
  SensitivityReport report;
  report.method = scheme == FdScheme::Forward ? SensMethod::ForwardFD
                                              : SensMethod::CentralFD;
  report.d_eta_d_J = fd.values;
  report.elapsed_s = fd.solve_time_s;
  return report;
}

SensitivityReport fd_params_report(const ParametricJacobian& pj,
                                   FdScheme scheme, double step, double eps,
                                   double tol) {
  FdConfig cfg;
  cfg.scheme = scheme;
  cfg.eps_p = step;
  const FdVectorReport fd = fd_sens_params(pj, pj.d, cfg, eps, tol);
  SensitivityReport report;
  report.method = scheme == FdScheme::Forward ? SensMethod::ForwardFD
                                              : SensMethod::CentralFD;
  report.d_eta_d_params = fd.values;
  for (const auto& mode : pj.modes) report.param_names.push_back(mode.name);
  report.elapsed_s = fd.solve_time_s;
  return report;
}

StabilityCertificate solved_or_throw(const Eigen::MatrixXd& J, double eps,
                                     double tol) {
  StabilityCertificate cert = stability_index(J, eps, tol);
  if (cert.status != SolveStatus::Optimal) {
    throw StatusNotOptimal("solve ended with status " +
                           to_string(cert.status));
  }
  return cert;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Lyapunov-SDP stability index and analytic sensitivities"};
  app.require_subcommand(1);

  // index
  auto* index_cmd =
      app.add_subcommand("index", "Solve the stability SDP for a system");
  std::string index_system;
  CommonOpts index_opts;
  index_cmd->add_option("--system", index_system, "System JSON file")
      ->required();
  add_common(index_cmd, &index_opts);

  // lyap
  auto* lyap_cmd = app.add_subcommand(
      "lyap", "Classical Lyapunov-equation stability test");
  std::string lyap_system;
  double lyap_xi = -1.0;
  std::string lyap_out;
  lyap_cmd->add_option("--system", lyap_system, "System JSON file")
      ->required();
  lyap_cmd->add_option("--xi", lyap_xi, "Negative right-hand-side scale");
  lyap_cmd->add_option("--out", lyap_out, "Output file (default: stdout)");

  // sens
  auto* sens_cmd = app.add_subcommand(
      "sens", "Stability-index sensitivities (analytic or perturbation)");
  std::string sens_system, sens_model, sens_method = "analytic";
  std::vector<double> sens_at;
  std::vector<int> sens_entry_idx;
  double sens_fd_step = 1e-3;
  CommonOpts sens_opts;
  sens_cmd->add_option("--system", sens_system,
                       "System JSON file (entry sensitivities)");
  sens_cmd->add_option("--model", sens_model,
                       "Parametric JSON file (parameter sensitivities)");
  sens_cmd->add_option("--at", sens_at, "Parameter vector d (default: file)")
      ->delimiter(',');
  sens_cmd
      ->add_option("--method", sens_method,
                   "analytic | fd (forward) | central")
      ->check(CLI::IsMember({"analytic", "fd", "central"}));
  sens_cmd->add_option("--fd-step", sens_fd_step,
                       "Perturbation step for fd/central");
  sens_cmd
      ->add_option("--entry", sens_entry_idx,
                   "Single entry i,j of J (0-based, requires --system)")
      ->delimiter(',')
      ->expected(2);
  add_common(sens_cmd, &sens_opts);

  // simulate
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Integrate dx/dt = J x and check the decay bound");
  std::string sim_system, sim_x0;
  double sim_t_end = 10.0, sim_dt = 0.01;
  CommonOpts sim_opts;
  sim_cmd->add_option("--system", sim_system, "System JSON file")->required();
  sim_cmd->add_option("--x0", sim_x0, "Initial state JSON file")->required();
  sim_cmd->add_option("--t-end", sim_t_end, "End time in seconds");
  sim_cmd->add_option("--dt", sim_dt, "Step size in seconds");
  add_common(sim_cmd, &sim_opts);

  // check
  auto* check_cmd = app.add_subcommand(
      "check", "Evaluate the stability constraint eta < eta_bar");
  std::string check_system;
  double check_eta_bar = 0.0;
  CommonOpts check_opts;
  check_cmd->add_option("--system", check_system, "System JSON file")
      ->required();
  check_cmd->add_option("--eta-bar", check_eta_bar, "Constraint threshold")
      ->required();
  add_common(check_cmd, &check_opts);

  // bench
  auto* bench_cmd = app.add_subcommand(
      "bench", "Monte-Carlo accuracy/timing study on a parametric model");
  std::string bench_model, bench_csv;
  BenchConfig bench_cfg;
  CommonOpts bench_opts;
  bench_cmd->add_option("--model", bench_model, "Parametric JSON file")
      ->required();
  bench_cmd->add_option("--scenarios", bench_cfg.scenarios,
                        "Number of Monte-Carlo scenarios");
  bench_cmd->add_option("--seed", bench_cfg.seed, "Scenario seed");
  bench_cmd->add_option("--fd-steps", bench_cfg.fd_steps,
                        "Forward-difference steps")
      ->delimiter(',');
  bench_cmd->add_option("--eta-bar", bench_cfg.eta_bar,
                        "Constraint threshold recorded per scenario");
  bench_cmd->add_flag("--parallel", bench_cfg.parallel,
                      "Evaluate scenarios concurrently (disables the "
                      "timing comparison)");
  bench_cmd->add_flag_function(
      "--include-degenerate",
      [&](std::int64_t) { bench_cfg.exclude_degenerate = false; },
      "Keep degenerate scenarios in the accuracy statistics");
  bench_cmd->add_option("--csv", bench_csv, "Also write per-scenario CSV");
  add_common(bench_cmd, &bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  }

  try {
    if (*index_cmd) {
      const Eigen::MatrixXd J = io::load_system_matrix(index_system);
      const StabilityCertificate cert =
          stability_index(J, index_opts.eps, index_opts.tol);
      emit(io::certificate_to_json(cert), index_opts.out);
    } else if (*lyap_cmd) {
      const Eigen::MatrixXd J = io::load_system_matrix(lyap_system);
      const LyapunovSolution sol = solve_lyapunov(J, lyap_xi);
      emit(io::lyapunov_to_json(sol, lyap_xi), lyap_out);
    } else if (*sens_cmd) {
      if (sens_system.empty() == sens_model.empty()) {
        std::cerr << "sens: exactly one of --system / --model is required"
                  << std::endl;
        return 1;
      }
      const FdScheme scheme =
          sens_method == "fd" ? FdScheme::Forward : FdScheme::Central;
      SensitivityReport report;
      if (!sens_system.empty()) {
        if (!sens_at.empty()) {
          std::cerr << "sens: --at requires --model" << std::endl;
          return 1;
        }
        const Eigen::MatrixXd J = io::load_system_matrix(sens_system);
        if (!sens_entry_idx.empty()) {
          const int i = sens_entry_idx[0], j = sens_entry_idx[1];
          if (sens_method == "analytic") {
            const StabilityCertificate cert =
                solved_or_throw(J, sens_opts.eps, sens_opts.tol);
            const EntrySensitivity e = sens_entry(cert, J, i, j);
            report.method = SensMethod::Analytic;
            report.d_eta_d_J = Eigen::MatrixXd::Constant(1, 1, e.value);
            report.degenerate = e.degenerate;
            report.cond_estimate = e.cond_estimate;
          } else {
            FdConfig cfg;
            cfg.scheme = scheme;
            cfg.eps_p = sens_fd_step;
            const FdSample s =
                fd_sens_entry(J, i, j, cfg, sens_opts.eps, sens_opts.tol);
            report.method = scheme == FdScheme::Forward
                                ? SensMethod::ForwardFD
                                : SensMethod::CentralFD;
            report.d_eta_d_J = Eigen::MatrixXd::Constant(1, 1, s.value);
            report.elapsed_s = s.solve_time_s;
          }
        } else if (sens_method == "analytic") {
          const StabilityCertificate cert =
              solved_or_throw(J, sens_opts.eps, sens_opts.tol);
          report = sens_matrix(cert, J);
        } else {
          report = fd_matrix_report(J, scheme, sens_fd_step, sens_opts.eps,
                                    sens_opts.tol);
        }
      } else {
        if (!sens_entry_idx.empty()) {
          std::cerr << "sens: --entry requires --system" << std::endl;
          return 1;
        }
        ParametricJacobian pj = io::load_parametric(sens_model);
        if (!sens_at.empty()) {
          if (static_cast<int>(sens_at.size()) != pj.param_count()) {
            std::cerr << "sens: --at needs " << pj.param_count() << " values"
                      << std::endl;
            return 1;
          }
          pj.d = Eigen::Map<const Eigen::VectorXd>(
              sens_at.data(), static_cast<Eigen::Index>(sens_at.size()));
        }
        if (sens_method == "analytic") {
          const StabilityCertificate cert = solved_or_throw(
              jacobian_at(pj, pj.d), sens_opts.eps, sens_opts.tol);
          report = sens_params(cert, pj);
        } else {
          report = fd_params_report(pj, scheme, sens_fd_step, sens_opts.eps,
                                    sens_opts.tol);
        }
      }
      emit(io::sensitivity_to_json(report), sens_opts.out);
    } else if (*sim_cmd) {
      const Eigen::MatrixXd J = io::load_system_matrix(sim_system);
      const Eigen::VectorXd x0 = io::load_vector(sim_x0);
      const StabilityCertificate cert =
          solved_or_throw(J, sim_opts.eps, sim_opts.tol);
      const Trajectory traj =
          simulate_decay(J, cert.phi, cert.eta, x0, sim_t_end, sim_dt);
      emit(io::trajectory_to_json(traj, cert.eta), sim_opts.out);
    } else if (*check_cmd) {
      const Eigen::MatrixXd J = io::load_system_matrix(check_system);
      const StabilityCertificate cert =
          stability_index(J, check_opts.eps, check_opts.tol);
      const bool ok = check_constraint(cert, check_eta_bar);
      emit(io::check_to_json(cert, check_eta_bar, ok), check_opts.out);
    } else if (*bench_cmd) {
      const ParametricJacobian pj = io::load_parametric(bench_model);
      bench_cfg.eps = bench_opts.eps;
      bench_cfg.tol = bench_opts.tol;
      const BenchReport report = run_bench(pj, bench_cfg);
      emit(io::bench_to_json(report), bench_opts.out);
      if (!bench_csv.empty()) {
        std::ofstream csv(bench_csv);
        if (!csv) {
          throw ConfigError("cannot write CSV file '" + bench_csv + "'");
        }
        csv << io::bench_to_csv(report);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}

}  // namespace stabsens_cli
