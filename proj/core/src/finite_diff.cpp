#include "stabsens/finite_diff.hpp"

#include <cmath>
#include <string>

namespace stabsens {

namespace {

void check_config(const FdConfig& cfg) {
  if (!(cfg.eps_p > 0.0)) {
    throw ConfigError("finite_diff: eps_p must be positive");
  }
}

double solved_eta(const Eigen::MatrixXd& J, double eps, double tol,
                  const std::string& context, int& solves, double& time_s) {
  const StabilityCertificate cert = stability_index(J, eps, tol);
  ++solves;
  time_s += cert.solve_time_s;
  if (cert.status != SolveStatus::Optimal) {
    throw StatusNotOptimal("finite_diff: inner solve (" + context +
                           ") ended with status " + to_string(cert.status));
  }
  return cert.eta;
}

double effective_step(const FdConfig& cfg, double value) {
  return cfg.relative_step ? cfg.eps_p * std::max(1.0, std::abs(value))
                           : cfg.eps_p;
}

}  // namespace

FdSample fd_sens_param(const ParametricJacobian& pj,
                       const Eigen::Ref<const Eigen::VectorXd>& d, int k,
                       const FdConfig& cfg, double eps, double tol) {
  check_config(cfg);
  if (k < 0 || k >= pj.param_count()) {
    throw DimensionError("fd_sens_param: parameter index out of range");
  }
  const double h = effective_step(cfg, d[k]);
  FdSample out;
  Eigen::VectorXd d_hi = d;
  d_hi[k] += h;
  const double eta_hi = solved_eta(jacobian_at(pj, d_hi), eps, tol,
                                   "d_" + std::to_string(k) + " + step",
                                   out.solve_count, out.solve_time_s);
  Eigen::VectorXd d_lo = d;
  if (cfg.scheme == FdScheme::Central) d_lo[k] -= h;
  const double eta_lo = solved_eta(jacobian_at(pj, d_lo), eps, tol,
                                   "d_" + std::to_string(k) + " base",
                                   out.solve_count, out.solve_time_s);
  out.value = (eta_hi - eta_lo) /
              (cfg.scheme == FdScheme::Central ? 2.0 * h : h);
  return out;
}

FdVectorReport fd_sens_params(const ParametricJacobian& pj,
                              const Eigen::Ref<const Eigen::VectorXd>& d,
                              const FdConfig& cfg, double eps, double tol) {
  check_config(cfg);
  if (d.size() != pj.param_count()) {
    throw DimensionError("fd_sens_params: d length mismatch");
  }
  const int p = pj.param_count();
  FdVectorReport out;
  out.values.resize(p);

  double eta_base = 0.0;
  if (cfg.scheme == FdScheme::Forward) {
    eta_base = solved_eta(jacobian_at(pj, d), eps, tol, "base",
                          out.solve_count, out.solve_time_s);
  }
  for (int k = 0; k < p; ++k) {
    const double h = effective_step(cfg, d[k]);
    Eigen::VectorXd d_hi = d;
    d_hi[k] += h;
    const double eta_hi = solved_eta(jacobian_at(pj, d_hi), eps, tol,
                                     "d_" + std::to_string(k) + " + step",
                                     out.solve_count, out.solve_time_s);
    if (cfg.scheme == FdScheme::Forward) {
      out.values[k] = (eta_hi - eta_base) / h;
    } else {
      Eigen::VectorXd d_lo = d;
      d_lo[k] -= h;
      const double eta_lo = solved_eta(jacobian_at(pj, d_lo), eps, tol,
                                       "d_" + std::to_string(k) + " - step",
                                       out.solve_count, out.solve_time_s);
      out.values[k] = (eta_hi - eta_lo) / (2.0 * h);
    }
  }
  return out;
}

FdSample fd_sens_entry(const Eigen::Ref<const Eigen::MatrixXd>& J, int i,
                       int j, const FdConfig& cfg, double eps, double tol) {
  check_config(cfg);
  const int n = static_cast<int>(J.rows());
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw DimensionError("fd_sens_entry: entry index out of range");
  }
  const double h = effective_step(cfg, J(i, j));
  FdSample out;
  Eigen::MatrixXd j_hi = J;
  j_hi(i, j) += h;
  const double eta_hi = solved_eta(j_hi, eps, tol, "entry + step",
                                   out.solve_count, out.solve_time_s);
  Eigen::MatrixXd j_lo = J;
  if (cfg.scheme == FdScheme::Central) j_lo(i, j) -= h;
  const double eta_lo = solved_eta(j_lo, eps, tol, "entry base",
                                   out.solve_count, out.solve_time_s);
  out.value = (eta_hi - eta_lo) /
              (cfg.scheme == FdScheme::Central ? 2.0 * h : h);
  return out;
}

FdMatrixReport fd_sens_matrix(const Eigen::Ref<const Eigen::MatrixXd>& J,
                              const FdConfig& cfg, double eps, double tol) {
  check_config(cfg);
  const int n = static_cast<int>(J.rows());
  FdMatrixReport out;
  out.values.resize(n, n);

  double eta_base = 0.0;
  if (cfg.scheme == FdScheme::Forward) {
    eta_base = solved_eta(J, eps, tol, "base", out.solve_count,
                          out.solve_time_s);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double h = effective_step(cfg, J(i, j));
      Eigen::MatrixXd j_hi = J;
      j_hi(i, j) += h;
      const double eta_hi = solved_eta(j_hi, eps, tol, "entry + step",
                                       out.solve_count, out.solve_time_s);
      if (cfg.scheme == FdScheme::Forward) {
        out.values(i, j) = (eta_hi - eta_base) / h;
      } else {
        Eigen::MatrixXd j_lo = J;
        j_lo(i, j) -= h;
        const double eta_lo = solved_eta(j_lo, eps, tol, "entry - step",
                                         out.solve_count, out.solve_time_s);
        out.values(i, j) = (eta_hi - eta_lo) / (2.0 * h);
      }
    }
  }
  return out;
}

}  // namespace stabsens
