#pragma once

#include <Eigen/Core>

#include "stabsens/sensitivity.hpp"
#include "stabsens/stability_sdp.hpp"
#include "stabsens/system_model.hpp"

namespace stabsens {

enum class FdScheme { Forward, Central };

/// Numerical-perturbation settings. The forward scheme is the classical
/// baseline (eta(d + eps_p e_k) - eta(d)) / eps_p; the central scheme is
/// the higher-order oracle used for validation. With relative_step the
/// step is scaled by max(1, |value|) of the perturbed quantity.
struct FdConfig {
  double eps_p = 1e-3;
  FdScheme scheme = FdScheme::Forward;
  bool relative_step = false;
};

struct FdSample {
  double value = 0.0;
  int solve_count = 0;
  double solve_time_s = 0.0;
};

struct FdVectorReport {
  Eigen::VectorXd values;
  int solve_count = 0;
  double solve_time_s = 0.0;
};

struct FdMatrixReport {
  Eigen::MatrixXd values;
  int solve_count = 0;
  double solve_time_s = 0.0;
};

/// d eta / d d_k by numerical perturbation; two fresh SDP solves.
/// Non-Optimal inner solves propagate as StatusNotOptimal.
FdSample fd_sens_param(const ParametricJacobian& pj,
                       const Eigen::Ref<const Eigen::VectorXd>& d, int k,
                       const FdConfig& cfg, double eps = kDefaultEps,
                       double tol = kDefaultTol);

/// All parameters at once. The forward scheme shares one base solve, for
/// exactly p + 1 solves; the central scheme needs 2p.
FdVectorReport fd_sens_params(const ParametricJacobian& pj,
                              const Eigen::Ref<const Eigen::VectorXd>& d,
                              const FdConfig& cfg, double eps = kDefaultEps,
                              double tol = kDefaultTol);

/// d eta / d J(i, j) by numerical perturbation of a single entry.
FdSample fd_sens_entry(const Eigen::Ref<const Eigen::MatrixXd>& J, int i,
                       int j, const FdConfig& cfg, double eps = kDefaultEps,
                       double tol = kDefaultTol);

/// All n^2 entry perturbations (n^2 + 1 solves forward, 2 n^2 central).
FdMatrixReport fd_sens_matrix(const Eigen::Ref<const Eigen::MatrixXd>& J,
                              const FdConfig& cfg, double eps = kDefaultEps,
                              double tol = kDefaultTol);

}  // namespace stabsens
