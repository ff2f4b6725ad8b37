#pragma once

#include <string>

#include <Eigen/Core>

#include "stabsens/bench.hpp"
#include "stabsens/sensitivity.hpp"
#include "stabsens/stability_sdp.hpp"
#include "stabsens/system_model.hpp"

namespace stabsens::io {

/// Loads a system file and returns the (reduced) Jacobian. The file holds
/// either {"J": [[...]]} or descriptor blocks {"A", "B", "C", "D"}; in the
/// latter case the algebraic variables are eliminated. Matrices are
/// row-major arrays of arrays; NaN/Inf are rejected.
Eigen::MatrixXd load_system_matrix(const std::string& path);

/// Loads an affine parametric family:
/// {"J0": [[...]], "params": [{"name", "M", "lo", "hi"}, ...]}.
ParametricJacobian load_parametric(const std::string& path);

/// Loads a JSON array of reals.
Eigen::VectorXd load_vector(const std::string& path);

std::string certificate_to_json(const StabilityCertificate& cert);
std::string sensitivity_to_json(const SensitivityReport& report);
std::string lyapunov_to_json(const LyapunovSolution& sol, double xi);
std::string trajectory_to_json(const Trajectory& traj, double eta);
std::string check_to_json(const StabilityCertificate& cert, double eta_bar,
                          bool satisfied);
std::string bench_to_json(const BenchReport& report);
std::string bench_to_csv(const BenchReport& report);

}  // namespace stabsens::io
