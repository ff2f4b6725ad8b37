#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stabsens/errors.hpp"
#include "stabsens/symmetric.hpp"

namespace stabsens {

/// Linearized descriptor model: the state block couples to algebraic
/// variables through B, C, D. Units are per-unit deviations, time in
/// seconds. D must be nonsingular for the reduction to an ODE.
struct DescriptorSystem {
  Eigen::MatrixXd A;  // n_x x n_x
  Eigen::MatrixXd B;  // n_x x n_y
  Eigen::MatrixXd C;  // n_y x n_x
  Eigen::MatrixXd D;  // n_y x n_y
};

/// Eliminates the algebraic variables: J = A - B D^{-1} C, computed with a
/// factor-and-solve of D. Throws SingularAlgebraicBlock when the reciprocal
/// condition estimate of D falls below 1e-12.
Eigen::MatrixXd reduce(const DescriptorSystem& sys);

/// One controllable direction of an affine Jacobian family.
struct JacobianMode {
  std::string name;
  Eigen::MatrixXd coefficient;  // dJ/dd_k, same size as J0
  double lo = 0.0;
  double hi = 0.0;
};

/// Affine Jacobian family J(d) = J0 + sum_k d_k * M_k with named parameters
/// and box bounds used by the scenario generator. `d` holds the current
/// parameter values.
struct ParametricJacobian {
  Eigen::MatrixXd J0;
  std::vector<JacobianMode> modes;
  Eigen::VectorXd d;

  int dim() const { return static_cast<int>(J0.rows()); }
  int param_count() const { return static_cast<int>(modes.size()); }

  /// Checks block dimensions and bound ordering; throws on violation.
  void validate() const;
};

Eigen::MatrixXd jacobian_at(const ParametricJacobian& pj,
                            const Eigen::Ref<const Eigen::VectorXd>& d);

/// dJ/dd_k, exact for the affine family (returns M_k).
const Eigen::MatrixXd& djacobian(const ParametricJacobian& pj, int k);

/// Solution of the classical Lyapunov test.
struct LyapunovSolution {
  SymMatrix phi;
  bool positive_definite = false;
};

/// Solves -J^T Phi - Phi J + xi I = 0 for the unique symmetric Phi (xi < 0)
/// and reports whether Phi is positive definite (LDLT factorization). The
/// system is asymptotically stable iff positive_definite. Throws
/// DegenerateSpectrum when the Lyapunov operator is singular.
LyapunovSolution solve_lyapunov(const Eigen::Ref<const Eigen::MatrixXd>& J,
                                double xi);

/// Simulated trajectory of dx/dt = J x with the Lyapunov value
/// L(t) = x(t)^T Phi x(t) recorded at every sample.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;  // one row per sample
  Eigen::VectorXd lyapunov_values;
  /// Samples violating L(t) <= L(0) e^{eta t} (1 + 1e-6); only counted
  /// when eta < 0.
  int bound_violations = 0;
};

/// Integrates dx/dt = J x with the classical fixed-step 4th-order scheme.
/// The step is adjusted to the nearest divisor of t_end not exceeding dt so
/// the final sample lands exactly on t_end.
Trajectory simulate_decay(const Eigen::Ref<const Eigen::MatrixXd>& J,
                          const SymMatrix& phi, double eta,
                          const Eigen::Ref<const Eigen::VectorXd>& x0,
                          double t_end, double dt);

/// Deterministic Monte-Carlo parameter scenarios: uniform samples of each
/// d_k in [lo_k, hi_k]. Identical seed gives identical sequences.
std::vector<Eigen::VectorXd> scenario_gen(const ParametricJacobian& pj,
                                          int count, std::uint64_t seed);

/// Synthetic "droop grid" test family: J0 = -L - 0.5 I with L the Laplacian
/// of a random connected graph with asymmetric edge weights, and one
/// damping mode M_k = -e_b e_b^T per battery bus, d_k in [0.1, 2.0].
/// Battery buses are spread evenly over the nodes. Stable for every d >= 0
/// by Gershgorin. Asymmetric weights keep the SDP optimum non-degenerate,
/// matching the structure of reduced network Jacobians.
ParametricJacobian make_droop_grid(int n, int battery_count,
                                   std::uint64_t seed);

}  // namespace stabsens
