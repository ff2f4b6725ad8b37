#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "stabsens/stability_sdp.hpp"
#include "stabsens/system_model.hpp"

namespace stabsens {

/// Residual threshold below which a point is accepted as an optimum for
/// sensitivity extraction.
inline constexpr double kKktGate = 1e-6;

/// Condition-estimate threshold above which the optimality Jacobian is
/// treated as degenerate and the minimum-norm least-squares fallback is
/// used (with the report flagged).
inline constexpr double kDegenerateCond = 1e12;

/// Primal-dual point of the stability SDP in stacked vector form:
/// phi = (eta, svec(Phi)) and upsilon the concatenated svecs of the three
/// dual blocks. J and eps identify the problem instance.
struct KktPoint {
  Eigen::VectorXd phi;      // length m = 1 + n(n+1)/2
  Eigen::VectorXd upsilon;  // length 3 n(n+1)/2
  Eigen::MatrixXd J;
  double eps = kDefaultEps;

  int n() const { return static_cast<int>(J.rows()); }
};

KktPoint make_kkt_point(const StabilityCertificate& cert,
                        const Eigen::Ref<const Eigen::MatrixXd>& J);

/// Stacked first-order optimality residual: dual feasibility
/// [Tr(F_i Upsilon) - c_i] followed by the symmetrized complementarity
/// svec((F(phi) Upsilon + Upsilon F(phi))/2), per block. Zero exactly at a
/// primal-dual optimum.
Eigen::VectorXd optimality_residual(const KktPoint& pt);

/// Jacobian of optimality_residual with respect to (phi, upsilon):
///
///   [ 0                     Fcal^T          ]
///   [ (Upsilon (*) I) Fcal  F(phi) (*) I    ]
///
/// where Fcal stacks svec(F_i) columnwise and (*) is the symmetrized
/// Kronecker operator. Square of size m + 3 n(n+1)/2.
Eigen::MatrixXd optimality_jacobian(const KktPoint& pt);

/// Partial derivative of optimality_residual with respect to the Jacobian
/// entry J(i, j), holding (phi, upsilon) fixed.
Eigen::VectorXd optimality_entry_gradient(const KktPoint& pt, int i, int j);

/// Infinity norm of the optimality residual for a certificate/J pair.
double optimality_gate_residual(const StabilityCertificate& cert,
                                const Eigen::Ref<const Eigen::MatrixXd>& J);

enum class SensMethod { Analytic, ForwardFD, CentralFD };
std::string to_string(SensMethod method);

/// First-order sensitivities of the stability index. d_eta_d_J and
/// d_eta_d_params are filled by the operations that compute them and left
/// empty otherwise. degenerate marks an ill-conditioned optimality
/// Jacobian (sensitivities then come from a minimum-norm least-squares
/// solve and may be subgradient-like).
struct SensitivityReport {
  SensMethod method = SensMethod::Analytic;
  Eigen::MatrixXd d_eta_d_J;
  std::vector<std::string> param_names;
  Eigen::VectorXd d_eta_d_params;
  bool degenerate = false;
  double cond_estimate = 0.0;
  double elapsed_s = 0.0;
};

struct EntrySensitivity {
  double value = 0.0;
  bool degenerate = false;
  double cond_estimate = 0.0;
};

/// d eta / d J(i, j) through the implicit function theorem: solves the
/// optimality-Jacobian system for the entry direction and returns the eta
/// component. Requires an Optimal certificate passing the residual gate.
EntrySensitivity sens_entry(const StabilityCertificate& cert,
                            const Eigen::Ref<const Eigen::MatrixXd>& J,
                            int i, int j);

/// All n^2 entry sensitivities from a single factorization of the
/// optimality Jacobian.
SensitivityReport sens_matrix(const StabilityCertificate& cert,
                              const Eigen::Ref<const Eigen::MatrixXd>& J);

/// Chain rule to the controllable parameters of an affine family:
/// d eta / d d_k = sum_ij (d eta / d J_ij) M_k(i, j). The certificate must
/// correspond to jacobian_at(pj, pj.d); the residual gate rejects
/// mismatches.
SensitivityReport sens_params(const StabilityCertificate& cert,
                              const ParametricJacobian& pj);

}  // namespace stabsens
