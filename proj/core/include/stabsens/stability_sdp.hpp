#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "stabsens/errors.hpp"
#include "stabsens/symmetric.hpp"

namespace stabsens {

inline constexpr double kDefaultEps = 1e-6;
inline constexpr double kDefaultTol = 1e-8;

/// Block-diagonal symmetric matrix with three equal-size blocks. All
/// constraint matrices of the stability SDP have this shape, so the dual
/// variable is represented the same way.
struct BlockDiag3 {
  std::array<Eigen::MatrixXd, 3> blocks;

  static BlockDiag3 zero(int n) {
    BlockDiag3 out;
    for (auto& b : out.blocks) b = Eigen::MatrixXd::Zero(n, n);
    return out;
  }

  double trace_product(const BlockDiag3& other) const {
    double acc = 0.0;
    for (int b = 0; b < 3; ++b) {
      acc += blocks[b].cwiseProduct(other.blocks[b]).sum();
    }
    return acc;
  }

  double max_abs() const {
    double acc = 0.0;
    for (const auto& b : blocks) {
      acc = std::max(acc, b.cwiseAbs().maxCoeff());
    }
    return acc;
  }
};

/// The stability index SDP in standard linear-matrix-inequality form:
///
///   minimize    c^T phi
///   subject to  F(phi) = F0 + sum_i phi_i F_i  is PSD
///
/// with phi = (eta, svec(Phi)) of length m = 1 + n(n+1)/2 and c = e_1.
/// The three diagonal blocks of F(phi) carry, in order, the decay
/// constraint -J^T Phi - Phi J + eta I, the lower bound Phi - eps I and
/// the upper bound I - Phi. Coefficient matrices are never stored: they
/// are implied by J and the orthonormal symmetric basis, and materialized
/// on demand.
class StabilitySdp {
 public:
  StabilitySdp(Eigen::MatrixXd J, double eps);

  int n() const { return n_; }
  int m() const { return m_; }
  double eps() const { return eps_; }
  const Eigen::MatrixXd& J() const { return J_; }
  const Eigen::VectorXd& c() const { return c_; }

  /// Constant term F0 = diag(0, -eps I, I).
  BlockDiag3 constant_term() const;

  /// Coefficient matrix F_i for i in [1, m]; i = 0 returns F0.
  BlockDiag3 coefficient_matrix(int i) const;

  /// F(phi) = F0 + sum_i phi_i F_i, assembled directly from (eta, Phi).
  BlockDiag3 assemble(const Eigen::Ref<const Eigen::VectorXd>& phi) const;

  /// Adjoint of the coefficient map: component i is Tr(F_i X), i = 1..m.
  Eigen::VectorXd adjoint(const BlockDiag3& x) const;

 private:
  int n_;
  int m_;
  double eps_;
  Eigen::MatrixXd J_;
  Eigen::VectorXd c_;
};

enum class SolveStatus { Optimal, MaxIterations, NumericalTrouble };

std::string to_string(SolveStatus status);

/// Primal-dual solution of the stability SDP. `eta` is the stability
/// index (1/s decay rate bound on the Lyapunov value, negative iff the
/// system is certified stable for small eps). `phi` is the Lyapunov
/// certificate matrix and `upsilon` the block-diagonal dual variable.
struct StabilityCertificate {
  double eta = 0.0;
  SymMatrix phi;
  std::array<SymMatrix, 3> upsilon;
  double gap = 0.0;
  SolveStatus status = SolveStatus::NumericalTrouble;
  double solve_time_s = 0.0;

  int n = 0;
  double eps = kDefaultEps;
  double dual_residual = 0.0;   // max_i |Tr(F_i Upsilon) - c_i|
  double compl_residual = 0.0;  // max abs entry of (F Upsilon + Upsilon F)/2

  bool stable() const { return eta < 0.0; }
};

StabilitySdp build_sdp(const Eigen::Ref<const Eigen::MatrixXd>& J, double eps);

/// Interior-point solve (Nesterov-Todd scaling, Mehrotra
/// predictor-corrector, primal-feasible iterates). Returns Optimal when
/// the dual residual and the duality gap both fall below tol; otherwise
/// the best iterate found is returned with a non-Optimal status.
StabilityCertificate solve_sdp(const StabilitySdp& sdp, double tol);

/// build_sdp followed by solve_sdp.
StabilityCertificate stability_index(const Eigen::Ref<const Eigen::MatrixXd>& J,
                                     double eps = kDefaultEps,
                                     double tol = kDefaultTol);

/// Stability constraint eta < eta_bar. Refuses certificates that are not
/// Optimal (throws StatusNotOptimal).
bool check_constraint(const StabilityCertificate& cert, double eta_bar);

}  // namespace stabsens
