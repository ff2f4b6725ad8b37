#include "stabsens/sensitivity.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>

namespace stabsens {

namespace {

// Columnwise svec stack of the coefficient matrices F_1..F_m, one row
// block of n(n+1)/2 rows per diagonal block.
Eigen::MatrixXd coefficient_stack(const StabilitySdp& sdp) {
  const int tri = triangular_size(sdp.n());
  Eigen::MatrixXd fcal(3 * tri, sdp.m());
  for (int i = 1; i <= sdp.m(); ++i) {
    const BlockDiag3 fi = sdp.coefficient_matrix(i);
    for (int b = 0; b < 3; ++b) {
      fcal.block(b * tri, i - 1, tri, 1) = svec_dense(fi.blocks[b]);
    }
  }
  return fcal;
}

Eigen::MatrixXd dual_block(const KktPoint& pt, int b) {
  const int tri = triangular_size(pt.n());
  return smat_dense(pt.upsilon.segment(b * tri, tri));
}

struct IftSystem {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  bool degenerate = false;
  double cond_estimate = 0.0;

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    if (degenerate) return cod.solve(rhs);
    return lu.solve(rhs);
  }
};

IftSystem factor_optimality_jacobian(const Eigen::MatrixXd& gprime) {
  IftSystem sys;
  sys.lu.compute(gprime);
  const double rcond = sys.lu.rcond();
  sys.cond_estimate =
      rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  sys.degenerate =
      !std::isfinite(sys.cond_estimate) || sys.cond_estimate > kDegenerateCond;
  if (sys.degenerate) {
    // Minimum-norm least-squares fallback; the eta component is still
    // well-defined when the nullspace directions keep eta fixed.
    sys.cod.compute(gprime);
  }
  return sys;
}

KktPoint gated_point(const StabilityCertificate& cert,
                     const Eigen::Ref<const Eigen::MatrixXd>& J) {
  if (cert.status != SolveStatus::Optimal) {
    throw StatusNotOptimal("sensitivity: certificate status is " +
                           to_string(cert.status) + ", need Optimal");
  }
  KktPoint pt = make_kkt_point(cert, J);
  const double res = optimality_residual(pt).cwiseAbs().maxCoeff();
  if (!(res <= kKktGate)) {
    throw NotAtOptimum(
        "sensitivity: optimality residual " + std::to_string(res) +
        " exceeds the gate " + std::to_string(kKktGate));
  }
  return pt;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

KktPoint make_kkt_point(const StabilityCertificate& cert,
                        const Eigen::Ref<const Eigen::MatrixXd>& J) {
  if (J.rows() != cert.n || J.cols() != cert.n) {
    throw DimensionError("make_kkt_point: J size does not match certificate");
  }
  const int tri = triangular_size(cert.n);
  KktPoint pt;
  pt.J = J;
  pt.eps = cert.eps;
  pt.phi.resize(1 + tri);
  pt.phi[0] = cert.eta;
  pt.phi.tail(tri) = svec(cert.phi).values;
  pt.upsilon.resize(3 * tri);
  for (int b = 0; b < 3; ++b) {
    pt.upsilon.segment(b * tri, tri) = svec(cert.upsilon[b]).values;
  }
  return pt;
}

Eigen::VectorXd optimality_residual(const KktPoint& pt) {
  const StabilitySdp sdp(pt.J, pt.eps);
  const int tri = triangular_size(sdp.n());
  if (pt.phi.size() != sdp.m() || pt.upsilon.size() != 3 * tri) {
    throw DimensionError("optimality_residual: point has wrong lengths");
  }
  const Eigen::MatrixXd fcal = coefficient_stack(sdp);
  const BlockDiag3 f = sdp.assemble(pt.phi);

  Eigen::VectorXd g(sdp.m() + 3 * tri);
  g.head(sdp.m()) = fcal.transpose() * pt.upsilon - sdp.c();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(sdp.n(), sdp.n());
  for (int b = 0; b < 3; ++b) {
    const Eigen::MatrixXd ups = dual_block(pt, b);
    g.segment(sdp.m() + b * tri, tri) =
        sym_kron(ups, id) * svec_dense(f.blocks[b]);
  }
  return g;
}

Eigen::MatrixXd optimality_jacobian(const KktPoint& pt) {
  const StabilitySdp sdp(pt.J, pt.eps);
  const int n = sdp.n();
  const int m = sdp.m();
  const int tri = triangular_size(n);
  const int size = m + 3 * tri;

  const Eigen::MatrixXd fcal = coefficient_stack(sdp);
  const BlockDiag3 f = sdp.assemble(pt.phi);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd gprime = Eigen::MatrixXd::Zero(size, size);
  gprime.topRightCorner(m, 3 * tri) = fcal.transpose();
  for (int b = 0; b < 3; ++b) {
    const Eigen::MatrixXd ups_op = sym_kron(dual_block(pt, b), id);
    gprime.block(m + b * tri, 0, tri, m) = ups_op * fcal.middleRows(b * tri, tri);
    gprime.block(m + b * tri, m + b * tri, tri, tri) =
        sym_kron(f.blocks[b], id);
  }
  return gprime;
}

Eigen::VectorXd optimality_entry_gradient(const KktPoint& pt, int i, int j) {
  const int n = pt.n();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw DimensionError("optimality_entry_gradient: entry index out of range");
  }
  const int m = 1 + triangular_size(n);
  const int tri = triangular_size(n);

  const Eigen::MatrixXd ups1 = dual_block(pt, 0);
  const Eigen::MatrixXd phi = smat_dense(pt.phi.tail(m - 1));

  Eigen::VectorXd g(m + 3 * tri);
  g.setZero();

  // Dual-feasibility rows: component k >= 2 is
  // Tr((dF_k/dJ_ij) Upsilon_1) with dF_k^{(1)}/dJ_ij = -E_ji T_k - T_k E_ij,
  // which collapses to the svec coordinates of -(e_i q^T + q e_i^T),
  // q = Upsilon_1 e_j.
  {
    Eigen::MatrixXd d(n, n);
    d.setZero();
    d.col(i) -= ups1.col(j);
    d.row(i) -= ups1.col(j).transpose();
    g.segment(1, m - 1) = svec_dense(d);
  }

  // Complementarity rows, first block only: (Upsilon_1 (*) I) applied to
  // svec(dF(phi)/dJ_ij) with dF^{(1)}/dJ_ij = -(e_j p^T + p e_j^T),
  // p = Phi e_i.
  {
    Eigen::MatrixXd d(n, n);
    d.setZero();
    d.col(j) -= phi.col(i);
    d.row(j) -= phi.col(i).transpose();
    const Eigen::MatrixXd prod = d * ups1;
    g.segment(m, tri) = svec_dense(0.5 * (prod + prod.transpose()));
  }
  return g;
}

double optimality_gate_residual(const StabilityCertificate& cert,
                                const Eigen::Ref<const Eigen::MatrixXd>& J) {
  return optimality_residual(make_kkt_point(cert, J)).cwiseAbs().maxCoeff();
}

std::string to_string(SensMethod method) {
  switch (method) {
    case SensMethod::Analytic:
      return "analytic";
    case SensMethod::ForwardFD:
      return "forward_fd";
    case SensMethod::CentralFD:
      return "central_fd";
  }
  return "unknown";
}

EntrySensitivity sens_entry(const StabilityCertificate& cert,
                            const Eigen::Ref<const Eigen::MatrixXd>& J,
                            int i, int j) {
  const KktPoint pt = gated_point(cert, J);
  const IftSystem sys = factor_optimality_jacobian(optimality_jacobian(pt));
  const Eigen::VectorXd s = sys.solve(-optimality_entry_gradient(pt, i, j));
  if (!s.allFinite()) {
    throw DegenerateKKT("sens_entry: sensitivity solve produced non-finite "
                        "values");
  }
  return {s[0], sys.degenerate, sys.cond_estimate};
}

SensitivityReport sens_matrix(const StabilityCertificate& cert,
                              const Eigen::Ref<const Eigen::MatrixXd>& J) {
  const auto t0 = std::chrono::steady_clock::now();
  const KktPoint pt = gated_point(cert, J);
  const int n = pt.n();
  const IftSystem sys = factor_optimality_jacobian(optimality_jacobian(pt));

  Eigen::MatrixXd rhs(pt.phi.size() + pt.upsilon.size(), n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rhs.col(i * n + j) = -optimality_entry_gradient(pt, i, j);
    }
  }
  const Eigen::MatrixXd s = sys.solve(rhs);
  if (!s.allFinite()) {
    throw DegenerateKKT("sens_matrix: sensitivity solve produced non-finite "
                        "values");
  }

  SensitivityReport report;
  report.method = SensMethod::Analytic;
  report.d_eta_d_J.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      report.d_eta_d_J(i, j) = s(0, i * n + j);
    }
  }
  report.degenerate = sys.degenerate;
  report.cond_estimate = sys.cond_estimate;
  report.elapsed_s = seconds_since(t0);
  return report;
}

SensitivityReport sens_params(const StabilityCertificate& cert,
                              const ParametricJacobian& pj) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd J = jacobian_at(pj, pj.d);
  SensitivityReport report = sens_matrix(cert, J);
  report.d_eta_d_params.resize(pj.param_count());
  report.param_names.clear();
  for (int k = 0; k < pj.param_count(); ++k) {
    report.d_eta_d_params[k] =
        report.d_eta_d_J.cwiseProduct(pj.modes[k].coefficient).sum();
    report.param_names.push_back(pj.modes[k].name);
  }
  report.elapsed_s = seconds_since(t0);
  return report;
}

}  // namespace stabsens
