#include "stabsens/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "stabsens/rng.hpp"

namespace stabsens {

namespace {
constexpr double kRcondFloor = 1e-12;
constexpr double kDecaySlack = 1e-6;

// rcond() can report 1 for exactly singular inputs (zero pivots make the
// inverse-norm estimate collapse), so the pivot ratio is checked as well.
bool numerically_singular(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_max = pivots.maxCoeff();
  if (!(pivot_max > 0.0) || !(pivots.minCoeff() > kRcondFloor * pivot_max)) {
    return true;
  }
  return !(lu.rcond() > kRcondFloor);
}
}  // namespace

Eigen::MatrixXd reduce(const DescriptorSystem& sys) {
  const Eigen::Index nx = sys.A.rows();
  const Eigen::Index ny = sys.D.rows();
  if (sys.A.cols() != nx || sys.B.rows() != nx || sys.B.cols() != ny ||
      sys.C.rows() != ny || sys.C.cols() != nx || sys.D.cols() != ny) {
    throw DimensionError("reduce: inconsistent descriptor block dimensions");
  }
  if (ny == 0) return sys.A;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.D);
  if (numerically_singular(lu)) {
    throw SingularAlgebraicBlock(
        "reduce: algebraic block D is numerically singular (rcond <= 1e-12)");
  }
  return sys.A - sys.B * lu.solve(sys.C);
}

void ParametricJacobian::validate() const {
  if (J0.rows() != J0.cols() || J0.rows() < 1) {
    throw DimensionError("ParametricJacobian: J0 must be square, dim >= 1");
  }
  for (const auto& mode : modes) {
    if (mode.coefficient.rows() != J0.rows() ||
        mode.coefficient.cols() != J0.cols()) {
      throw DimensionError("ParametricJacobian: mode '" + mode.name +
                           "' has a coefficient of the wrong size");
    }
    if (mode.lo > mode.hi) {
      throw ConfigError("ParametricJacobian: mode '" + mode.name +
                        "' has lo > hi");
    }
  }
  if (d.size() != static_cast<Eigen::Index>(modes.size())) {
    throw DimensionError(
        "ParametricJacobian: d length must equal the mode count");
  }
}

Eigen::MatrixXd jacobian_at(const ParametricJacobian& pj,
                            const Eigen::Ref<const Eigen::VectorXd>& d) {
  if (d.size() != pj.param_count()) {
    throw DimensionError("jacobian_at: d length " + std::to_string(d.size()) +
                         " != mode count " + std::to_string(pj.param_count()));
  }
  Eigen::MatrixXd J = pj.J0;
  for (int k = 0; k < pj.param_count(); ++k) {
    J += d[k] * pj.modes[k].coefficient;
  }
  return J;
}

const Eigen::MatrixXd& djacobian(const ParametricJacobian& pj, int k) {
  if (k < 0 || k >= pj.param_count()) {
    throw DimensionError("djacobian: mode index out of range");
  }
  return pj.modes[k].coefficient;
}

LyapunovSolution solve_lyapunov(const Eigen::Ref<const Eigen::MatrixXd>& J,
                                double xi) {
  if (J.rows() != J.cols()) {
    throw DimensionError("solve_lyapunov: J must be square");
  }
  if (!(xi < 0.0)) {
    throw ConfigError("solve_lyapunov: xi must be negative");
  }
  const int n = static_cast<int>(J.rows());

  // Vectorized operator of X -> -J^T X - X J acting on vec(X):
  // -(I kron J^T) - (J^T kron I).
  const Eigen::MatrixXd Jt = J.transpose();
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int col_block = 0; col_block < n; ++col_block) {
    // (I kron J^T): block diagonal copies of J^T.
    op.block(col_block * n, col_block * n, n, n) -= Jt;
    for (int row_block = 0; row_block < n; ++row_block) {
      // (J^T kron I): scalar J^T(row_block, col_block) times I.
      op.block(row_block * n, col_block * n, n, n).diagonal().array() -=
          Jt(row_block, col_block);
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(op);
  if (numerically_singular(lu)) {
    throw DegenerateSpectrum(
        "solve_lyapunov: the Lyapunov operator is singular; the spectrum of "
        "J contains a pair with lambda_i + lambda_j = 0");
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
  for (int i = 0; i < n; ++i) rhs[i * n + i] = -xi;
  const Eigen::VectorXd x = lu.solve(rhs);
  Eigen::MatrixXd phi_dense = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);

  LyapunovSolution out;
  out.phi = SymMatrix::from_dense(phi_dense);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(out.phi.dense());
  out.positive_definite = ldlt.info() == Eigen::Success &&
                          ldlt.isPositive() &&
                          ldlt.vectorD().minCoeff() > 0.0;
  return out;
}

Trajectory simulate_decay(const Eigen::Ref<const Eigen::MatrixXd>& J,
                          const SymMatrix& phi, double eta,
                          const Eigen::Ref<const Eigen::VectorXd>& x0,
                          double t_end, double dt) {
  const int n = static_cast<int>(J.rows());
  if (J.cols() != n || phi.dim() != n || x0.size() != n) {
    throw DimensionError("simulate_decay: inconsistent dimensions");
  }
  if (!(dt > 0.0) || !(t_end > 0.0) || dt > t_end) {
    throw ConfigError("simulate_decay: need 0 < dt <= t_end");
  }

  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  const double h = t_end / steps;
  const Eigen::MatrixXd phi_dense = phi.dense();

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.states.resize(steps + 1, n);
  traj.lyapunov_values.resize(steps + 1);

  Eigen::VectorXd x = x0;
  const double l0 = x0.dot(phi_dense * x0);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * h;
    if (!x.allFinite()) {
      throw IntegrationDiverged("simulate_decay: non-finite state at t = " +
                                std::to_string(t));
    }
    traj.times[k] = t;
    traj.states.row(k) = x.transpose();
    const double l = x.dot(phi_dense * x);
    traj.lyapunov_values[k] = l;
    if (eta < 0.0 && l > l0 * std::exp(eta * t) * (1.0 + kDecaySlack)) {
      ++traj.bound_violations;
    }
    if (k == steps) break;

    const Eigen::VectorXd k1 = J * x;
    const Eigen::VectorXd k2 = J * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = J * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = J * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return traj;
}

std::vector<Eigen::VectorXd> scenario_gen(const ParametricJacobian& pj,
                                          int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("scenario_gen: count must be >= 1");
  for (const auto& mode : pj.modes) {
    if (mode.lo > mode.hi) {
      throw ConfigError("scenario_gen: mode '" + mode.name + "' has lo > hi");
    }
  }
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  const int p = pj.param_count();
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd d(p);
    for (int k = 0; k < p; ++k) {
      d[k] = rng.uniform(pj.modes[k].lo, pj.modes[k].hi);
    }
    out.push_back(std::move(d));
  }
  return out;
}

ParametricJacobian make_droop_grid(int n, int battery_count,
                                   std::uint64_t seed) {
  if (n < 2) throw ConfigError("make_droop_grid: need n >= 2");
  if (battery_count < 1 || battery_count > n) {
    throw ConfigError("make_droop_grid: battery_count must be in [1, n]");
  }
  Rng rng(seed);

  // Connected topology: a random spanning tree plus ~n/2 extra edges.
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    edges.emplace(rng.uniform_int(0, v - 1), v);
  }
  for (int extra = 0; extra < n / 2; ++extra) {
    int u = rng.uniform_int(0, n - 1);
    int v = rng.uniform_int(0, n - 1);
    if (u == v) continue;
    edges.emplace(std::min(u, v), std::max(u, v));
  }

  // Directed Laplacian with independent weights per direction (row sums
  // zero). Eigenvalues of -L have non-positive real part by Gershgorin.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : edges) {
    const double wuv = rng.uniform(0.5, 1.5);
    const double wvu = rng.uniform(0.5, 1.5);
    lap(u, v) -= wuv;
    lap(u, u) += wuv;
    lap(v, u) -= wvu;
    lap(v, v) += wvu;
  }

  ParametricJacobian pj;
  pj.J0 = -lap - 0.5 * Eigen::MatrixXd::Identity(n, n);
  pj.modes.reserve(battery_count);
  for (int k = 0; k < battery_count; ++k) {
    const int bus = static_cast<int>(
        static_cast<long long>(k) * n / battery_count);
    JacobianMode mode;
    mode.name = "Kb" + std::to_string(bus);
    mode.coefficient = Eigen::MatrixXd::Zero(n, n);
    mode.coefficient(bus, bus) = -1.0;
    mode.lo = 0.1;
    mode.hi = 2.0;
    pj.modes.push_back(std::move(mode));
  }
  pj.d = Eigen::VectorXd::Constant(battery_count, 1.05);
  pj.validate();
  return pj;
}

}  // namespace stabsens
