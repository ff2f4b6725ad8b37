#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "stabsens/stability_sdp.hpp"
#include "support/oracles.hpp"

using namespace stabsens;

namespace {

double lambda_min(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
             0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double lambda_max(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
             0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

}  // namespace

TEST_CASE("build_sdp scalar blocks by hand expansion") {
  const StabilitySdp sdp =
      build_sdp(Eigen::MatrixXd::Constant(1, 1, -1.0), 1e-6);
  CHECK(sdp.n() == 1);
  CHECK(sdp.m() == 2);
  CHECK(sdp.c()[0] == 1.0);
  CHECK(sdp.c()[1] == 0.0);

  const BlockDiag3 f0 = sdp.coefficient_matrix(0);
  CHECK(f0.blocks[0](0, 0) == 0.0);
  CHECK(f0.blocks[1](0, 0) == doctest::Approx(-1e-6));
  CHECK(f0.blocks[2](0, 0) == 1.0);

  const BlockDiag3 f1 = sdp.coefficient_matrix(1);
  CHECK(f1.blocks[0](0, 0) == 1.0);
  CHECK(f1.blocks[1](0, 0) == 0.0);
  CHECK(f1.blocks[2](0, 0) == 0.0);

  // T = [1]: -J^T T - T J = 2 for J = -1.
  const BlockDiag3 f2 = sdp.coefficient_matrix(2);
  CHECK(f2.blocks[0](0, 0) == doctest::Approx(2.0));
  CHECK(f2.blocks[1](0, 0) == 1.0);
  CHECK(f2.blocks[2](0, 0) == -1.0);
}

TEST_CASE("build_sdp with J = 0 drops the decay block coefficient") {
  const StabilitySdp sdp = build_sdp(Eigen::MatrixXd::Zero(1, 1), 1e-6);
  const BlockDiag3 f2 = sdp.coefficient_matrix(2);
  CHECK(f2.blocks[0](0, 0) == 0.0);
  CHECK(f2.blocks[1](0, 0) == 1.0);
  CHECK(f2.blocks[2](0, 0) == -1.0);
}

TEST_CASE("assemble matches the direct constraint assembly (oracle)") {
  Rng rng(71);
  const Eigen::MatrixXd j = oracles::random_matrix(2, 2, rng);
  const StabilitySdp sdp = build_sdp(j, 1e-6);
  CHECK(sdp.m() == 4);

  Eigen::VectorXd phi(4);
  for (int i = 0; i < 4; ++i) phi[i] = rng.uniform(-1.0, 1.0);
  const BlockDiag3 f = sdp.assemble(phi);

  const Eigen::MatrixXd big_phi = smat_dense(phi.tail(3));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd block1 =
      -j.transpose() * big_phi - big_phi * j + phi[0] * id;
  CHECK((f.blocks[0] - block1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((f.blocks[1] - (big_phi - 1e-6 * id)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((f.blocks[2] - (id - big_phi)).cwiseAbs().maxCoeff() <= 1e-14);

  // F(phi) = F0 + sum_i phi_i F_i through the materialized coefficients.
  BlockDiag3 accumulated = sdp.coefficient_matrix(0);
  for (int i = 1; i <= sdp.m(); ++i) {
    const BlockDiag3 fi = sdp.coefficient_matrix(i);
    for (int b = 0; b < 3; ++b) {
      accumulated.blocks[b] += phi[i - 1] * fi.blocks[b];
    }
  }
  for (int b = 0; b < 3; ++b) {
    CHECK((f.blocks[b] - accumulated.blocks[b]).cwiseAbs().maxCoeff() <=
          1e-13);
  }
}

TEST_CASE("adjoint is the trace pairing with the coefficients (oracle)") {
  Rng rng(73);
  const Eigen::MatrixXd j = oracles::random_matrix(3, 3, rng);
  const StabilitySdp sdp = build_sdp(j, 1e-6);
  BlockDiag3 x;
  for (int b = 0; b < 3; ++b) x.blocks[b] = oracles::random_symmetric(3, rng);
  const Eigen::VectorXd via_adjoint = sdp.adjoint(x);
  for (int i = 1; i <= sdp.m(); ++i) {
    double tr = 0.0;
    const BlockDiag3 fi = sdp.coefficient_matrix(i);
    for (int b = 0; b < 3; ++b) {
      tr += oracles::trace_product_loop(fi.blocks[b], x.blocks[b]);
    }
    CHECK(std::abs(via_adjoint[i - 1] - tr) <= 1e-12 * (1.0 + std::abs(tr)));
  }
}

TEST_CASE("scalar stable closed form: eta = -2, Phi = 1") {
  const StabilityCertificate cert =
      stability_index(Eigen::MatrixXd::Constant(1, 1, -1.0), 1e-6, 1e-8);
  REQUIRE(cert.status == SolveStatus::Optimal);
  CHECK(std::abs(cert.eta - (-2.0)) <= 1e-6);
  CHECK(std::abs(cert.phi(0, 0) - 1.0) <= 1e-6);
  CHECK(std::abs(cert.gap) <= 1e-8);
  CHECK(cert.stable());
}

TEST_CASE("scalar unstable closed form: eta = 2 J eps") {
  const StabilityCertificate cert =
      stability_index(Eigen::MatrixXd::Constant(1, 1, 0.5), 1e-6, 1e-8);
  REQUIRE(cert.status == SolveStatus::Optimal);
  CHECK(cert.eta > 0.0);
  CHECK(std::abs(cert.eta - 1e-6) <= 1e-7);
  CHECK(std::abs(cert.phi(0, 0) - 1e-6) <= 1e-7);
  CHECK_FALSE(cert.stable());
}

TEST_CASE("diagonal closed form: eta = 2 lambda_max") {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(0, 0) = -1.0;
  j(1, 1) = -3.0;
  const StabilityCertificate cert = stability_index(j);
  CHECK(std::abs(cert.eta - (-2.0)) <= 1e-5);
  CHECK(std::abs(cert.gap) <= 1e-8);
}

TEST_CASE("symmetric closed form against the power-iteration oracle") {
  Rng rng(79);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial * 2;
    const Eigen::MatrixXd j =
        oracles::random_symmetric_with_lambda_max(n, -0.4, rng);
    const double lam = oracles::power_iteration_lambda_max(j);
    const StabilityCertificate cert = stability_index(j);
    REQUIRE(cert.status == SolveStatus::Optimal);
    CHECK(std::abs(cert.eta - 2.0 * lam) <= 1e-5 * (1.0 + std::abs(lam)));
  }
}

TEST_CASE("shift identity for symmetric J") {
  Rng rng(83);
  const Eigen::MatrixXd j =
      oracles::random_symmetric_with_lambda_max(5, -0.5, rng);
  const double eta0 = stability_index(j).eta;
  for (double s : {0.1, 1.0}) {
    const Eigen::MatrixXd shifted =
        j - s * Eigen::MatrixXd::Identity(5, 5);
    const double eta_s = stability_index(shifted).eta;
    CHECK(std::abs(eta_s - (eta0 - 2.0 * s)) <= 1e-5);
  }
}

TEST_CASE("certificate satisfies the constraint chain") {
  Rng rng(89);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial;
    const Eigen::MatrixXd j = oracles::random_with_abscissa(n, -0.5, rng);
    const StabilityCertificate cert = stability_index(j);
    REQUIRE(cert.status == SolveStatus::Optimal);
    const Eigen::MatrixXd phi = cert.phi.dense();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

    // lambda_max(J^T Phi + Phi J - eta I) <= 1e-7 and Phi within [eps, 1].
    CHECK(lambda_max(j.transpose() * phi + phi * j - cert.eta * id) <= 1e-7);
    CHECK(lambda_max(phi) <= 1.0 + 1e-7);
    CHECK(lambda_min(phi) >= cert.eps - 1e-7);

    // Dual blocks PSD within tolerance; duality gap within tol.
    for (const auto& block : cert.upsilon) {
      CHECK(lambda_min(block.dense()) >= -1e-7);
    }
    CHECK(std::abs(cert.gap) <= 1e-7);
    CHECK(cert.dual_residual <= 1e-8);
  }
}

TEST_CASE("scale argument: without the upper bound, feasible points scale") {
  // If (Phi, eta) satisfies the decay and lower-bound constraints, then so
  // does (k Phi, k eta) for k >= 1; the upper bound exists to block this.
  Rng rng(97);
  const int n = 3;
  const Eigen::MatrixXd j = oracles::random_with_abscissa(n, -0.5, rng);
  const StabilityCertificate cert = stability_index(j);
  REQUIRE(cert.status == SolveStatus::Optimal);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double eps = cert.eps;
  for (double k : {2.0, 10.0}) {
    const Eigen::MatrixXd phi_k = k * cert.phi.dense();
    const double eta_k = k * cert.eta;
    CHECK(lambda_min(-j.transpose() * phi_k - phi_k * j + eta_k * id) >=
          -1e-6);
    CHECK(lambda_min(phi_k - eps * id) >= -1e-9);
    // (4d) is violated for k > 1, which is the point of the bound.
    CHECK(lambda_max(phi_k) > 1.0);
  }
}

TEST_CASE("sign correctness across seeded instances") {
  Rng rng(101);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const double target = (trial % 2 == 0) ? -0.4 : 0.4;
    const Eigen::MatrixXd j = oracles::random_with_abscissa(n, target, rng);
    const double abscissa = oracles::spectral_abscissa(j);
    if (std::abs(abscissa) < 0.05) continue;
    const StabilityCertificate cert = stability_index(j);
    REQUIRE(cert.status == SolveStatus::Optimal);
    CHECK((cert.eta < 0.0) == (abscissa < 0.0));
    ++checked;
  }
  CHECK(checked >= 95);
}

TEST_CASE("stability_index composes build and solve") {
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(1, 1, -1.0);
  const StabilityCertificate direct = solve_sdp(build_sdp(j, 1e-6), 1e-8);
  const StabilityCertificate composed = stability_index(j, 1e-6, 1e-8);
  CHECK(std::abs(direct.eta - composed.eta) <= 1e-12);
}

TEST_CASE("check_constraint verdicts and refusal") {
  StabilityCertificate cert;
  cert.status = SolveStatus::Optimal;
  cert.eta = -2.0;
  CHECK(check_constraint(cert, 0.0));
  CHECK_FALSE(check_constraint(cert, -3.0));

  cert.eta = 1e-6;
  CHECK_FALSE(check_constraint(cert, 0.0));

  cert.status = SolveStatus::MaxIterations;
  CHECK_THROWS_AS(check_constraint(cert, 0.0), StatusNotOptimal);
}

TEST_CASE("parameter validation") {
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(build_sdp(j, 0.0), ConfigError);
  CHECK_THROWS_AS(build_sdp(j, 1.5), ConfigError);
  CHECK_THROWS_AS(solve_sdp(build_sdp(j, 1e-6), 1e-12), ConfigError);
  CHECK_THROWS_AS(build_sdp(Eigen::MatrixXd::Zero(2, 3), 1e-6),
                  DimensionError);
}

TEST_CASE("solve time is recorded") {
  const StabilityCertificate cert =
      stability_index(Eigen::MatrixXd::Constant(1, 1, -1.0));
  CHECK(cert.solve_time_s > 0.0);
  CHECK(cert.solve_time_s < 5.0);
}
