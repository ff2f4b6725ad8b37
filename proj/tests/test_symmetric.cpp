#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stabsens/symmetric.hpp"
#include "support/oracles.hpp"

using namespace stabsens;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("svec of a 2x2 example") {
  SymMatrix x(2);
  x.set(0, 0, 1.0);
  x.set(0, 1, 2.0);
  x.set(1, 1, 3.0);
  const SVec v = svec(x);
  REQUIRE(v.values.size() == 3);
  CHECK(v.values[0] == doctest::Approx(1.0));
  CHECK(v.values[1] == doctest::Approx(2.0 * kSqrt2));
  CHECK(v.values[2] == doctest::Approx(3.0));
}

TEST_CASE("svec of the 3x3 identity") {
  const SVec v = svec(SymMatrix::identity(3));
  Eigen::VectorXd expected(6);
  expected << 1, 0, 0, 1, 0, 1;
  CHECK((v.values - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("svec preserves the trace inner product (brute-force oracle)") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = oracles::random_symmetric(4, rng);
    const Eigen::MatrixXd y = oracles::random_symmetric(4, rng);
    const double via_svec = svec_dense(x).dot(svec_dense(y));
    const double via_trace = oracles::trace_product_loop(x, y);
    CHECK(std::abs(via_svec - via_trace) <=
          1e-12 * (1.0 + std::abs(via_trace)));
  }
}

TEST_CASE("smat inverts svec") {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0 * kSqrt2, 3.0;
  const SymMatrix x = smat(v);
  CHECK(x(0, 0) == doctest::Approx(1.0));
  CHECK(x(0, 1) == doctest::Approx(2.0));
  CHECK(x(1, 0) == doctest::Approx(2.0));
  CHECK(x(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("smat of a zero vector of length 6 is the 3x3 zero matrix") {
  const SymMatrix x = smat(Eigen::VectorXd::Zero(6));
  REQUIRE(x.dim() == 3);
  CHECK(x.dense().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smat rejects non-triangular lengths") {
  CHECK_THROWS_AS(smat(Eigen::VectorXd::Zero(5)), DimensionError);
  CHECK_THROWS_AS(smat(Eigen::VectorXd::Zero(0)), DimensionError);
}

TEST_CASE("round trip smat(svec(X)) = X") {
  Rng rng(3);
  for (int n : {1, 2, 3, 5, 8}) {
    const Eigen::MatrixXd x = oracles::random_symmetric(n, rng);
    const SymMatrix sym = SymMatrix::from_dense(x);
    const Eigen::MatrixXd back = smat(svec(sym)).dense();
    CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-15);
    // And svec(smat(v)) = v on raw coordinates.
    const Eigen::VectorXd v = svec_dense(x);
    CHECK((svec(smat(v)).values - v).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("symmetry of SymMatrix access is structural") {
  SymMatrix x(3);
  x.set(2, 0, 5.0);
  CHECK(x(0, 2) == 5.0);
  CHECK(x(2, 0) == 5.0);
}

TEST_CASE("sym_kron with both identities is the identity operator") {
  for (int n : {1, 2, 4}) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd op = sym_kron(id, id);
    CHECK((op - Eigen::MatrixXd::Identity(op.rows(), op.cols()))
              .cwiseAbs()
              .maxCoeff() <= 1e-15);
  }
}

TEST_CASE("sym_kron scalar case") {
  Eigen::MatrixXd m(1, 1), n(1, 1);
  m << 2.0;
  n << 3.0;
  const Eigen::MatrixXd op = sym_kron(m, n);
  REQUIRE(op.rows() == 1);
  CHECK(op(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("sym_kron action matches direct evaluation (oracle)") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd m = oracles::random_matrix(3, 3, rng);
    const Eigen::MatrixXd n = oracles::random_matrix(3, 3, rng);
    const Eigen::MatrixXd x = oracles::random_symmetric(3, rng);
    const Eigen::VectorXd via_op = sym_kron(m, n) * svec_dense(x);
    const Eigen::VectorXd direct = svec_dense(
        0.5 * (n * x * m.transpose() + m * x * n.transpose()));
    CHECK((via_op - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("sym_kron is bilinear and symmetric in its arguments") {
  Rng rng(23);
  const Eigen::MatrixXd m1 = oracles::random_matrix(3, 3, rng);
  const Eigen::MatrixXd m2 = oracles::random_matrix(3, 3, rng);
  const Eigen::MatrixXd n = oracles::random_matrix(3, 3, rng);
  const double a = rng.uniform(-2.0, 2.0);
  const double b = rng.uniform(-2.0, 2.0);
  const Eigen::MatrixXd combined = sym_kron(a * m1 + b * m2, n);
  const Eigen::MatrixXd split = a * sym_kron(m1, n) + b * sym_kron(m2, n);
  CHECK((combined - split).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((sym_kron(m1, n) - sym_kron(n, m1)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sym_kron rejects dimension mismatch") {
  CHECK_THROWS_AS(
      sym_kron(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)),
      DimensionError);
}

TEST_CASE("sym_basis n=1 and n=2 are the definition") {
  const auto b1 = sym_basis(1);
  REQUIRE(b1.size() == 1);
  CHECK(b1[0](0, 0) == 1.0);

  const auto b2 = sym_basis(2);
  REQUIRE(b2.size() == 3);
  CHECK(b2[0](0, 0) == 1.0);
  CHECK(b2[0](1, 1) == 0.0);
  CHECK(b2[1](0, 1) == doctest::Approx(1.0 / kSqrt2));
  CHECK(b2[2](1, 1) == 1.0);
}

TEST_CASE("sym_basis n=3 is orthonormal (pairwise trace oracle)") {
  const auto basis = sym_basis(3);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double tr =
          oracles::trace_product_loop(basis[i].dense(), basis[j].dense());
      CHECK(std::abs(tr - (i == j ? 1.0 : 0.0)) <= 1e-15);
    }
  }
}

TEST_CASE("svec coordinates expand in the basis") {
  Rng rng(31);
  const Eigen::MatrixXd x = oracles::random_symmetric(4, rng);
  const Eigen::VectorXd coords = svec_dense(x);
  const auto basis = sym_basis(4);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(4, 4);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    rebuilt += coords[static_cast<Eigen::Index>(k)] * basis[k].dense();
  }
  CHECK((rebuilt - x).cwiseAbs().maxCoeff() <= 1e-14);
}
