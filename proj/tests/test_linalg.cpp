#include <doctest.h>

#include <Eigen/Dense>

#include "mpp/errors.hpp"
#include "mpp/linalg.hpp"
#include "test_helpers.hpp"

using namespace mpp;

TEST_CASE("symmetric square roots invert each other") {
  Rng rng(7);
  const Eigen::MatrixXd m = test::random_spd(5, 0.5, 4.0, rng);
  const Eigen::MatrixXd half = sym_sqrt(m);
  const Eigen::MatrixXd inv_half = sym_inv_sqrt(m);
  CHECK((half * half - m).norm() < 1e-10);
  CHECK((inv_half * m * inv_half - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);
  CHECK((half - half.transpose()).norm() < 1e-12);
}

TEST_CASE("is_spd") {
  CHECK(is_spd(Eigen::MatrixXd::Identity(3, 3)));
  Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_FALSE(is_spd(neg));
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_FALSE(is_spd(asym));
}

TEST_CASE("orthogonal complement of a canonical vector") {
  std::vector<Eigen::VectorXd> vs{Eigen::VectorXd::Unit(3, 0)};
  const Eigen::MatrixXd j = orthogonal_complement(vs, 3);
  REQUIRE(j.cols() == 2);
  // Columns span {e2, e3}: zero first row, orthonormal.
  CHECK(j.row(0).norm() < 1e-12);
  CHECK((j.transpose() * j - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("orthogonal complement of nothing is the identity") {
  const Eigen::MatrixXd j = orthogonal_complement({}, 4);
  CHECK((j - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("orthogonal complement of random vectors") {
  Rng rng(3);
  std::vector<Eigen::VectorXd> vs{random_unit_vector(5, rng), random_unit_vector(5, rng)};
  const Eigen::MatrixXd j = orthogonal_complement(vs, 5);
  REQUIRE(j.cols() == 3);
  CHECK((j.transpose() * j - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  for (const auto& v : vs) CHECK((j.transpose() * v).norm() < 1e-10);
}

TEST_CASE("orthogonal complement rejects dependent inputs") {
  Eigen::VectorXd v = Eigen::VectorXd::Unit(4, 1);
  CHECK_THROWS_AS(orthogonal_complement({v, 2.0 * v}, 4), numeric_error);
}

TEST_CASE("canonical sign fixes the first significant component") {
  Eigen::VectorXd v(3);
  v << -0.3, 0.5, 0.2;
  CHECK(canonical_sign(v)(0) == doctest::Approx(0.3));
  v << 0.0, -0.5, 0.2;
  CHECK(canonical_sign(v)(1) == doctest::Approx(0.5));
}

TEST_CASE("eigenvector membership test") {
  Eigen::MatrixXd a = Eigen::Vector3d(4.0, 2.0, 1.0).asDiagonal();
  CHECK(is_eigenvector_of(a, Eigen::VectorXd::Unit(3, 1)));
  Eigen::VectorXd mixed(3);
  mixed << 1.0, 1.0, 0.0;
  CHECK_FALSE(is_eigenvector_of(a, mixed));
}

TEST_CASE("random orthogonal matrices are orthogonal and deterministic") {
  Rng rng1(42), rng2(42);
  const Eigen::MatrixXd q1 = random_orthogonal(4, rng1);
  const Eigen::MatrixXd q2 = random_orthogonal(4, rng2);
  CHECK((q1 * q1.transpose() - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
  CHECK((q1 - q2).norm() == 0.0);
}
