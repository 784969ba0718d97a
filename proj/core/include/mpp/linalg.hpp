#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mpp {

// Symmetry + positive definiteness check: all eigenvalues > tol relative to
// the largest one.
bool is_spd(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

// Symmetric square root / inverse square root via eigendecomposition.
// Eigenvalues are floored at 1e-12 * lambda_max before the root is taken.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& m);

// Column-orthonormal basis of the orthogonal complement of span(vectors) in
// R^dim, built from the trailing columns of a Householder QR. Empty input
// yields the identity. Throws numeric_error if the inputs are linearly
// dependent (or k >= dim).
Eigen::MatrixXd orthogonal_complement(const std::vector<Eigen::VectorXd>& vectors,
                                      Eigen::Index dim);

// Flips the sign so the first component of non-negligible magnitude is
// positive; deterministic representative of {v, -v}.
Eigen::VectorXd canonical_sign(Eigen::VectorXd v);

// Relative residual test ||A a - rayleigh(a) a|| / ||A a|| < tol.
bool is_eigenvector_of(const Eigen::MatrixXd& m, const Eigen::VectorXd& a,
                       double tol = 1e-8);

}  // namespace mpp
