#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mpp/sample.hpp"

namespace mpp {

// A unit direction pair together with the index value attained there.
struct ProjectionPair {
  Eigen::VectorXd u;   // p, unit length
  Eigen::VectorXd v;   // q, unit length
  double value = 0.0;  // index value at (u, v)
};

// Sample orthogonality-constraint matrices for the extracted pairs:
//   g1[k] = (1/n) sum_i Y_i v_k v_k' Y_i'   (p x p)
//   g2[k] = (1/n) sum_i Y_i' u_k u_k' Y_i   (q x q)
struct ConstraintSet {
  std::vector<Eigen::MatrixXd> g1;
  std::vector<Eigen::MatrixXd> g2;
};

// Subtracts the entrywise mean matrix from every observation. All index
// evaluations below expect centered data; centering is never implicit.
MatrixSample center(const MatrixSample& sample);

// kappa_n(u, v) = m4 / m2^2 with m_j = (1/n) sum_i (u' Y_i v)^j.
// Throws degenerate_projection_error when m2 <= 1e-14 * data scale.
double kappa_sample(const MatrixSample& centered, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v);

// Exact ambient-coordinate gradient of kappa_n:
//   grad_u = (m2^2 grad_u m4 - 2 m4 m2 grad_u m2) / m2^4,
//   grad_u m4 = (4/n) sum (u'Y_i v)^3 Y_i v,  grad_u m2 = (2/n) sum (u'Y_i v) Y_i v,
// and symmetrically for v with Y_i' u.
struct KappaGradient {
  Eigen::VectorXd du;
  Eigen::VectorXd dv;
};
KappaGradient kappa_gradient(const MatrixSample& centered, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v);

// Value and gradient from a single pass over the data; the optimizer hot path.
struct KappaEval {
  double value = 0.0;
  Eigen::VectorXd du;
  Eigen::VectorXd dv;
};
KappaEval kappa_eval(const MatrixSample& centered, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v);

// Mardia-type index of the partial projection u'X:
//   psi_n(u) = (1/n) sum_i { u' Y_i S(u)^{-1} Y_i' u }^2,
//   S(u)     = (1/n) sum_i Y_i' u u' Y_i.
// Throws degenerate_projection_error when S(u) has condition number > 1e12.
double psi_sample(const MatrixSample& centered, const Eigen::VectorXd& u);

// psi of the transposed observations, a function of the right direction v.
double psi_transpose_sample(const MatrixSample& centered, const Eigen::VectorXd& v);

// Second-moment indices of the baseline methods.
double kappa2_sample(const MatrixSample& centered, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v);            // MPCA
double psi2_sample(const MatrixSample& centered, const Eigen::VectorXd& u);  // (2D)^2PCA
double psi2_transpose_sample(const MatrixSample& centered, const Eigen::VectorXd& v);

ConstraintSet constraint_matrices(const MatrixSample& centered,
                                  const std::vector<ProjectionPair>& pairs);

// Empirical surrogate of the well-definedness condition: the pq x pq second
// moment matrix of vec(Y_i) is positive definite (smallest eigenvalue
// > 1e-12 * largest). Necessarily false when n <= pq.
bool well_definedness_check(const MatrixSample& centered);

}  // namespace mpp
