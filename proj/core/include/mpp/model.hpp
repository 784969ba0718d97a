#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mpp/sample.hpp"

namespace mpp {

// ---------------------------------------------------------------------------
// Matrix normal mixture model
//
//   X ~ alpha1 N(T1, A, B) + alpha2 N(T2, A, B),
//
// where N(T, A, B) is the distribution of T + A^{1/2} Z B^{1/2} with Z having
// i.i.d. standard normal entries, A (p x p) and B (q x q) SPD.
// ---------------------------------------------------------------------------

struct MatrixNormalParams {
  Eigen::MatrixXd T;  // p x q mean
  Eigen::MatrixXd A;  // p x p row covariance, SPD
  Eigen::MatrixXd B;  // q x q column covariance, SPD

  Eigen::Index p() const { return T.rows(); }
  Eigen::Index q() const { return T.cols(); }
  void validate() const;
};

struct MixtureParams {
  double alpha1 = 0.5;
  Eigen::MatrixXd T1, T2;  // p x q means, T1 != T2
  Eigen::MatrixXd A, B;    // shared covariances

  Eigen::Index p() const { return T1.rows(); }
  Eigen::Index q() const { return T1.cols(); }
  double alpha2() const { return 1.0 - alpha1; }
  Eigen::MatrixXd mean_difference() const { return T2 - T1; }  // H

  // Rank d of A^{-1/2} H B^{-1/2} = number of non-negligible singular values.
  int rank() const;
  void validate() const;
};

// Which way the kurtosis index must be optimized, decided entirely by
// |alpha1 - 1/2| against the boundary 1/sqrt(12).
enum class MixingRegime { Minimize, Maximize, Degenerate };

MixingRegime mixing_regime(double alpha1);

// AR(1) correlation matrix, entry (i, j) = rho^{|i-j|}.
Eigen::MatrixXd ar1_covariance(Eigen::Index dim, double rho);

// Draws X_i = T + A^{1/2} Z_i B^{1/2}; deterministic given the seed.
MatrixSample sample_matrix_normal(const MatrixNormalParams& params, Index n,
                                  std::uint64_t seed);

// Mixture draws with component labels filled in.
MatrixSample sample_mixture(const MixtureParams& mix, Index n, std::uint64_t seed);

// The optimal separating projection direction A^{-1} (T2 - T1) B^{-1}.
Eigen::MatrixXd w_lda(const MixtureParams& mix);

// ---------------------------------------------------------------------------
// Population index values under the mixture.
//
// With beta = a1*a2, gamma = a1^3 + a2^3 and z the squared standardized mean
// separation seen by the projection,
//
//   kappa(u, v) = 3      + beta (gamma - 3 beta) { z / (1 + beta z) }^2,
//   psi(u)      = q(q+2) + beta (gamma - 3 beta) { z / (1 + beta z) }^2,
//
// where for kappa z = (u'Hv)^2 / (u'Au v'Bv) and for psi
// z = u0' R R' u0 / ||u0||^2 with u0 = A^{1/2} u, R = A^{-1/2} H B^{-1/2}.
// ---------------------------------------------------------------------------

double population_kappa(const MixtureParams& mix, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v);
double population_psi(const MixtureParams& mix, const Eigen::VectorXd& u);

// Low-order population moments of the centered projection u'{X - E(X)}v.
// m3 vanishes at balanced mixing; kappa = m4 / m2^2.
struct ProjectionMoments {
  double m2 = 0.0;
  double m3 = 0.0;
  double kappa = 3.0;
};
ProjectionMoments population_projection_moments(const MixtureParams& mix,
                                                const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& v);

// ---------------------------------------------------------------------------
// Analytic optimizer pairs: the singular pairs (u0j, v0j, sigma_j) of
// R = A^{-1/2} H B^{-1/2} mapped back through the standardization,
// u_j = A^{-1/2} u0j / ||.||, v_j = B^{-1/2} v0j / ||.||.
// ---------------------------------------------------------------------------

struct AnalyticPair {
  Eigen::VectorXd u, v;     // ambient unit directions
  Eigen::VectorXd u0, v0;   // standardized singular vectors
  double sigma = 0.0;       // singular value of R
};

Eigen::MatrixXd standardized_mean_difference(const MixtureParams& mix);  // R
std::vector<AnalyticPair> analytic_pairs(const MixtureParams& mix);

// ---------------------------------------------------------------------------
// Second-order recovery conditions for rank-1 mean difference H = a b'.
// Decide whether the MPCA / (2D)^2-PCA objectives can recover the optimal
// separating directions at all.
// ---------------------------------------------------------------------------

// psi2 route: a must be an eigenvector of A (eigenvalue lambda) and the
// second largest eigenvalue phi2 of tr(B) A + a1 a2 ||b||^2 a a' must satisfy
// phi2 < lambda { tr(B) + a1 a2 a'A^{-1}a ||b||^2 }.
bool second_order_psi2_condition(const MixtureParams& mix);

// kappa2 route: a, b must be eigenvectors of A, B (eigenvalues sigma_a,
// lambda_b) and sigma_a lambda_b + a1 a2 ||a||^2 ||b||^2 > sigma_1 lambda_1.
bool second_order_kappa2_condition(const MixtureParams& mix);

}  // namespace mpp
