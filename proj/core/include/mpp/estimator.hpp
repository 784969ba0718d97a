#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mpp/indices.hpp"
#include "mpp/sample.hpp"

namespace mpp {

// Back-transformation from an observed kurtosis value to the singular value
// of the standardized mean difference:
//   theta  = sqrt(max{ (kappa - 3) / (b (1 - 6 b)), 0 }),   b = a1 a2,
//   lambda = sqrt(max{ theta / (1 - b theta), 0 }).
// When 1 - b theta <= 0 on a sample, the absolute value replaces the maximum
// and `clamped` is set.
struct LambdaTheta {
  double theta = 0.0;
  double lambda = 0.0;
  bool clamped = false;
};
LambdaTheta lambda_theta(double kappa_value, double alpha1);

// s_j = sign{ (a1 - a2)^{-1} z_3 } with z_3 the third sample moment of the
// j-th projection; 0 when |z_3| is below 1e-12 * scale^3. Undefined for
// balanced groups (alpha1 = 1/2): throws validation_error pointing the caller
// to sign_align_by_correlation.
std::vector<int> pair_signs(const MatrixSample& centered,
                            const std::vector<ProjectionPair>& pairs, double alpha1);

// Balanced-groups workaround: for k >= 2 flip v_k whenever the sample
// correlation between the k-th score vector and the first one is negative
// (ties at exactly zero keep the sign).
std::vector<ProjectionPair> sign_align_by_correlation(
    const MatrixSample& centered, std::vector<ProjectionPair> pairs);

// Everything the reconstruction produces, per pair and combined:
//   w_nlda = sum_j s_j z_{j2}^{-1/2} lambda_j sqrt(1 + a1 a2 lambda_j^2) u_j v_j'.
struct ExtractionResult {
  std::vector<ProjectionPair> pairs;
  std::vector<double> kappa_hat;
  std::vector<double> theta_hat;
  std::vector<double> lambda_hat;
  std::vector<int> signs;        // in {-1, 0, +1}
  Eigen::MatrixXd w_nlda;        // p x q
  int rank_estimate = 0;
  bool lambda_clamped = false;   // any pair hit the |1 - b theta| fallback
};

// Sample-moment route: computes z_{j2}, z_{j3}, kappa_hat from the centered
// data. For alpha1 = 1/2 the third-moment sign is undefined; the pairs must
// then be pre-aligned (sign_align_by_correlation) and all signs are set +1.
ExtractionResult reconstruct_w_lda(const MatrixSample& centered,
                                   const std::vector<ProjectionPair>& pairs,
                                   double alpha1, double rank_tol = 0.05);

// Moment-level route used for population/desk verification: the caller
// supplies per-pair kappa, second and third moments directly.
ExtractionResult reconstruct_w_lda_from_moments(
    const std::vector<ProjectionPair>& pairs, const std::vector<double>& kappa,
    const std::vector<double>& z2, const std::vector<double>& z3, double alpha1,
    double rank_tol = 0.05);

// #{ j : lambda_hat[j] > tol * max lambda_hat }, 0 when all are zero.
int estimate_rank(const std::vector<double>& lambda_hat, double tol);

}  // namespace mpp
