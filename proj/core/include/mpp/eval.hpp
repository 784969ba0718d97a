#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mpp/indices.hpp"
#include "mpp/sample.hpp"

namespace mpp {

// Maximal similarity index |x'y| of two unit vectors; inputs are normalized
// if they are not unit length.
double msi(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// ln ||W_hat - W_true||_F^2, floored at ln(1e-300) for identical inputs.
double frobenius_log_error(const Eigen::MatrixXd& w_hat, const Eigen::MatrixXd& w_true);

// Per-observation scores u'X_i v, or <W, X_i> for a matrix direction.
Eigen::VectorXd project_scores(const MatrixSample& sample, const ProjectionPair& pair);
Eigen::VectorXd project_scores(const MatrixSample& sample, const Eigen::MatrixXd& w);

// ---------------------------------------------------------------------------
// 1-D two-component Gaussian mixture clustering by EM.
// ---------------------------------------------------------------------------

struct ClusteringResult {
  std::vector<int> labels;            // n values in {1, 2}
  std::array<double, 2> means{};
  std::array<double, 2> variances{};  // equal when the pooled fit is requested
  std::array<double, 2> weights{};
  double loglik = 0.0;
  int iterations = 0;
  std::optional<double> misclassification;  // best over the 2 label permutations
};

// Initialization is a deterministic median split; EM runs at most 500
// iterations and stops when the log-likelihood change drops below 1e-10.
// `true_labels` (values 1/2), when given, fills in the misclassification.
ClusteringResult gmm1d_em(const Eigen::VectorXd& scores, bool equal_variance,
                          std::uint64_t seed,
                          const std::vector<std::uint8_t>* true_labels = nullptr);

// ---------------------------------------------------------------------------
// Supervised and second-order baselines.
// ---------------------------------------------------------------------------

// Plug-in LDA direction A_hat^{-1} (T2_hat - T1_hat) B_hat^{-1} with the
// separable covariance estimated by flip-flop ML updates on the pooled
// within-group residuals, scale fixed by tr(B_hat) = q.
struct LdaBaselineResult {
  Eigen::MatrixXd w;      // p x q
  Eigen::MatrixXd a_hat;  // p x p
  Eigen::MatrixXd b_hat;  // q x q
  bool converged = false;
  int sweeps = 0;
};
LdaBaselineResult lda_baseline(const MatrixSample& sample);

// MPCA: alternating eigen-updates maximizing the second-moment index, later
// pairs ordinary-orthogonal to the earlier ones. value = kappa2 at the pair.
std::vector<ProjectionPair> mpca_baseline(const MatrixSample& sample, int n_pairs);

// (2D)^2PCA: top eigenvectors of (1/n) sum Y_i Y_i' and (1/n) sum Y_i' Y_i.
std::pair<Eigen::VectorXd, Eigen::VectorXd> twod2pca_baseline(const MatrixSample& sample);

}  // namespace mpp
