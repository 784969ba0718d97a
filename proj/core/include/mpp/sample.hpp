#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mpp {

using Eigen::Index;

// A stack of n observed p x q matrices. Observations are stored vectorized:
// column i of `data` is vec(X_i), columns stacked left to right, so entry
// (r, c) of observation i sits at data(c * p + r, i). Labels, when present,
// hold the generating component (1 or 2) of each observation.
struct MatrixSample {
  Index n = 0;
  Index p = 0;
  Index q = 0;
  Eigen::MatrixXd data;               // (p*q) x n
  std::vector<std::uint8_t> labels;   // empty or size n

  MatrixSample() = default;
  MatrixSample(Index n_, Index p_, Index q_)
      : n(n_), p(p_), q(q_), data(p_ * q_, n_) {}

  bool has_labels() const { return !labels.empty(); }

  Eigen::Map<const Eigen::MatrixXd> observation(Index i) const {
    return {data.col(i).data(), p, q};
  }
  Eigen::Map<Eigen::MatrixXd> observation(Index i) {
    return {data.col(i).data(), p, q};
  }

  void set_observation(Index i, const Eigen::MatrixXd& x) { observation(i) = x; }

  // Entrywise sample mean matrix.
  Eigen::MatrixXd mean_matrix() const;

  // Storage-level checks: shape consistency, finite entries, label values.
  // Accepts a single observation (I/O containers may hold one).
  void validate_storage() const;

  // Estimation-level checks: validate_storage plus n >= 2.
  void validate() const;
};

// vec(u v') laid out like the sample columns; u' X v = kron_pair(u,v) . vec(X).
Eigen::VectorXd kron_pair(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Projection helpers, each one pass over the data.
// scores(i)            = u' X_i v
// right_projections(i) = (X_i v)'   rows, n x p
// left_projections(i)  = (X_i' u)'  rows, n x q
Eigen::VectorXd projection_scores(const MatrixSample& s, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v);
Eigen::MatrixXd right_projections(const MatrixSample& s, const Eigen::VectorXd& v);
Eigen::MatrixXd left_projections(const MatrixSample& s, const Eigen::VectorXd& u);

// sum_i w(i) X_i as a p x q matrix.
Eigen::MatrixXd weighted_observation_sum(const MatrixSample& s, const Eigen::VectorXd& w);

// Transposed copy: observation i becomes X_i'.
MatrixSample transpose_sample(const MatrixSample& s);

// Two-sided projection: observation i becomes basis_u' X_i basis_v.
MatrixSample project_sample(const MatrixSample& s, const Eigen::MatrixXd& basis_u,
                            const Eigen::MatrixXd& basis_v);

// Second-moment matrices (1/n) sum Y_i Y_i' (p x p) and (1/n) sum Y_i' Y_i (q x q).
Eigen::MatrixXd gram_left(const MatrixSample& s);
Eigen::MatrixXd gram_right(const MatrixSample& s);

// Mean squared Frobenius norm (1/n) sum ||X_i||_F^2; the reference scale for
// degeneracy thresholds.
double data_scale_sq(const MatrixSample& s);

}  // namespace mpp
