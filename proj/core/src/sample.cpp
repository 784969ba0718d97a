#include "mpp/sample.hpp"

#include <cmath>

#include "mpp/errors.hpp"

namespace mpp {

Eigen::MatrixXd MatrixSample::mean_matrix() const {
  Eigen::VectorXd mean_vec = data.rowwise().mean();
  return Eigen::Map<const Eigen::MatrixXd>(mean_vec.data(), p, q);
}

void MatrixSample::validate_storage() const {
  if (n < 1) throw validation_error("sample: need at least 1 observation");
  if (p < 1 || q < 1) throw validation_error("sample: dimensions must be positive");
  if (data.rows() != p * q || data.cols() != n)
    throw validation_error("sample: storage shape mismatch");
  if (!data.allFinite()) throw validation_error("sample: non-finite entries");
  if (!labels.empty()) {
    if (static_cast<Index>(labels.size()) != n)
      throw validation_error("sample: label count mismatch");
    for (auto l : labels)
      if (l != 1 && l != 2) throw validation_error("sample: labels must be 1 or 2");
  }
}

void MatrixSample::validate() const {
  validate_storage();
  if (n < 2) throw validation_error("sample: need at least 2 observations");
}

Eigen::VectorXd kron_pair(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Index p = u.size(), q = v.size();
  Eigen::VectorXd w(p * q);
  for (Index c = 0; c < q; ++c) w.segment(c * p, p) = v(c) * u;
  return w;
}

Eigen::VectorXd projection_scores(const MatrixSample& s, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v) {
  return s.data.transpose() * kron_pair(u, v);
}

Eigen::MatrixXd right_projections(const MatrixSample& s, const Eigen::VectorXd& v) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(s.n, s.p);
  for (Index c = 0; c < s.q; ++c)
    r.noalias() += v(c) * s.data.middleRows(c * s.p, s.p).transpose();
  return r;
}

Eigen::MatrixXd left_projections(const MatrixSample& s, const Eigen::VectorXd& u) {
  Eigen::MatrixXd l(s.n, s.q);
  for (Index c = 0; c < s.q; ++c)
    l.col(c).noalias() = s.data.middleRows(c * s.p, s.p).transpose() * u;
  return l;
}

Eigen::MatrixXd weighted_observation_sum(const MatrixSample& s, const Eigen::VectorXd& w) {
  Eigen::VectorXd m = s.data * w;
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), s.p, s.q);
}

MatrixSample transpose_sample(const MatrixSample& s) {
  MatrixSample t(s.n, s.q, s.p);
  t.labels = s.labels;
  for (Index i = 0; i < s.n; ++i) t.observation(i) = s.observation(i).transpose();
  return t;
}

MatrixSample project_sample(const MatrixSample& s, const Eigen::MatrixXd& basis_u,
                            const Eigen::MatrixXd& basis_v) {
  if (basis_u.rows() != s.p || basis_v.rows() != s.q)
    throw validation_error("project_sample: basis shapes do not match the sample");
  const Index pd = basis_u.cols(), qd = basis_v.cols();
  // vec(Bu' X Bv) = (Bv kron Bu)' vec(X)
  Eigen::MatrixXd k(s.p * s.q, pd * qd);
  for (Index cd = 0; cd < qd; ++cd)
    for (Index c = 0; c < s.q; ++c)
      k.block(c * s.p, cd * pd, s.p, pd) = basis_v(c, cd) * basis_u;
  MatrixSample out(s.n, pd, qd);
  out.labels = s.labels;
  out.data.noalias() = k.transpose() * s.data;
  return out;
}

Eigen::MatrixXd gram_left(const MatrixSample& s) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(s.p, s.p);
  for (Index c = 0; c < s.q; ++c) {
    const auto block = s.data.middleRows(c * s.p, s.p);
    g.noalias() += block * block.transpose();
  }
  return g / static_cast<double>(s.n);
}

Eigen::MatrixXd gram_right(const MatrixSample& s) {
  Eigen::MatrixXd g(s.q, s.q);
  for (Index c = 0; c < s.q; ++c) {
    for (Index d = c; d < s.q; ++d) {
      const double value = s.data.middleRows(c * s.p, s.p)
                               .cwiseProduct(s.data.middleRows(d * s.p, s.p))
                               .sum();
      g(c, d) = value;
      g(d, c) = value;
    }
  }
  return g / static_cast<double>(s.n);
}

double data_scale_sq(const MatrixSample& s) {
  if (s.n == 0) return 0.0;
  return s.data.squaredNorm() / static_cast<double>(s.n);
}

}  // namespace mpp
