#include "mpp/indices.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mpp/errors.hpp"

namespace mpp {

namespace {

constexpr double kDegenerateRel = 1e-14;  // m2 floor relative to data scale
constexpr double kMaxCondition = 1e12;    // S(u) inversion guard

// Mardia-type sample index of a vector-valued projection given its n x k
// observation rows: mean of { row_i' S^{-1} row_i }^2 with S = rows'rows / n.
double mardia_of_rows(const Eigen::MatrixXd& rows) {
  const Index n = rows.rows();
  const Eigen::MatrixXd s = rows.transpose() * rows / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw numeric_error("mardia index: eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  const double lambda_max = ev(ev.size() - 1);
  if (!(lambda_max > 0.0) || ev(0) <= lambda_max / kMaxCondition)
    throw degenerate_projection_error("mardia index: projected scatter is singular");
  const Eigen::MatrixXd s_inv = es.eigenvectors() *
                                ev.cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
  const Eigen::VectorXd quad =
      (rows * s_inv).cwiseProduct(rows).rowwise().sum();
  return quad.squaredNorm() / static_cast<double>(n);
}

void check_pair_dims(const MatrixSample& s, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v) {
  if (u.size() != s.p || v.size() != s.q)
    throw validation_error("index: direction dimensions do not match the sample");
}

}  // namespace

MatrixSample center(const MatrixSample& sample) {
  if (sample.n < 2) throw validation_error("center: need n >= 2");
  MatrixSample out = sample;
  out.data.colwise() -= sample.data.rowwise().mean();
  return out;
}

double kappa_sample(const MatrixSample& centered, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v) {
  check_pair_dims(centered, u, v);
  const Eigen::VectorXd t = projection_scores(centered, u, v);
  const double n = static_cast<double>(centered.n);
  const double m2 = t.squaredNorm() / n;
  if (m2 <= kDegenerateRel * data_scale_sq(centered))
    throw degenerate_projection_error("kappa: degenerate projection direction");
  const double m4 = t.array().square().square().sum() / n;
  return m4 / (m2 * m2);
}

KappaEval kappa_eval(const MatrixSample& centered, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v) {
  check_pair_dims(centered, u, v);
  const double n = static_cast<double>(centered.n);
  const Eigen::VectorXd t = projection_scores(centered, u, v);
  const double m2 = t.squaredNorm() / n;
  if (m2 <= kDegenerateRel * data_scale_sq(centered))
    throw degenerate_projection_error("kappa gradient: degenerate projection direction");
  const double m4 = t.array().square().square().sum() / n;

  const Eigen::VectorXd t3 = t.array().cube();
  const Eigen::MatrixXd m_cubed = weighted_observation_sum(centered, t3);  // sum t^3 Y
  const Eigen::MatrixXd m_lin = weighted_observation_sum(centered, t);     // sum t   Y

  const Eigen::VectorXd g4u = (4.0 / n) * (m_cubed * v);
  const Eigen::VectorXd g4v = (4.0 / n) * (m_cubed.transpose() * u);
  const Eigen::VectorXd g2u = (2.0 / n) * (m_lin * v);
  const Eigen::VectorXd g2v = (2.0 / n) * (m_lin.transpose() * u);

  const double m2sq = m2 * m2;
  KappaEval e;
  e.value = m4 / m2sq;
  e.du = (m2sq * g4u - 2.0 * m4 * m2 * g2u) / (m2sq * m2sq);
  e.dv = (m2sq * g4v - 2.0 * m4 * m2 * g2v) / (m2sq * m2sq);
  return e;
}

KappaGradient kappa_gradient(const MatrixSample& centered, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v) {
  KappaEval e = kappa_eval(centered, u, v);
  return {std::move(e.du), std::move(e.dv)};
}

double psi_sample(const MatrixSample& centered, const Eigen::VectorXd& u) {
  if (u.size() != centered.p) throw validation_error("psi: direction dimension");
  return mardia_of_rows(left_projections(centered, u));
}

double psi_transpose_sample(const MatrixSample& centered, const Eigen::VectorXd& v) {
  if (v.size() != centered.q) throw validation_error("psi': direction dimension");
  return mardia_of_rows(right_projections(centered, v));
}

double kappa2_sample(const MatrixSample& centered, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v) {
  check_pair_dims(centered, u, v);
  return projection_scores(centered, u, v).squaredNorm() / static_cast<double>(centered.n);
}

double psi2_sample(const MatrixSample& centered, const Eigen::VectorXd& u) {
  if (u.size() != centered.p) throw validation_error("psi2: direction dimension");
  return left_projections(centered, u).squaredNorm() / static_cast<double>(centered.n);
}

double psi2_transpose_sample(const MatrixSample& centered, const Eigen::VectorXd& v) {
  if (v.size() != centered.q) throw validation_error("psi2': direction dimension");
  return right_projections(centered, v).squaredNorm() / static_cast<double>(centered.n);
}

ConstraintSet constraint_matrices(const MatrixSample& centered,
                                  const std::vector<ProjectionPair>& pairs) {
  if (pairs.empty()) throw validation_error("constraint matrices: no pairs given");
  const double n = static_cast<double>(centered.n);
  ConstraintSet set;
  for (const auto& pair : pairs) {
    check_pair_dims(centered, pair.u, pair.v);
    const Eigen::MatrixXd r = right_projections(centered, pair.v);  // rows (Y_i v)'
    const Eigen::MatrixXd l = left_projections(centered, pair.u);   // rows (Y_i' u)'
    set.g1.push_back(r.transpose() * r / n);
    set.g2.push_back(l.transpose() * l / n);
  }
  return set;
}

bool well_definedness_check(const MatrixSample& centered) {
  const Index pq = centered.p * centered.q;
  if (centered.n <= pq) return false;
  const Eigen::MatrixXd second_moment =
      centered.data * centered.data.transpose() / static_cast<double>(centered.n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(second_moment, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lambda_max = ev(ev.size() - 1);
  return lambda_max > 0.0 && ev(0) > 1e-12 * lambda_max;
}

}  // namespace mpp
