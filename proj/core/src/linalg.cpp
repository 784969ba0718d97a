#include "mpp/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mpp/errors.hpp"
#include "mpp/rng.hpp"

namespace mpp {

bool is_spd(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > 1e-10 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lambda_max = ev(ev.size() - 1);
  return lambda_max > 0.0 && ev(0) > rel_tol * lambda_max;
}

namespace {

Eigen::MatrixXd sym_power(const Eigen::MatrixXd& m, double exponent) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw numeric_error("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double floor = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = std::pow(std::max(ev(i), floor), exponent);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m) { return sym_power(m, 0.5); }

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& m) { return sym_power(m, -0.5); }

Eigen::MatrixXd orthogonal_complement(const std::vector<Eigen::VectorXd>& vectors,
                                      Eigen::Index dim) {
  const Eigen::Index k = static_cast<Eigen::Index>(vectors.size());
  if (k == 0) return Eigen::MatrixXd::Identity(dim, dim);
  if (k >= dim) throw numeric_error("orthogonal complement: too many constraint vectors");

  Eigen::MatrixXd v(dim, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (vectors[j].size() != dim)
      throw numeric_error("orthogonal complement: dimension mismatch");
    v.col(j) = vectors[j];
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  // Rank check on the R diagonal, relative to the column scales.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double scale = v.colwise().norm().maxCoeff();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) <= 1e-10 * std::max(scale, 1e-300))
      throw numeric_error("orthogonal complement: constraint vectors are linearly dependent");
  }

  Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  return full_q.rightCols(dim - k);
}

Eigen::VectorXd canonical_sign(Eigen::VectorXd v) {
  const double tol = 1e-12 * std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      if (v(i) < 0.0) v = -v;
      return v;
    }
  }
  return v;
}

bool is_eigenvector_of(const Eigen::MatrixXd& m, const Eigen::VectorXd& a, double tol) {
  const double norm2 = a.squaredNorm();
  if (norm2 <= 0.0) return false;
  const Eigen::VectorXd ma = m * a;
  const double rayleigh = a.dot(ma) / norm2;
  const double denom = ma.norm();
  if (denom <= 0.0) return false;
  return (ma - rayleigh * a).norm() < tol * denom;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXd z = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace mpp
