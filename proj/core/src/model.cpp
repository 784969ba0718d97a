#include "mpp/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mpp/errors.hpp"
#include "mpp/linalg.hpp"
#include "mpp/rng.hpp"

namespace mpp {

namespace {

constexpr double kRegimeBoundaryTol = 1e-12;  // absolute, |alpha - 1/2| vs 1/sqrt(12)

double regime_boundary() { return 1.0 / std::sqrt(12.0); }

void check_alpha(double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0))
    throw validation_error("mixing proportion must lie in (0, 1)");
}

// Rank-1 factorization H = a b' from the leading singular triple; throws if
// H has numerical rank != 1.
void rank1_factors(const Eigen::MatrixXd& h, Eigen::VectorXd& a, Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0)
    throw validation_error("second-order condition: H must be non-zero");
  if (sv.size() > 1 && sv(1) > 1e-8 * sv(0))
    throw validation_error("second-order condition: H must have rank 1");
  a = sv(0) * svd.matrixU().col(0);
  b = svd.matrixV().col(0);
}

double rayleigh(const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  return x.dot(m * x) / x.squaredNorm();
}

}  // namespace

void MatrixNormalParams::validate() const {
  if (T.rows() < 1 || T.cols() < 1)
    throw validation_error("matrix normal: mean must be non-empty");
  if (A.rows() != T.rows() || B.rows() != T.cols())
    throw validation_error("matrix normal: covariance dimensions do not match the mean");
  if (!is_spd(A)) throw validation_error("matrix normal: A is not symmetric positive definite");
  if (!is_spd(B)) throw validation_error("matrix normal: B is not symmetric positive definite");
}

void MixtureParams::validate() const {
  check_alpha(alpha1);
  if (T1.rows() != T2.rows() || T1.cols() != T2.cols())
    throw validation_error("mixture: mean shapes differ");
  MatrixNormalParams comp{T1, A, B};
  comp.validate();
  if ((T2 - T1).norm() <= 0.0) throw validation_error("mixture: T1 and T2 must differ");
}

int MixtureParams::rank() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(standardized_mean_difference(*this));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int d = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    if (sv(j) > 1e-10 * sv(0)) ++d;
  return d;
}

MixingRegime mixing_regime(double alpha1) {
  check_alpha(alpha1);
  const double dist = std::abs(alpha1 - 0.5);
  const double boundary = regime_boundary();
  if (std::abs(dist - boundary) <= kRegimeBoundaryTol) return MixingRegime::Degenerate;
  return dist < boundary ? MixingRegime::Minimize : MixingRegime::Maximize;
}

Eigen::MatrixXd ar1_covariance(Eigen::Index dim, double rho) {
  if (dim < 1) throw validation_error("ar1: dimension must be positive");
  if (!(std::abs(rho) < 1.0)) throw validation_error("ar1: |rho| must be < 1");
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  return m;
}

MatrixSample sample_matrix_normal(const MatrixNormalParams& params, Index n,
                                  std::uint64_t seed) {
  params.validate();
  if (n < 2) throw validation_error("sampling: need n >= 2");
  const Index p = params.p(), q = params.q();
  const Eigen::MatrixXd a_half = sym_sqrt(params.A);
  const Eigen::MatrixXd b_half = sym_sqrt(params.B);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixSample s(n, p, q);
  Eigen::MatrixXd z(p, q);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < q; ++c)
      for (Index r = 0; r < p; ++r) z(r, c) = normal(rng);
    s.observation(i) = params.T + a_half * z * b_half;
  }
  return s;
}

MatrixSample sample_mixture(const MixtureParams& mix, Index n, std::uint64_t seed) {
  mix.validate();
  if (n < 2) throw validation_error("sampling: need n >= 2");
  const Index p = mix.p(), q = mix.q();
  const Eigen::MatrixXd a_half = sym_sqrt(mix.A);
  const Eigen::MatrixXd b_half = sym_sqrt(mix.B);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MatrixSample s(n, p, q);
  s.labels.resize(n);
  Eigen::MatrixXd z(p, q);
  for (Index i = 0; i < n; ++i) {
    const bool first = unif(rng) < mix.alpha1;
    s.labels[i] = first ? 1 : 2;
    for (Index c = 0; c < q; ++c)
      for (Index r = 0; r < p; ++r) z(r, c) = normal(rng);
    s.observation(i) = (first ? mix.T1 : mix.T2) + a_half * z * b_half;
  }
  return s;
}

Eigen::MatrixXd w_lda(const MixtureParams& mix) {
  mix.validate();
  const Eigen::MatrixXd h = mix.mean_difference();
  const Eigen::MatrixXd left = mix.A.llt().solve(h);                       // A^{-1} H
  return mix.B.llt().solve(left.transpose()).transpose();                  // ... B^{-1}
}

double population_kappa(const MixtureParams& mix, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v) {
  mix.validate();
  if (u.size() != mix.p() || v.size() != mix.q())
    throw validation_error("population_kappa: direction dimensions");
  if (mixing_regime(mix.alpha1) == MixingRegime::Degenerate) return 3.0;

  const double a1 = mix.alpha1, a2 = mix.alpha2();
  const double beta = a1 * a2;
  const double gamma = a1 * a1 * a1 + a2 * a2 * a2;
  const double t = u.dot(mix.A * u) * v.dot(mix.B * v);
  if (!(t > 0.0)) throw numeric_error("population_kappa: zero projected variance");
  const double uhv = u.dot(mix.mean_difference() * v);
  const double z = uhv * uhv / t;
  const double g = z / (1.0 + beta * z);
  return 3.0 + beta * (gamma - 3.0 * beta) * g * g;
}

double population_psi(const MixtureParams& mix, const Eigen::VectorXd& u) {
  mix.validate();
  if (u.size() != mix.p()) throw validation_error("population_psi: direction dimension");
  const double q = static_cast<double>(mix.q());
  const double base = q * (q + 2.0);
  if (mixing_regime(mix.alpha1) == MixingRegime::Degenerate) return base;

  const double a1 = mix.alpha1, a2 = mix.alpha2();
  const double beta = a1 * a2;
  const double gamma = a1 * a1 * a1 + a2 * a2 * a2;
  const Eigen::VectorXd u0 = sym_sqrt(mix.A) * u;
  const Eigen::MatrixXd r = standardized_mean_difference(mix);
  const double z = (r.transpose() * u0).squaredNorm() / u0.squaredNorm();
  const double g = z / (1.0 + beta * z);
  return base + beta * (gamma - 3.0 * beta) * g * g;
}

ProjectionMoments population_projection_moments(const MixtureParams& mix,
                                                const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& v) {
  mix.validate();
  const double a1 = mix.alpha1, a2 = mix.alpha2();
  const double beta = a1 * a2;
  const double gamma = a1 * a1 * a1 + a2 * a2 * a2;
  const double s2 = u.dot(mix.A * u) * v.dot(mix.B * v);
  const double uhv = u.dot(mix.mean_difference() * v);
  // Component means of the centered projection: mu1 = -a2 u'Hv, mu2 = a1 u'Hv.
  const double mu1 = -a2 * uhv, mu2 = a1 * uhv;
  ProjectionMoments m;
  m.m2 = s2 + beta * uhv * uhv;
  m.m3 = a1 * mu1 * mu1 * mu1 + a2 * mu2 * mu2 * mu2;
  const double a2m = beta * uhv * uhv;
  const double a4m = beta * gamma * uhv * uhv * uhv * uhv;
  m.kappa = (3.0 * s2 * s2 + 6.0 * a2m * s2 + a4m) / (m.m2 * m.m2);
  return m;
}

Eigen::MatrixXd standardized_mean_difference(const MixtureParams& mix) {
  return sym_inv_sqrt(mix.A) * mix.mean_difference() * sym_inv_sqrt(mix.B);
}

std::vector<AnalyticPair> analytic_pairs(const MixtureParams& mix) {
  mix.validate();
  const Eigen::MatrixXd a_inv_half = sym_inv_sqrt(mix.A);
  const Eigen::MatrixXd b_inv_half = sym_inv_sqrt(mix.B);
  const Eigen::MatrixXd r = a_inv_half * mix.mean_difference() * b_inv_half;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  std::vector<AnalyticPair> pairs;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv(j) <= 1e-10 * sv(0)) break;
    AnalyticPair pair;
    pair.sigma = sv(j);
    pair.u0 = svd.matrixU().col(j);
    pair.v0 = svd.matrixV().col(j);
    // Fix the joint sign so the representative is deterministic.
    const Eigen::VectorXd u0_fixed = canonical_sign(pair.u0);
    if ((u0_fixed - pair.u0).norm() > 1e-8) {
      pair.u0 = -pair.u0;
      pair.v0 = -pair.v0;
    }
    pair.u = (a_inv_half * pair.u0).normalized();
    pair.v = (b_inv_half * pair.v0).normalized();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

bool second_order_psi2_condition(const MixtureParams& mix) {
  mix.validate();
  Eigen::VectorXd a, b;
  rank1_factors(mix.mean_difference(), a, b);
  if (!is_eigenvector_of(mix.A, a)) return false;

  const double beta = mix.alpha1 * mix.alpha2();
  const double lambda = rayleigh(mix.A, a);
  const double tr_b = mix.B.trace();
  const Eigen::MatrixXd m =
      tr_b * mix.A + beta * b.squaredNorm() * (a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const Eigen::Index pp = m.rows();
  const double phi2 = pp >= 2 ? es.eigenvalues()(pp - 2) : es.eigenvalues()(pp - 1);

  const double a_ainv_a = a.dot(mix.A.llt().solve(a));
  const double rhs = lambda * (tr_b + beta * a_ainv_a * b.squaredNorm());
  return phi2 < rhs;
}

bool second_order_kappa2_condition(const MixtureParams& mix) {
  mix.validate();
  Eigen::VectorXd a, b;
  rank1_factors(mix.mean_difference(), a, b);
  if (!is_eigenvector_of(mix.A, a) || !is_eigenvector_of(mix.B, b)) return false;

  // Simplicity of the matched eigenvalues is assumed, not enforced.
  const double sigma_a = rayleigh(mix.A, a);
  const double lambda_b = rayleigh(mix.B, b);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(mix.A, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(mix.B, Eigen::EigenvaluesOnly);
  const double sigma1 = es_a.eigenvalues()(mix.A.rows() - 1);
  const double lambda1 = es_b.eigenvalues()(mix.B.rows() - 1);

  const double beta = mix.alpha1 * mix.alpha2();
  return sigma_a * lambda_b + beta * a.squaredNorm() * b.squaredNorm() > sigma1 * lambda1;
}

}  // namespace mpp
