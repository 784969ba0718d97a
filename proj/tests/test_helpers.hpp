#pragma once

// Shared fixtures and independent oracles for the test suites. The oracle
// implementations here deliberately use plain per-observation loops so they
// share no code path with the library's vectorized evaluations.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mpp/linalg.hpp"
#include "mpp/model.hpp"
#include "mpp/rng.hpp"
#include "mpp/sample.hpp"

namespace mpp::test {

// ---------------------------------------------------------------------------
// Planted mixtures: T1 = 0, T2 = A^{1/2} U diag(sv) V' B^{1/2}, so the
// standardized mean difference has exactly the requested singular values.
// ---------------------------------------------------------------------------

inline MixtureParams planted_mixture(double alpha1, Index p, Index q, double rho_a,
                                     double rho_b, const std::vector<double>& sv,
                                     std::uint64_t seed) {
  MixtureParams mix;
  mix.alpha1 = alpha1;
  mix.A = ar1_covariance(p, rho_a);
  mix.B = ar1_covariance(q, rho_b);
  Rng rng_u(mix_seed(seed, {1}));
  Rng rng_v(mix_seed(seed, {2}));
  const Eigen::MatrixXd u = random_orthogonal(p, rng_u);
  const Eigen::MatrixXd v = random_orthogonal(q, rng_v);
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, q);
  for (std::size_t j = 0; j < sv.size(); ++j)
    lambda(static_cast<Index>(j), static_cast<Index>(j)) = sv[j];
  mix.T1 = Eigen::MatrixXd::Zero(p, q);
  mix.T2 = sym_sqrt(mix.A) * u * lambda * v.transpose() * sym_sqrt(mix.B);
  return mix;
}

// The two simulation models: 5 x 3, AR(1) row/column correlations 0.6 / 0.3,
// standardized singular values {4} and {5, 3}.
inline MixtureParams model1(double alpha1 = 0.3, std::uint64_t seed = 11) {
  return planted_mixture(alpha1, 5, 3, 0.6, 0.3, {4.0}, seed);
}
inline MixtureParams model2(double alpha1 = 0.3, std::uint64_t seed = 22) {
  return planted_mixture(alpha1, 5, 3, 0.6, 0.3, {5.0, 3.0}, seed);
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Classical sample kurtosis of a scalar series, centered internally.
inline double sample_kurtosis(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2);
}

// kappa_n by definition, computed with explicit loops over observations.
inline double naive_kappa(const std::vector<Eigen::MatrixXd>& obs,
                          const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  std::vector<double> t;
  t.reserve(obs.size());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(obs[0].rows(), obs[0].cols());
  for (const auto& x : obs) mean += x;
  mean /= static_cast<double>(obs.size());
  for (const auto& x : obs) t.push_back(u.dot((x - mean) * v));
  double m2 = 0.0, m4 = 0.0;
  for (double s : t) {
    m2 += s * s;
    m4 += s * s * s * s;
  }
  m2 /= static_cast<double>(t.size());
  m4 /= static_cast<double>(t.size());
  return m4 / (m2 * m2);
}

inline std::vector<Eigen::MatrixXd> to_observation_list(const MatrixSample& s) {
  std::vector<Eigen::MatrixXd> obs;
  obs.reserve(s.n);
  for (Index i = 0; i < s.n; ++i) obs.emplace_back(s.observation(i));
  return obs;
}

// Closed-form Bayes error of a 1-D equal-variance two-component mixture.
inline double bayes_error_1d(double alpha1, double mu1, double mu2, double sd) {
  if (mu2 < mu1) {
    std::swap(mu1, mu2);
    alpha1 = 1.0 - alpha1;
  }
  const double alpha2 = 1.0 - alpha1;
  // Decision boundary of alpha1 phi(x; mu1) = alpha2 phi(x; mu2).
  const double x_star =
      0.5 * (mu1 + mu2) + sd * sd * std::log(alpha1 / alpha2) / (mu2 - mu1);
  auto norm_cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  // Misclassify group 1 above the boundary, group 2 below it.
  return alpha1 * (1.0 - norm_cdf((x_star - mu1) / sd)) +
         alpha2 * norm_cdf((x_star - mu2) / sd);
}

inline double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::nth_element(values.begin(), values.begin() + n / 2, values.end());
  double m = values[n / 2];
  if (n % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + n / 2 - 1, values.end());
    m = 0.5 * (m + values[n / 2 - 1]);
  }
  return m;
}

// Random SPD matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(Index dim, double lo, double hi, Rng& rng) {
  const Eigen::MatrixXd q = random_orthogonal(dim, rng);
  Eigen::VectorXd ev(dim);
  std::uniform_real_distribution<double> unif(lo, hi);
  for (Index i = 0; i < dim; ++i) ev(i) = unif(rng);
  return q * ev.asDiagonal() * q.transpose();
}

}  // namespace mpp::test
