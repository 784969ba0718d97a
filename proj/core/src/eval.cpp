#include "mpp/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpp/errors.hpp"
#include "mpp/linalg.hpp"

namespace mpp {

double msi(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw validation_error("msi: dimension mismatch");
  const double nx = x.norm(), ny = y.norm();
  if (nx <= 0.0 || ny <= 0.0) throw validation_error("msi: zero vector");
  return std::min(std::abs(x.dot(y)) / (nx * ny), 1.0);
}

double frobenius_log_error(const Eigen::MatrixXd& w_hat, const Eigen::MatrixXd& w_true) {
  if (w_hat.rows() != w_true.rows() || w_hat.cols() != w_true.cols())
    throw validation_error("frobenius error: shape mismatch");
  const double err2 = (w_hat - w_true).squaredNorm();
  return std::log(std::max(err2, 1e-300));
}

Eigen::VectorXd project_scores(const MatrixSample& sample, const ProjectionPair& pair) {
  if (pair.u.size() != sample.p || pair.v.size() != sample.q)
    throw validation_error("project: direction dimensions do not match the sample");
  return projection_scores(sample, pair.u, pair.v);
}

Eigen::VectorXd project_scores(const MatrixSample& sample, const Eigen::MatrixXd& w) {
  if (w.rows() != sample.p || w.cols() != sample.q)
    throw validation_error("project: matrix direction shape mismatch");
  // <W, X_i> = vec(W)' vec(X_i)
  const Eigen::Map<const Eigen::VectorXd> w_vec(w.data(), w.size());
  return sample.data.transpose() * w_vec;
}

// ---------------------------------------------------------------------------
// EM for a univariate two-component Gaussian mixture
// ---------------------------------------------------------------------------

namespace {

constexpr int kEmMaxIters = 500;
constexpr double kEmTol = 1e-10;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

double misclassification_rate(const std::vector<int>& labels,
                              const std::vector<std::uint8_t>& truth) {
  const std::size_t n = labels.size();
  std::size_t direct = 0, swapped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != truth[i]) ++direct;
    if (3 - labels[i] != truth[i]) ++swapped;
  }
  return static_cast<double>(std::min(direct, swapped)) / static_cast<double>(n);
}

}  // namespace

ClusteringResult gmm1d_em(const Eigen::VectorXd& scores, bool equal_variance,
                          std::uint64_t seed,
                          const std::vector<std::uint8_t>* true_labels) {
  (void)seed;  // initialization is a deterministic quantile split
  const Index n = scores.size();
  if (n < 4) throw validation_error("em: need at least 4 observations");
  const double total_mean = scores.mean();
  const double total_var =
      (scores.array() - total_mean).square().sum() / static_cast<double>(n);
  if (total_var <= 0.0)
    throw degenerate_projection_error("em: constant scores");
  const double var_floor = 1e-12 * total_var;

  // Median split initialization.
  std::vector<double> sorted(scores.data(), scores.data() + n);
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[n / 2];

  std::array<double, 2> w{}, mu{}, var{};
  {
    double s1 = 0.0, s2 = 0.0, ss1 = 0.0, ss2 = 0.0;
    Index n1 = 0;
    for (Index i = 0; i < n; ++i) {
      if (scores(i) <= median) {
        ++n1;
        s1 += scores(i);
        ss1 += scores(i) * scores(i);
      } else {
        s2 += scores(i);
        ss2 += scores(i) * scores(i);
      }
    }
    Index n2 = n - n1;
    if (n1 == 0 || n2 == 0) throw degenerate_projection_error("em: degenerate split");
    w = {static_cast<double>(n1) / n, static_cast<double>(n2) / n};
    mu = {s1 / n1, s2 / n2};
    var = {std::max(ss1 / n1 - mu[0] * mu[0], var_floor),
           std::max(ss2 / n2 - mu[1] * mu[1], var_floor)};
    if (equal_variance) {
      const double pooled = w[0] * var[0] + w[1] * var[1];
      var = {pooled, pooled};
    }
  }

  Eigen::VectorXd resp(n);  // posterior of component 1
  double loglik = -std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < kEmMaxIters; ++iter) {
    // E step with the usual log-sum-exp guard.
    double ll = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double l1 = std::log(w[0]) + log_normal_pdf(scores(i), mu[0], var[0]);
      const double l2 = std::log(w[1]) + log_normal_pdf(scores(i), mu[1], var[1]);
      const double m = std::max(l1, l2);
      const double denom = std::exp(l1 - m) + std::exp(l2 - m);
      resp(i) = std::exp(l1 - m) / denom;
      ll += m + std::log(denom);
    }
    if (ll + 1e-8 * (1.0 + std::abs(ll)) < loglik)
      throw numeric_error("em: log-likelihood decreased");
    const bool done = std::abs(ll - loglik) < kEmTol;
    loglik = ll;
    if (done) break;

    // M step.
    const double r1 = resp.sum(), r2 = n - r1;
    if (r1 <= 0.0 || r2 <= 0.0) break;
    w = {r1 / n, r2 / n};
    mu[0] = resp.dot(scores) / r1;
    mu[1] = (scores.sum() - resp.dot(scores)) / r2;
    double v1 = 0.0, v2 = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d1 = scores(i) - mu[0], d2 = scores(i) - mu[1];
      v1 += resp(i) * d1 * d1;
      v2 += (1.0 - resp(i)) * d2 * d2;
    }
    if (equal_variance) {
      const double pooled = std::max((v1 + v2) / n, var_floor);
      var = {pooled, pooled};
    } else {
      var = {std::max(v1 / r1, var_floor), std::max(v2 / r2, var_floor)};
    }
  }

  ClusteringResult result;
  result.labels.resize(n);
  for (Index i = 0; i < n; ++i) result.labels[i] = resp(i) >= 0.5 ? 1 : 2;
  result.means = mu;
  result.variances = var;
  result.weights = w;
  result.loglik = loglik;
  result.iterations = iter;
  if (true_labels) {
    if (static_cast<Index>(true_labels->size()) != n)
      throw validation_error("em: label count mismatch");
    result.misclassification = misclassification_rate(result.labels, *true_labels);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

LdaBaselineResult lda_baseline(const MatrixSample& sample) {
  if (!sample.has_labels())
    throw validation_error("lda baseline: labels are required");
  const Index n = sample.n, p = sample.p, q = sample.q;

  // Group means.
  Eigen::MatrixXd t1 = Eigen::MatrixXd::Zero(p, q), t2 = Eigen::MatrixXd::Zero(p, q);
  Index n1 = 0, n2 = 0;
  for (Index i = 0; i < n; ++i) {
    if (sample.labels[i] == 1) {
      t1 += sample.observation(i);
      ++n1;
    } else {
      t2 += sample.observation(i);
      ++n2;
    }
  }
  if (n1 < 2 || n2 < 2)
    throw validation_error("lda baseline: both classes need at least 2 members");
  t1 /= static_cast<double>(n1);
  t2 /= static_cast<double>(n2);

  // Pooled within-group residuals.
  MatrixSample resid(n, p, q);
  for (Index i = 0; i < n; ++i)
    resid.observation(i) = sample.observation(i) - (sample.labels[i] == 1 ? t1 : t2);

  // Flip-flop ML for the separable covariance, scale fixed by tr(B) = q.
  Eigen::MatrixXd a_hat = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd b_hat = Eigen::MatrixXd::Identity(q, q);
  bool converged = false;
  int sweep = 0;
  for (; sweep < 200; ++sweep) {
    Eigen::LLT<Eigen::MatrixXd> llt_a(a_hat);
    if (llt_a.info() != Eigen::Success)
      throw numeric_error("lda baseline: singular row-covariance update");
    const Eigen::MatrixXd a_inv = llt_a.solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd b_new = Eigen::MatrixXd::Zero(q, q);
    for (Index i = 0; i < n; ++i) {
      const auto r = resid.observation(i);
      b_new.noalias() += r.transpose() * a_inv * r;
    }
    b_new /= static_cast<double>(n * p);
    b_new *= static_cast<double>(q) / b_new.trace();

    Eigen::LLT<Eigen::MatrixXd> llt_b(b_new);
    if (llt_b.info() != Eigen::Success)
      throw numeric_error("lda baseline: singular column-covariance update");
    const Eigen::MatrixXd b_inv = llt_b.solve(Eigen::MatrixXd::Identity(q, q));
    Eigen::MatrixXd a_new = Eigen::MatrixXd::Zero(p, p);
    for (Index i = 0; i < n; ++i) {
      const auto r = resid.observation(i);
      a_new.noalias() += r * b_inv * r.transpose();
    }
    a_new /= static_cast<double>(n * q);

    const double delta = (a_new - a_hat).norm() / std::max(a_hat.norm(), 1e-300) +
                         (b_new - b_hat).norm() / std::max(b_hat.norm(), 1e-300);
    a_hat = std::move(a_new);
    b_hat = std::move(b_new);
    if (delta < 1e-8) {
      converged = true;
      ++sweep;
      break;
    }
  }

  LdaBaselineResult result;
  result.a_hat = a_hat;
  result.b_hat = b_hat;
  result.converged = converged;
  result.sweeps = sweep;
  const Eigen::MatrixXd left = a_hat.llt().solve(t2 - t1);
  result.w = b_hat.llt().solve(left.transpose()).transpose();
  return result;
}

namespace {

Eigen::VectorXd top_eigenvector(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw numeric_error("top eigenvector failed");
  return canonical_sign(es.eigenvectors().col(m.rows() - 1));
}

}  // namespace

std::vector<ProjectionPair> mpca_baseline(const MatrixSample& sample, int n_pairs) {
  if (n_pairs < 1 || n_pairs > std::min(sample.p, sample.q))
    throw validation_error("mpca: n_pairs must lie in [1, min(p,q)]");
  const MatrixSample centered = center(sample);

  std::vector<ProjectionPair> pairs;
  std::vector<Eigen::VectorXd> prev_u, prev_v;
  for (int k = 0; k < n_pairs; ++k) {
    const Eigen::MatrixXd bu = orthogonal_complement(prev_u, sample.p);
    const Eigen::MatrixXd bv = orthogonal_complement(prev_v, sample.q);
    const MatrixSample sub =
        k == 0 ? centered : project_sample(centered, bu, bv);

    Eigen::VectorXd v = top_eigenvector(gram_right(sub));
    Eigen::VectorXd u;
    for (int iter = 0; iter < 500; ++iter) {
      const Eigen::MatrixXd r = right_projections(sub, v);
      Eigen::VectorXd u_new =
          top_eigenvector(r.transpose() * r / static_cast<double>(sub.n));
      const Eigen::MatrixXd l = left_projections(sub, u_new);
      Eigen::VectorXd v_new =
          top_eigenvector(l.transpose() * l / static_cast<double>(sub.n));
      const double delta = (u.size() ? (u_new - u).norm() : 1.0) + (v_new - v).norm();
      u = std::move(u_new);
      v = std::move(v_new);
      if (delta < 1e-10) break;
    }

    ProjectionPair pair;
    pair.u = canonical_sign((bu * u).normalized());
    pair.v = canonical_sign((bv * v).normalized());
    pair.value = kappa2_sample(centered, pair.u, pair.v);
    prev_u.push_back(pair.u);
    prev_v.push_back(pair.v);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> twod2pca_baseline(const MatrixSample& sample) {
  const MatrixSample centered = center(sample);
  return {top_eigenvector(gram_left(centered)), top_eigenvector(gram_right(centered))};
}

}  // namespace mpp
