#include "mpp/estimator.hpp"

#include <cmath>

#include "mpp/errors.hpp"
#include "mpp/model.hpp"

namespace mpp {

namespace {

constexpr double kBalancedTol = 1e-10;  // |alpha1 - 1/2| below which signs are undefined
constexpr double kSignFloor = 1e-12;    // third-moment floor relative to scale^3

bool balanced(double alpha1) { return std::abs(alpha1 - 0.5) < kBalancedTol; }

std::vector<int> signs_from_z3(const std::vector<double>& z3, double alpha1,
                               double scale_cubed) {
  const double inv = 1.0 / (alpha1 - (1.0 - alpha1));
  std::vector<int> signs;
  signs.reserve(z3.size());
  for (double z : z3) {
    if (std::abs(z) <= kSignFloor * scale_cubed) {
      signs.push_back(0);
    } else {
      signs.push_back(inv * z > 0.0 ? 1 : -1);
    }
  }
  return signs;
}

}  // namespace

LambdaTheta lambda_theta(double kappa_value, double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0))
    throw validation_error("lambda_theta: alpha1 must lie in (0, 1)");
  if (mixing_regime(alpha1) == MixingRegime::Degenerate)
    throw validation_error("lambda_theta: degenerate mixing regime, 1 - 6 a1 a2 = 0");

  const double beta = alpha1 * (1.0 - alpha1);
  const double denom = beta * (1.0 - 6.0 * beta);
  LambdaTheta out;
  out.theta = std::sqrt(std::max((kappa_value - 3.0) / denom, 0.0));
  const double d2 = 1.0 - beta * out.theta;
  if (d2 > 0.0) {
    out.lambda = std::sqrt(std::max(out.theta / d2, 0.0));
  } else {
    // Sample-level overshoot: fall back to |1 - beta theta| and flag it.
    out.lambda = std::sqrt(out.theta / std::max(std::abs(d2), 1e-12));
    out.clamped = true;
  }
  return out;
}

std::vector<int> pair_signs(const MatrixSample& centered,
                            const std::vector<ProjectionPair>& pairs, double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0))
    throw validation_error("pair_signs: alpha1 must lie in (0, 1)");
  if (balanced(alpha1))
    throw validation_error(
        "pair_signs: undefined for balanced groups (alpha1 = 1/2); "
        "use sign_align_by_correlation instead");

  const double n = static_cast<double>(centered.n);
  std::vector<double> z3;
  for (const auto& pair : pairs) {
    const Eigen::VectorXd t = projection_scores(centered, pair.u, pair.v);
    z3.push_back(t.array().cube().sum() / n);
  }
  return signs_from_z3(z3, alpha1, std::pow(data_scale_sq(centered), 1.5));
}

std::vector<ProjectionPair> sign_align_by_correlation(
    const MatrixSample& centered, std::vector<ProjectionPair> pairs) {
  if (pairs.size() < 2)
    throw validation_error("sign alignment: needs at least two pairs");

  const double n = static_cast<double>(centered.n);
  const Eigen::VectorXd anchor = projection_scores(centered, pairs[0].u, pairs[0].v);
  const double anchor_var = anchor.squaredNorm() / n - std::pow(anchor.mean(), 2);
  if (anchor_var <= 0.0)
    throw degenerate_projection_error("sign alignment: zero-variance score vector");

  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const Eigen::VectorXd score = projection_scores(centered, pairs[k].u, pairs[k].v);
    const double var = score.squaredNorm() / n - std::pow(score.mean(), 2);
    if (var <= 0.0)
      throw degenerate_projection_error("sign alignment: zero-variance score vector");
    const double cov = anchor.dot(score) / n - anchor.mean() * score.mean();
    if (cov < 0.0) pairs[k].v = -pairs[k].v;  // ties at zero keep the sign
  }
  return pairs;
}

ExtractionResult reconstruct_w_lda_from_moments(
    const std::vector<ProjectionPair>& pairs, const std::vector<double>& kappa,
    const std::vector<double>& z2, const std::vector<double>& z3, double alpha1,
    double rank_tol) {
  const std::size_t d = pairs.size();
  if (kappa.size() != d || z2.size() != d || z3.size() != d)
    throw validation_error("reconstruction: per-pair input sizes differ");
  if (d == 0) throw validation_error("reconstruction: no pairs given");

  const Index p = pairs.front().u.size(), q = pairs.front().v.size();
  const double beta = alpha1 * (1.0 - alpha1);

  ExtractionResult result;
  result.pairs = pairs;
  result.w_nlda = Eigen::MatrixXd::Zero(p, q);

  if (balanced(alpha1)) {
    // Signs undefined; pairs must have been aligned by correlation upstream.
    result.signs.assign(d, 1);
  } else {
    double scale_cubed = 0.0;
    for (double z : z2) scale_cubed = std::max(scale_cubed, z);
    result.signs = signs_from_z3(z3, alpha1, std::pow(scale_cubed, 1.5));
  }

  for (std::size_t j = 0; j < d; ++j) {
    if (!(z2[j] > 0.0)) throw numeric_error("reconstruction: non-positive second moment");
    const LambdaTheta lt = lambda_theta(kappa[j], alpha1);
    result.kappa_hat.push_back(kappa[j]);
    result.theta_hat.push_back(lt.theta);
    result.lambda_hat.push_back(lt.lambda);
    result.lambda_clamped = result.lambda_clamped || lt.clamped;

    const double coef = result.signs[j] * lt.lambda *
                        std::sqrt(1.0 + beta * lt.lambda * lt.lambda) / std::sqrt(z2[j]);
    result.w_nlda.noalias() += coef * pairs[j].u * pairs[j].v.transpose();
  }
  result.rank_estimate = estimate_rank(result.lambda_hat, rank_tol);
  return result;
}

ExtractionResult reconstruct_w_lda(const MatrixSample& centered,
                                   const std::vector<ProjectionPair>& pairs,
                                   double alpha1, double rank_tol) {
  const double n = static_cast<double>(centered.n);
  std::vector<double> kappa, z2, z3;
  for (const auto& pair : pairs) {
    const Eigen::VectorXd t = projection_scores(centered, pair.u, pair.v);
    const double m2 = t.squaredNorm() / n;
    kappa.push_back(t.array().square().square().sum() / n / (m2 * m2));
    z2.push_back(m2);
    z3.push_back(t.array().cube().sum() / n);
  }
  return reconstruct_w_lda_from_moments(pairs, kappa, z2, z3, alpha1, rank_tol);
}

int estimate_rank(const std::vector<double>& lambda_hat, double tol) {
  if (!(tol > 0.0)) throw validation_error("rank estimate: tolerance must be positive");
  double max_lambda = 0.0;
  for (double l : lambda_hat) max_lambda = std::max(max_lambda, l);
  if (max_lambda <= 0.0) return 0;
  int rank = 0;
  for (double l : lambda_hat)
    if (l > tol * max_lambda) ++rank;
  return rank;
}

}  // namespace mpp
