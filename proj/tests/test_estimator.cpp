#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mpp/errors.hpp"
#include "mpp/estimator.hpp"
#include "mpp/eval.hpp"
#include "mpp/model.hpp"
#include "mpp/optimizer.hpp"
#include "test_helpers.hpp"

using namespace mpp;

namespace {

// kappa produced by a planted singular value sigma: z = sigma^2.
double kappa_at_sigma(double sigma, double alpha1) {
  const double beta = alpha1 * (1.0 - alpha1);
  const double gamma = std::pow(alpha1, 3) + std::pow(1.0 - alpha1, 3);
  const double z = sigma * sigma;
  const double g = z / (1.0 + beta * z);
  return 3.0 + beta * (gamma - 3.0 * beta) * g * g;
}

}  // namespace

TEST_CASE("lambda_theta") {
  SUBCASE("the planted example inverts to lambda = 4") {
    const LambdaTheta lt = lambda_theta(2.26471, 0.3);
    CHECK(lt.lambda == doctest::Approx(4.000).epsilon(1e-3));
    CHECK_FALSE(lt.clamped);
  }

  SUBCASE("kappa = 3 carries no signal") {
    const LambdaTheta lt = lambda_theta(3.0, 0.25);
    CHECK(lt.theta == 0.0);
    CHECK(lt.lambda == 0.0);
  }

  SUBCASE("wrong-signed excess is thresholded to zero") {
    // alpha1 = 0.3 lies in A_min: (kappa - 3) / (b(1-6b)) < 0 for kappa > 3.
    const LambdaTheta lt = lambda_theta(3.5, 0.3);
    CHECK(lt.theta == 0.0);
    CHECK(lt.lambda == 0.0);
  }

  SUBCASE("round trip recovers sigma") {
    for (double sigma : {0.5, 1.0, 2.0, 4.0, 5.0}) {
      for (double alpha1 : {0.1, 0.3, 0.4}) {
        const LambdaTheta lt = lambda_theta(kappa_at_sigma(sigma, alpha1), alpha1);
        CHECK(lt.lambda == doctest::Approx(sigma).epsilon(1e-10));
      }
    }
  }

  SUBCASE("degenerate mixing proportion is rejected") {
    CHECK_THROWS_AS(lambda_theta(2.9, 0.5 - 1.0 / std::sqrt(12.0)), validation_error);
    CHECK_THROWS_AS(lambda_theta(2.9, 1.2), validation_error);
  }

  SUBCASE("overshoot falls back to the absolute value with a flag") {
    // theta large enough that 1 - a1 a2 theta <= 0.
    const LambdaTheta lt = lambda_theta(0.5, 0.49);
    CHECK(lt.clamped);
    CHECK(std::isfinite(lt.lambda));
    CHECK(lt.lambda > 0.0);
  }
}

TEST_CASE("pair signs") {
  const MixtureParams mix = test::model1(0.3);
  const auto truth = analytic_pairs(mix);
  const MatrixSample centered = center(sample_mixture(mix, 100000, 3));
  ProjectionPair pair{truth[0].u, truth[0].v, 0.0};

  SUBCASE("matches the separation orientation at the optimum") {
    const auto signs = pair_signs(centered, {pair}, 0.3);
    const double uhv = pair.u.dot(mix.mean_difference() * pair.v);
    CHECK(signs[0] == (uhv > 0 ? 1 : -1));
  }

  SUBCASE("flipping u flips the sign") {
    ProjectionPair flipped{-pair.u, pair.v, 0.0};
    CHECK(pair_signs(centered, {pair}, 0.3)[0] ==
          -pair_signs(centered, {flipped}, 0.3)[0]);
  }

  SUBCASE("symmetric two-point data have sign 0") {
    Rng rng(4);
    const Eigen::MatrixXd m = gaussian_matrix(5, 3, rng);
    MatrixSample s(2, 5, 3);
    s.observation(0) = m;
    s.observation(1) = -m;
    CHECK(pair_signs(s, {pair}, 0.3)[0] == 0);
  }

  SUBCASE("balanced groups are rejected") {
    CHECK_THROWS_AS(pair_signs(centered, {pair}, 0.5), validation_error);
  }
}

TEST_CASE("sign alignment by correlation") {
  const MixtureParams mix = test::model2(0.5, 41);
  const MatrixSample centered = center(sample_mixture(mix, 60000, 5));
  const auto truth = analytic_pairs(mix);
  ProjectionPair first{truth[0].u, truth[0].v, 0.0};
  ProjectionPair second{truth[1].u, truth[1].v, 0.0};

  SUBCASE("an anti-aligned second pair is flipped back") {
    // Orient the second pair against the first, then align.
    const Eigen::VectorXd s1 = project_scores(centered, first);
    Eigen::VectorXd s2 = project_scores(centered, second);
    const double n = static_cast<double>(centered.n);
    double cov = s1.dot(s2) / n - s1.mean() * s2.mean();
    if (cov > 0) second.v = -second.v;  // force anti-alignment

    const auto aligned = sign_align_by_correlation(centered, {first, second});
    const Eigen::VectorXd s2_aligned = project_scores(centered, aligned[1]);
    cov = s1.dot(s2_aligned) / n - s1.mean() * s2_aligned.mean();
    CHECK(cov >= 0.0);
  }

  SUBCASE("exactly zero correlation keeps the sign") {
    // Hand-built scores: pair (e1, e1) reads entry (0,0), pair (e2, e2)
    // reads entry (1,1); the two series are exactly uncorrelated.
    MatrixSample s(4, 2, 2);
    s.data.setZero();
    const double a[4] = {1, 1, -1, -1};
    const double b[4] = {1, -1, 1, -1};
    for (Index i = 0; i < 4; ++i) {
      s.observation(i)(0, 0) = a[i];
      s.observation(i)(1, 1) = b[i];
    }
    ProjectionPair p1{Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0), 0.0};
    ProjectionPair p2{Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1), 0.0};
    const auto aligned = sign_align_by_correlation(s, {p1, p2});
    CHECK((aligned[1].v - p2.v).norm() == 0.0);
  }

  SUBCASE("fewer than two pairs is a usage error") {
    CHECK_THROWS_AS(sign_align_by_correlation(centered, {first}), validation_error);
  }
}

TEST_CASE("population-exact reconstruction equals W_LDA") {
  for (int model = 1; model <= 2; ++model) {
    const MixtureParams mix = model == 1 ? test::model1() : test::model2();
    const auto truth = analytic_pairs(mix);

    std::vector<ProjectionPair> pairs;
    std::vector<double> kappa, z2, z3;
    for (const auto& t : truth) {
      pairs.push_back({t.u, t.v, 0.0});
      const ProjectionMoments m = population_projection_moments(mix, t.u, t.v);
      kappa.push_back(m.kappa);
      z2.push_back(m.m2);
      z3.push_back(m.m3);
    }
    const ExtractionResult res =
        reconstruct_w_lda_from_moments(pairs, kappa, z2, z3, mix.alpha1);
    CHECK((res.w_nlda - w_lda(mix)).norm() < 1e-8);
    CHECK(res.rank_estimate == mix.rank());
    for (std::size_t j = 0; j < truth.size(); ++j)
      CHECK(res.lambda_hat[j] == doctest::Approx(truth[j].sigma).epsilon(1e-8));
  }
}

TEST_CASE("reconstruction details") {
  SUBCASE("a single pair with lambda = 0 gives the zero matrix") {
    Rng rng(6);
    ProjectionPair pair{random_unit_vector(4, rng), random_unit_vector(3, rng), 0.0};
    const ExtractionResult res =
        reconstruct_w_lda_from_moments({pair}, {3.0}, {1.0}, {0.5}, 0.3);
    CHECK(res.w_nlda.norm() == 0.0);
    CHECK(res.rank_estimate == 0);
  }

  SUBCASE("invariant under joint sign flips of a pair") {
    const MixtureParams mix = test::model1();
    const MatrixSample centered = center(sample_mixture(mix, 20000, 7));
    const auto truth = analytic_pairs(mix);
    ProjectionPair pair{truth[0].u, truth[0].v, 0.0};
    ProjectionPair flipped{-truth[0].u, -truth[0].v, 0.0};
    const ExtractionResult a = reconstruct_w_lda(centered, {pair}, 0.3);
    const ExtractionResult b = reconstruct_w_lda(centered, {flipped}, 0.3);
    CHECK((a.w_nlda - b.w_nlda).norm() < 1e-12);
  }

  SUBCASE("invariant under a single-side flip too") {
    const MixtureParams mix = test::model1();
    const MatrixSample centered = center(sample_mixture(mix, 20000, 8));
    const auto truth = analytic_pairs(mix);
    ProjectionPair pair{truth[0].u, truth[0].v, 0.0};
    ProjectionPair flipped{-truth[0].u, truth[0].v, 0.0};
    const ExtractionResult a = reconstruct_w_lda(centered, {pair}, 0.3);
    const ExtractionResult b = reconstruct_w_lda(centered, {flipped}, 0.3);
    CHECK((a.w_nlda - b.w_nlda).norm() < 1e-12);
  }

  SUBCASE("balanced mixing sets all signs to +1") {
    const MixtureParams mix = test::model2(0.5, 43);
    const MatrixSample centered = center(sample_mixture(mix, 30000, 9));
    const auto truth = analytic_pairs(mix);
    std::vector<ProjectionPair> pairs{{truth[0].u, truth[0].v, 0.0},
                                      {truth[1].u, truth[1].v, 0.0}};
    const auto aligned = sign_align_by_correlation(centered, pairs);
    const ExtractionResult res = reconstruct_w_lda(centered, aligned, 0.5);
    CHECK(res.signs == std::vector<int>{1, 1});
  }
}

TEST_CASE("estimate_rank") {
  CHECK(estimate_rank({4.0, 0.0, 0.0}, 0.05) == 1);
  CHECK(estimate_rank({5.0, 3.0}, 0.05) == 2);
  CHECK(estimate_rank({0.0, 0.0}, 0.05) == 0);
  CHECK_THROWS_AS(estimate_rank({1.0}, 0.0), validation_error);

  // Scale free.
  CHECK(estimate_rank({8.0, 0.2, 0.1}, 0.05) == estimate_rank({80.0, 2.0, 1.0}, 0.05));
}

TEST_CASE("end-to-end estimation on model 1") {
  const MixtureParams mix = test::model1();
  const MatrixSample sample = sample_mixture(mix, 16000, 10);
  OptimizerConfig config;
  config.alpha1 = 0.3;
  config.restarts = 10;
  config.seed = 12;
  const ExtractionSequence seq = extract_sequence(sample, config);
  const MatrixSample centered = center(sample);
  const ExtractionResult res = reconstruct_w_lda(centered, seq.pairs, 0.3);

  const Eigen::MatrixXd truth = w_lda(mix);
  CHECK(res.rank_estimate == 1);
  CHECK(res.lambda_hat[0] == doctest::Approx(4.0).epsilon(0.15));
  // The reconstruction tracks the truth reasonably at this sample size.
  CHECK(frobenius_log_error(res.w_nlda, truth) < std::log(truth.squaredNorm()));
}
