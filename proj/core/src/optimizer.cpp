#include "mpp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpp/errors.hpp"
#include "mpp/linalg.hpp"
#include "mpp/model.hpp"
#include "mpp/rng.hpp"

namespace mpp {

namespace {

constexpr double kStepMin = 1e-12;  // BB step clamp
constexpr double kStepMax = 1e4;
constexpr int kDegenerateRetries = 5;  // fresh draws per start before giving up

// Score to maximize for each optimization direction, and the chain factor
// d(score)/d(kappa) used to turn the kappa gradient into the score gradient.
double score_of(Direction dir, double kappa) {
  switch (dir) {
    case Direction::Minimize: return -kappa;
    case Direction::Maximize: return kappa;
    case Direction::SquaredExcess: return (kappa - 3.0) * (kappa - 3.0);
    default: throw validation_error("optimizer: unresolved direction");
  }
}

double chain_of(Direction dir, double kappa) {
  switch (dir) {
    case Direction::Minimize: return -1.0;
    case Direction::Maximize: return 1.0;
    case Direction::SquaredExcess: return 2.0 * (kappa - 3.0);
    default: throw validation_error("optimizer: unresolved direction");
  }
}

struct BBRun {
  Eigen::VectorXd u, v;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double score = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// One gradient-ascent run with Barzilai-Borwein steps from a fixed start.
// Iterates live in ambient coordinates and are renormalized to the spheres
// after every step; stops when the score-gradient norm drops below epsilon.
BBRun bb_single_start(const MatrixSample& data, Direction dir, double epsilon,
                      int max_iters, double gamma0, Eigen::VectorXd u,
                      Eigen::VectorXd v) {
  BBRun run;
  double gamma = gamma0;

  KappaEval eval = kappa_eval(data, u, v);
  Eigen::VectorXd gu = chain_of(dir, eval.value) * eval.du;
  Eigen::VectorXd gv = chain_of(dir, eval.value) * eval.dv;

  int iter = 0;
  for (; iter < max_iters; ++iter) {
    const double gnorm = std::sqrt(gu.squaredNorm() + gv.squaredNorm());
    if (gnorm < epsilon) {
      run.converged = true;
      break;
    }
    Eigen::VectorXd u1 = (u + gamma * gu).normalized();
    Eigen::VectorXd v1 = (v + gamma * gv).normalized();

    const KappaEval eval1 = kappa_eval(data, u1, v1);
    const double chain = chain_of(dir, eval1.value);
    Eigen::VectorXd gu1 = chain * eval1.du;
    Eigen::VectorXd gv1 = chain * eval1.dv;

    // gamma = |dx' dg| / ||dg||^2 on the concatenated parameters.
    const double dxdg =
        (u1 - u).dot(gu1 - gu) + (v1 - v).dot(gv1 - gv);
    const double dg2 = (gu1 - gu).squaredNorm() + (gv1 - gv).squaredNorm();
    if (dg2 > 0.0) gamma = std::clamp(std::abs(dxdg) / dg2, kStepMin, kStepMax);

    u = std::move(u1);
    v = std::move(v1);
    gu = std::move(gu1);
    gv = std::move(gv1);
    eval = eval1;
  }

  run.u = std::move(u);
  run.v = std::move(v);
  run.kappa = eval.value;
  run.score = score_of(dir, eval.value);
  run.iterations = iter;
  return run;
}

// Multi-start wrapper. Starts are drawn uniformly on the product of spheres;
// a start hitting a degenerate projection is redrawn a bounded number of
// times. Returns the best run by score. Throws degenerate_projection_error
// only if every start failed.
BBRun bb_multi_start(const MatrixSample& data, Direction dir,
                     const OptimizerConfig& config, int stage,
                     std::uint64_t salt) {
  BBRun best;
  bool have_any = false;

  for (int s = 0; s < config.restarts; ++s) {
    Rng rng(mix_seed(config.seed, {salt, static_cast<std::uint64_t>(stage),
                                   static_cast<std::uint64_t>(s)}));
    for (int attempt = 0; attempt <= kDegenerateRetries; ++attempt) {
      Eigen::VectorXd u0 = random_unit_vector(data.p, rng);
      Eigen::VectorXd v0 = random_unit_vector(data.q, rng);
      try {
        BBRun run = bb_single_start(data, dir, config.epsilon, config.max_iters,
                                    config.gamma0, std::move(u0), std::move(v0));
        if (!have_any || run.score > best.score) best = std::move(run);
        have_any = true;
        break;
      } catch (const degenerate_projection_error&) {
        if (attempt == kDegenerateRetries) break;  // give up on this start
      }
    }
  }
  if (!have_any)
    throw degenerate_projection_error("optimizer: every start hit a degenerate projection");
  return best;
}

// Constraint vectors of the extracted pairs: c_u = G_{n1k} u_k, c_v = G_{n2k} v_k.
void append_constraint_vectors(const ConstraintSet& constraints,
                               const std::vector<ProjectionPair>& pairs,
                               std::vector<Eigen::VectorXd>& cu,
                               std::vector<Eigen::VectorXd>& cv) {
  const std::size_t k = pairs.size() - 1;
  cu.push_back(constraints.g1[k] * pairs[k].u);
  cv.push_back(constraints.g2[k] * pairs[k].v);
}

}  // namespace

Direction OptimizerConfig::resolved_direction() const {
  if (direction != Direction::Auto) return direction;
  switch (mixing_regime(alpha1)) {
    case MixingRegime::Minimize: return Direction::Minimize;
    case MixingRegime::Maximize: return Direction::Maximize;
    default:
      throw validation_error(
          "optimizer: alpha1 lies on the degenerate mixing boundary; "
          "the kurtosis index carries no group information there");
  }
}

void OptimizerConfig::validate(Index p, Index q) const {
  if (!(epsilon > 0.0)) throw validation_error("optimizer: epsilon must be positive");
  if (restarts < 1) throw validation_error("optimizer: need at least one restart");
  if (max_iters < 1) throw validation_error("optimizer: max_iters must be positive");
  if (!(gamma0 > 0.0)) throw validation_error("optimizer: gamma0 must be positive");
  const Index cap = std::min(p, q) - 1;
  if (n_pairs < 1 || n_pairs > cap)
    throw validation_error("optimizer: n_pairs must lie in [1, min(p,q) - 1]");
  (void)resolved_direction();
}

DeflationState DeflationState::identity(Index p, Index q) {
  DeflationState s;
  s.basis_u = Eigen::MatrixXd::Identity(p, p);
  s.basis_v = Eigen::MatrixXd::Identity(q, q);
  s.k = 0;
  return s;
}

PairResult optimize_pair_bb(const MatrixSample& centered, const OptimizerConfig& config,
                            const DeflationState& state) {
  const Index pd = state.basis_u.cols(), qd = state.basis_v.cols();
  if (pd < 1 || qd < 1 || std::max(pd, qd) < 2)
    throw validation_error("optimizer: deflated space is too small");

  const Direction dir = config.resolved_direction();
  const bool is_identity = state.k == 0 && pd == centered.p && qd == centered.q;
  const MatrixSample projected =
      is_identity ? centered : project_sample(centered, state.basis_u, state.basis_v);

  BBRun best = bb_multi_start(projected, dir, config, state.k, /*salt=*/0x0b1);

  PairResult result;
  result.pair.u = canonical_sign((state.basis_u * best.u).normalized());
  result.pair.v = canonical_sign((state.basis_v * best.v).normalized());
  result.pair.value = best.kappa;
  result.converged = best.converged;
  result.iterations = best.iterations;
  return result;
}

ExtractionSequence extract_sequence(const MatrixSample& sample,
                                    const OptimizerConfig& config) {
  config.validate(sample.p, sample.q);
  const MatrixSample centered = center(sample);
  if (!well_definedness_check(centered))
    throw numeric_error("extraction: sample fails the well-definedness check");

  ExtractionSequence seq;
  DeflationState state = DeflationState::identity(sample.p, sample.q);
  std::vector<Eigen::VectorXd> cu, cv;

  for (int k = 0; k < config.n_pairs; ++k) {
    PairResult res = optimize_pair_bb(centered, config, state);
    seq.pairs.push_back(res.pair);
    seq.converged.push_back(res.converged);

    const ConstraintSet last =
        constraint_matrices(centered, {seq.pairs.back()});
    seq.constraints.g1.push_back(last.g1.front());
    seq.constraints.g2.push_back(last.g2.front());
    append_constraint_vectors(seq.constraints, seq.pairs, cu, cv);

    if (k + 1 == config.n_pairs) break;
    try {
      state.basis_u = orthogonal_complement(cu, sample.p);
      state.basis_v = orthogonal_complement(cv, sample.q);
      state.k = k + 1;
    } catch (const numeric_error& e) {
      seq.complete = false;
      seq.diagnostic = std::string("deflation stopped early: ") + e.what();
      break;
    }
  }
  return seq;
}

ExtractionSequence flipflop_extract(const MatrixSample& sample,
                                    const OptimizerConfig& config) {
  config.validate(sample.p, sample.q);
  const Direction dir = config.resolved_direction();
  const MatrixSample centered = center(sample);
  if (!well_definedness_check(centered))
    throw numeric_error("extraction: sample fails the well-definedness check");

  ExtractionSequence seq;
  DeflationState state = DeflationState::identity(sample.p, sample.q);
  std::vector<Eigen::VectorXd> cu, cv;

  // One-sided kurtosis subproblem over the rows of `rows` (n x m), reusing
  // the pair machinery with a degenerate q = 1 column side.
  auto vector_sample = [](const Eigen::MatrixXd& rows) {
    MatrixSample s(rows.rows(), rows.cols(), 1);
    s.data = rows.transpose();
    return s;
  };
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);

  for (int k = 0; k < config.n_pairs; ++k) {
    const Index pd = state.basis_u.cols(), qd = state.basis_v.cols();
    const bool is_identity = state.k == 0 && pd == centered.p && qd == centered.q;
    const MatrixSample projected =
        is_identity ? centered : project_sample(centered, state.basis_u, state.basis_v);

    Rng rng(mix_seed(config.seed, {0xF11F, static_cast<std::uint64_t>(k)}));
    Eigen::VectorXd v0;
    if (static_cast<std::size_t>(k) < config.flipflop_init.size() &&
        config.flipflop_init[k].size() == qd) {
      v0 = config.flipflop_init[k].normalized();
    } else {
      v0 = random_unit_vector(qd, rng);
    }

    bool converged = false;
    bool stalled = false;
    Eigen::VectorXd u0;
    Eigen::VectorXd best_u, best_v;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_kappa = std::numeric_limits<double>::quiet_NaN();

    try {
      // Initial u from a multi-start solve against the fixed v0.
      const MatrixSample yv = vector_sample(right_projections(projected, v0));
      u0 = bb_multi_start(yv, dir, config, k, /*salt=*/0xF1A).u;

      for (int sweep = 0; sweep < config.max_iters; ++sweep) {
        const MatrixSample yu = vector_sample(left_projections(projected, u0));
        const Eigen::VectorXd v1 =
            bb_single_start(yu, dir, config.epsilon, config.max_iters, config.gamma0,
                            v0, one)
                .u;
        const MatrixSample yv1 = vector_sample(right_projections(projected, v1));
        const Eigen::VectorXd u1 =
            bb_single_start(yv1, dir, config.epsilon, config.max_iters, config.gamma0,
                            u0, one)
                .u;

        const double kappa = kappa_sample(projected, u1, v1);
        const double score = score_of(dir, kappa);
        if (score > best_score) {
          best_score = score;
          best_kappa = kappa;
          best_u = u1;
          best_v = v1;
        }

        // Sign-invariant displacement of both iterates.
        const double eu = std::min((u0 - u1).squaredNorm(), (u0 + u1).squaredNorm());
        const double ev = std::min((v0 - v1).squaredNorm(), (v0 + v1).squaredNorm());
        u0 = u1;
        v0 = v1;
        if (eu + ev < config.epsilon) {
          converged = true;
          break;
        }
      }
    } catch (const degenerate_projection_error&) {
      stalled = true;  // documented failure mode of the fixed-point scheme
    }

    if (best_u.size() == 0) {
      best_u = u0.size() == pd ? u0 : random_unit_vector(pd, rng);
      best_v = v0;
      best_kappa = std::numeric_limits<double>::quiet_NaN();
    }

    ProjectionPair pair;
    pair.u = canonical_sign((state.basis_u * best_u).normalized());
    pair.v = canonical_sign((state.basis_v * best_v).normalized());
    pair.value = best_kappa;
    seq.pairs.push_back(std::move(pair));
    seq.converged.push_back(converged && !stalled);
    if (stalled) {
      seq.complete = false;
      seq.diagnostic = "flip-flop stalled on a degenerate projection; "
                       "result depends on the initial direction";
      break;
    }

    const ConstraintSet last = constraint_matrices(centered, {seq.pairs.back()});
    seq.constraints.g1.push_back(last.g1.front());
    seq.constraints.g2.push_back(last.g2.front());
    append_constraint_vectors(seq.constraints, seq.pairs, cu, cv);

    if (k + 1 == config.n_pairs) break;
    try {
      state.basis_u = orthogonal_complement(cu, sample.p);
      state.basis_v = orthogonal_complement(cv, sample.q);
      state.k = k + 1;
    } catch (const numeric_error& e) {
      seq.complete = false;
      seq.diagnostic = std::string("deflation stopped early: ") + e.what();
      break;
    }
  }
  return seq;
}

}  // namespace mpp
