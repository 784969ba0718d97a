#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpp/indices.hpp"
#include "mpp/sample.hpp"

namespace mpp {

// Which functional of kappa the search optimizes. Auto resolves to Minimize
// or Maximize from the mixing regime of alpha1; SquaredExcess maximizes
// (kappa - 3)^2 and needs no knowledge of alpha1.
enum class Direction { Minimize, Maximize, SquaredExcess, Auto };

struct OptimizerConfig {
  double epsilon = 1e-6;      // gradient-norm stopping tolerance
  int restarts = 10;          // independent random starts per pair
  int max_iters = 2000;       // BB iterations per start / flip-flop sweeps
  double gamma0 = 0.1;        // initial step size
  Direction direction = Direction::Auto;
  double alpha1 = 0.3;        // consulted by Auto and by the estimator
  int n_pairs = 1;            // requested extraction count, <= min(p,q) - 1
  std::uint64_t seed = 0;

  // Optional per-pair initial right directions for the flip-flop algorithm
  // (in the deflated coordinates of each stage); used to reproduce the
  // initialization sensitivity of that method. Empty entries draw randomly.
  std::vector<Eigen::VectorXd> flipflop_init;

  Direction resolved_direction() const;  // Auto -> regime of alpha1
  void validate(Index p, Index q) const;
};

// Orthonormal bases of the current deflated search space. basis_u spans the
// orthogonal complement of the constraint vectors G_{n1j} u_j accumulated so
// far (and basis_v likewise for the v side).
struct DeflationState {
  Eigen::MatrixXd basis_u;  // p x (p - k)
  Eigen::MatrixXd basis_v;  // q x (q - k)
  int k = 0;                // pairs extracted so far

  static DeflationState identity(Index p, Index q);
};

struct PairResult {
  ProjectionPair pair;
  bool converged = false;  // some start met the gradient tolerance
  int iterations = 0;      // iterations of the winning start
};

// Multi-start Barzilai-Borwein search for one pair inside the deflated space.
// Data are projected to basis_u' Y_i basis_v, each start draws uniformly on
// the product of unit spheres, iterates ambient gradient steps with
// renormalization and BB step size |dx'dg| / ||dg||^2 (clamped), and the best
// candidate across starts is mapped back to ambient coordinates.
PairResult optimize_pair_bb(const MatrixSample& centered, const OptimizerConfig& config,
                            const DeflationState& state);

struct ExtractionSequence {
  std::vector<ProjectionPair> pairs;
  ConstraintSet constraints;
  std::vector<bool> converged;  // per pair
  bool complete = true;         // false when deflation stopped early
  std::string diagnostic;
};

// Sequential extraction: center once, optimize, rebuild the deflation bases
// from the constraint vectors G_{n1k} u_k / G_{n2k} v_k, repeat.
ExtractionSequence extract_sequence(const MatrixSample& sample,
                                    const OptimizerConfig& config);

// Flip-flop alternative: alternate one-sided kurtosis optimizations of
// u over {X_i v} and v over {X_i' u} to a fixed point (sign-invariant
// displacement below epsilon), with the same deflation between pairs.
ExtractionSequence flipflop_extract(const MatrixSample& sample,
                                    const OptimizerConfig& config);

}  // namespace mpp
