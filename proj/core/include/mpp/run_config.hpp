#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpp/model.hpp"
#include "mpp/optimizer.hpp"

namespace mpp::cli {

// One JSON document per run, schema-checked up front: unknown keys anywhere
// are rejected before any computation starts.

struct CovSpec {
  enum class Type { Identity, Ar1, Explicit };
  Type type = Type::Identity;
  double rho = 0.0;
  Eigen::MatrixXd values;

  Eigen::MatrixXd build(Index dim) const;
};

struct MeansSpec {
  enum class Type { Planted, Explicit };
  Type type = Type::Planted;
  // Planted: T1 = 0 and T2 = A^{1/2} U diag(singular_values) V' B^{1/2} with
  // random orthogonal U, V drawn from orth_seed, so the standardized mean
  // difference has exactly the requested singular values.
  std::vector<double> singular_values;
  std::uint64_t orth_seed = 0;
  Eigen::MatrixXd t1, t2;
};

struct ModelBlock {
  double alpha1 = 0.3;
  Index p = 0;
  Index q = 0;
  Index n = 0;  // draw count for `simulate`
  CovSpec row_cov, col_cov;
  MeansSpec means;

  MixtureParams build() const;
  MixtureParams build(double alpha_override) const;
};

enum class Algorithm { BarzilaiBorwein, FlipFlop };

struct OptimizerBlock {
  Algorithm algorithm = Algorithm::BarzilaiBorwein;
  OptimizerConfig config;  // alpha1 is filled from the model block
};

struct EvaluationBlock {
  int replications = 0;
  std::vector<Index> sample_sizes;
  std::vector<double> alphas;
};

struct IoBlock {
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RunConfig {
  ModelBlock model;
  OptimizerBlock optimizer;
  EvaluationBlock evaluation;
  IoBlock io;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace mpp::cli
