#include "mpp/run_config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

#include "mpp/errors.hpp"
#include "mpp/linalg.hpp"
#include "mpp/rng.hpp"

namespace mpp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw validation_error("config: " + where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Index as_index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    fail(where, "expected a non-negative integer");
  return j.get<Index>();
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where, "expected rows of numbers");
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          as_number(j[r][c], where);
  }
  return m;
}

CovSpec parse_cov(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown_keys(j, where, {"type", "rho", "values"});
  CovSpec spec;
  const std::string type = j.value("type", std::string("identity"));
  if (type == "identity") {
    spec.type = CovSpec::Type::Identity;
  } else if (type == "ar1") {
    spec.type = CovSpec::Type::Ar1;
    const json* rho = find(j, "rho");
    if (!rho) fail(where, "ar1 needs 'rho'");
    spec.rho = as_number(*rho, where + ".rho");
  } else if (type == "explicit") {
    spec.type = CovSpec::Type::Explicit;
    const json* values = find(j, "values");
    if (!values) fail(where, "explicit covariance needs 'values'");
    spec.values = as_matrix(*values, where + ".values");
  } else {
    fail(where, "unknown covariance type '" + type + "'");
  }
  return spec;
}

MeansSpec parse_means(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown_keys(j, where, {"type", "singular_values", "orth_seed", "t1", "t2"});
  MeansSpec spec;
  const std::string type = j.value("type", std::string("planted"));
  if (type == "planted") {
    spec.type = MeansSpec::Type::Planted;
    const json* sv = find(j, "singular_values");
    if (!sv || !sv->is_array() || sv->empty())
      fail(where, "planted means need a non-empty 'singular_values' array");
    for (const auto& v : *sv)
      spec.singular_values.push_back(as_number(v, where + ".singular_values"));
    if (const json* seed = find(j, "orth_seed"))
      spec.orth_seed = seed->get<std::uint64_t>();
  } else if (type == "explicit") {
    spec.type = MeansSpec::Type::Explicit;
    const json* t1 = find(j, "t1");
    const json* t2 = find(j, "t2");
    if (!t1 || !t2) fail(where, "explicit means need 't1' and 't2'");
    spec.t1 = as_matrix(*t1, where + ".t1");
    spec.t2 = as_matrix(*t2, where + ".t2");
  } else {
    fail(where, "unknown means type '" + type + "'");
  }
  return spec;
}

Direction parse_direction(const std::string& s, const std::string& where) {
  if (s == "minimize") return Direction::Minimize;
  if (s == "maximize") return Direction::Maximize;
  if (s == "squared_excess") return Direction::SquaredExcess;
  if (s == "auto") return Direction::Auto;
  fail(where, "unknown direction '" + s + "'");
}

}  // namespace

Eigen::MatrixXd CovSpec::build(Index dim) const {
  switch (type) {
    case Type::Identity:
      return Eigen::MatrixXd::Identity(dim, dim);
    case Type::Ar1:
      return ar1_covariance(dim, rho);
    case Type::Explicit:
      if (values.rows() != dim || values.cols() != dim)
        throw validation_error("config: explicit covariance has the wrong shape");
      return values;
  }
  throw validation_error("config: bad covariance spec");
}

MixtureParams ModelBlock::build() const { return build(alpha1); }

MixtureParams ModelBlock::build(double alpha_override) const {
  if (p < 1 || q < 1) throw validation_error("config: model needs positive p and q");
  MixtureParams mix;
  mix.alpha1 = alpha_override;
  mix.A = row_cov.build(p);
  mix.B = col_cov.build(q);
  if (means.type == MeansSpec::Type::Explicit) {
    mix.T1 = means.t1;
    mix.T2 = means.t2;
  } else {
    if (static_cast<Index>(means.singular_values.size()) > std::min(p, q))
      throw validation_error("config: more planted singular values than min(p, q)");
    Rng rng_u(mix_seed(means.orth_seed, {0xA11CE}));
    Rng rng_v(mix_seed(means.orth_seed, {0xB0B}));
    const Eigen::MatrixXd u = random_orthogonal(p, rng_u);
    const Eigen::MatrixXd v = random_orthogonal(q, rng_v);
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, q);
    for (std::size_t j = 0; j < means.singular_values.size(); ++j)
      lambda(static_cast<Index>(j), static_cast<Index>(j)) = means.singular_values[j];
    mix.T1 = Eigen::MatrixXd::Zero(p, q);
    mix.T2 = sym_sqrt(mix.A) * u * lambda * v.transpose() * sym_sqrt(mix.B);
  }
  mix.validate();
  return mix;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw validation_error("config: top level must be an object");
  reject_unknown_keys(doc, "top level", {"model", "optimizer", "evaluation", "io"});

  RunConfig cfg;

  if (const json* m = find(doc, "model")) {
    reject_unknown_keys(*m, "model",
                        {"alpha1", "p", "q", "n", "row_cov", "col_cov", "means"});
    if (const json* a = find(*m, "alpha1")) cfg.model.alpha1 = as_number(*a, "model.alpha1");
    if (const json* p = find(*m, "p")) cfg.model.p = as_index(*p, "model.p");
    if (const json* q = find(*m, "q")) cfg.model.q = as_index(*q, "model.q");
    if (const json* n = find(*m, "n")) cfg.model.n = as_index(*n, "model.n");
    if (const json* rc = find(*m, "row_cov")) cfg.model.row_cov = parse_cov(*rc, "model.row_cov");
    if (const json* cc = find(*m, "col_cov")) cfg.model.col_cov = parse_cov(*cc, "model.col_cov");
    if (const json* me = find(*m, "means")) cfg.model.means = parse_means(*me, "model.means");
  }

  if (const json* o = find(doc, "optimizer")) {
    reject_unknown_keys(*o, "optimizer",
                        {"algorithm", "epsilon", "restarts", "max_iters", "gamma0",
                         "direction", "n_pairs", "seed"});
    if (const json* alg = find(*o, "algorithm")) {
      const std::string s = alg->get<std::string>();
      if (s == "bb") {
        cfg.optimizer.algorithm = Algorithm::BarzilaiBorwein;
      } else if (s == "flipflop") {
        cfg.optimizer.algorithm = Algorithm::FlipFlop;
      } else {
        fail("optimizer.algorithm", "unknown algorithm '" + s + "'");
      }
    }
    OptimizerConfig& oc = cfg.optimizer.config;
    if (const json* v = find(*o, "epsilon")) oc.epsilon = as_number(*v, "optimizer.epsilon");
    if (const json* v = find(*o, "restarts")) oc.restarts = static_cast<int>(as_index(*v, "optimizer.restarts"));
    if (const json* v = find(*o, "max_iters")) oc.max_iters = static_cast<int>(as_index(*v, "optimizer.max_iters"));
    if (const json* v = find(*o, "gamma0")) oc.gamma0 = as_number(*v, "optimizer.gamma0");
    if (const json* v = find(*o, "direction"))
      oc.direction = parse_direction(v->get<std::string>(), "optimizer.direction");
    if (const json* v = find(*o, "n_pairs")) oc.n_pairs = static_cast<int>(as_index(*v, "optimizer.n_pairs"));
    if (const json* v = find(*o, "seed")) oc.seed = v->get<std::uint64_t>();
  }

  if (const json* e = find(doc, "evaluation")) {
    reject_unknown_keys(*e, "evaluation", {"replications", "sample_sizes", "alphas"});
    if (const json* r = find(*e, "replications"))
      cfg.evaluation.replications = static_cast<int>(as_index(*r, "evaluation.replications"));
    if (const json* s = find(*e, "sample_sizes")) {
      if (!s->is_array()) fail("evaluation.sample_sizes", "expected an array");
      for (const auto& v : *s)
        cfg.evaluation.sample_sizes.push_back(as_index(v, "evaluation.sample_sizes"));
    }
    if (const json* a = find(*e, "alphas")) {
      if (!a->is_array()) fail("evaluation.alphas", "expected an array");
      for (const auto& v : *a)
        cfg.evaluation.alphas.push_back(as_number(v, "evaluation.alphas"));
    }
  }

  if (const json* i = find(doc, "io")) {
    reject_unknown_keys(*i, "io", {"input", "output", "seed", "threads"});
    if (const json* v = find(*i, "input")) cfg.io.input = v->get<std::string>();
    if (const json* v = find(*i, "output")) cfg.io.output = v->get<std::string>();
    if (const json* v = find(*i, "seed")) cfg.io.seed = v->get<std::uint64_t>();
    if (const json* v = find(*i, "threads")) cfg.io.threads = static_cast<int>(as_index(*v, "io.threads"));
  }

  // The model's mixing proportion rides along in the optimizer config so the
  // Auto direction and the estimator see one consistent value.
  cfg.optimizer.config.alpha1 = cfg.model.alpha1;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

}  // namespace mpp::cli
