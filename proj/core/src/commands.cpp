#include "mpp/commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "mpp/csv.hpp"
#include "mpp/errors.hpp"
#include "mpp/estimator.hpp"
#include "mpp/eval.hpp"
#include "mpp/rng.hpp"
#include "mpp/tensor_file.hpp"

namespace mpp::cli {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

bool balanced_alpha(double alpha1) { return std::abs(alpha1 - 0.5) < 1e-10; }

ExtractionSequence run_extraction(const MatrixSample& sample, const OptimizerBlock& opt) {
  return opt.algorithm == Algorithm::FlipFlop
             ? flipflop_extract(sample, opt.config)
             : extract_sequence(sample, opt.config);
}

// Extraction + reconstruction; the shared tail of extract/campaign/baselines.
struct PipelineOutput {
  ExtractionSequence seq;
  ExtractionResult est;
};

PipelineOutput run_pipeline(const MatrixSample& sample, const OptimizerBlock& opt) {
  PipelineOutput out;
  out.seq = run_extraction(sample, opt);
  if (out.seq.pairs.empty()) throw numeric_error("pipeline: no pairs extracted");
  const MatrixSample centered = center(sample);
  std::vector<ProjectionPair> pairs = out.seq.pairs;
  if (balanced_alpha(opt.config.alpha1) && pairs.size() >= 2)
    pairs = sign_align_by_correlation(centered, std::move(pairs));
  out.est = reconstruct_w_lda(centered, pairs, opt.config.alpha1);
  return out;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  if (cfg.io.output.empty()) throw validation_error("simulate: io.output is required");
  if (cfg.model.n < 2) throw validation_error("simulate: model.n must be at least 2");
  const MixtureParams mix = cfg.model.build();
  const MatrixSample sample = sample_mixture(mix, cfg.model.n, cfg.io.seed);
  io::write_tensor_file(cfg.io.output, sample);

  json manifest;
  manifest["n"] = cfg.model.n;
  manifest["p"] = cfg.model.p;
  manifest["q"] = cfg.model.q;
  manifest["alpha1"] = mix.alpha1;
  manifest["seed"] = cfg.io.seed;
  manifest["t1"] = matrix_to_json(mix.T1);
  manifest["t2"] = matrix_to_json(mix.T2);
  manifest["a"] = matrix_to_json(mix.A);
  manifest["b"] = matrix_to_json(mix.B);
  manifest["w_lda"] = matrix_to_json(w_lda(mix));
  manifest["rank"] = mix.rank();
  json pairs = json::array();
  for (const auto& pair : analytic_pairs(mix)) {
    json j;
    j["sigma"] = pair.sigma;
    j["u"] = vector_to_json(pair.u);
    j["v"] = vector_to_json(pair.v);
    pairs.push_back(std::move(j));
  }
  manifest["singular_pairs"] = std::move(pairs);
  write_json_file(cfg.io.output + ".manifest.json", manifest);
}

void cmd_extract(const RunConfig& cfg) {
  if (cfg.io.input.empty()) throw validation_error("extract: io.input is required");
  if (cfg.io.output.empty()) throw validation_error("extract: io.output is required");
  const MatrixSample sample = io::read_tensor_file(cfg.io.input);
  const PipelineOutput out = run_pipeline(sample, cfg.optimizer);

  json doc;
  json jpairs = json::array();
  for (std::size_t j = 0; j < out.est.pairs.size(); ++j) {
    json jp;
    jp["u"] = vector_to_json(out.est.pairs[j].u);
    jp["v"] = vector_to_json(out.est.pairs[j].v);
    jp["kappa"] = out.est.kappa_hat[j];
    jp["theta"] = out.est.theta_hat[j];
    jp["lambda"] = out.est.lambda_hat[j];
    jp["sign"] = out.est.signs[j];
    jp["converged"] = static_cast<bool>(out.seq.converged[j]);
    jpairs.push_back(std::move(jp));
  }
  doc["pairs"] = std::move(jpairs);
  doc["w_nlda"] = matrix_to_json(out.est.w_nlda);
  doc["rank_estimate"] = out.est.rank_estimate;
  doc["lambda_clamped"] = out.est.lambda_clamped;
  doc["complete"] = out.seq.complete;
  doc["diagnostic"] = out.seq.diagnostic;
  write_json_file(cfg.io.output + ".json", doc);

  io::CsvWriter csv(cfg.io.output + ".csv");
  std::vector<std::string> header{"obs"};
  if (sample.has_labels()) header.push_back("label");
  for (std::size_t j = 1; j <= out.est.pairs.size(); ++j)
    header.push_back("score_pair_" + std::to_string(j));
  header.push_back("score_w_nlda");
  csv.row(header);

  std::vector<Eigen::VectorXd> scores;
  for (const auto& pair : out.est.pairs) scores.push_back(project_scores(sample, pair));
  const Eigen::VectorXd w_scores = project_scores(sample, out.est.w_nlda);
  for (Index i = 0; i < sample.n; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    if (sample.has_labels()) row.push_back(std::to_string(sample.labels[i]));
    for (const auto& s : scores) row.push_back(io::format_double(s(i)));
    row.push_back(io::format_double(w_scores(i)));
    csv.row(row);
  }
  csv.flush();
}

void cmd_campaign(const RunConfig& cfg) {
  if (cfg.io.output.empty()) throw validation_error("campaign: io.output is required");
  if (cfg.evaluation.alphas.empty() || cfg.evaluation.sample_sizes.empty())
    throw validation_error("campaign: alpha and sample-size grids must be non-empty");
  if (cfg.evaluation.replications < 0)
    throw validation_error("campaign: replications must be non-negative");

  struct Task {
    std::size_t ai, ni;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t ai = 0; ai < cfg.evaluation.alphas.size(); ++ai)
    for (std::size_t ni = 0; ni < cfg.evaluation.sample_sizes.size(); ++ni)
      for (int rep = 0; rep < cfg.evaluation.replications; ++rep)
        tasks.push_back({ai, ni, rep});

  std::vector<std::vector<std::vector<std::string>>> rows(tasks.size());

  auto run_task = [&](std::size_t t) {
    const Task& task = tasks[t];
    const double alpha = cfg.evaluation.alphas[task.ai];
    const Index n = cfg.evaluation.sample_sizes[task.ni];
    const std::string alpha_s = io::format_double(alpha);
    const std::string n_s = std::to_string(n);
    const std::string rep_s = std::to_string(task.rep);
    auto emit = [&](const std::string& pair, const std::string& metric,
                    const std::string& value, const std::string& status) {
      rows[t].push_back({alpha_s, n_s, rep_s, pair, metric, value, status});
    };
    try {
      const MixtureParams mix = cfg.model.build(alpha);
      const std::uint64_t seed = mix_seed(
          cfg.io.seed, {task.ai, task.ni, static_cast<std::uint64_t>(task.rep)});
      const MatrixSample sample = sample_mixture(mix, n, seed);

      OptimizerBlock opt = cfg.optimizer;
      opt.config.alpha1 = alpha;
      opt.config.seed = seed;
      const PipelineOutput out = run_pipeline(sample, opt);

      const std::vector<AnalyticPair> truth = analytic_pairs(mix);
      const std::size_t d = std::min(truth.size(), out.est.pairs.size());
      for (std::size_t j = 0; j < d; ++j) {
        emit(std::to_string(j + 1), "msi_u",
             io::format_double(msi(out.est.pairs[j].u, truth[j].u)), "ok");
        emit(std::to_string(j + 1), "msi_v",
             io::format_double(msi(out.est.pairs[j].v, truth[j].v)), "ok");
      }
      emit("0", "log_frobenius",
           io::format_double(frobenius_log_error(out.est.w_nlda, w_lda(mix))), "ok");
    } catch (const std::exception& e) {
      std::string why = e.what();
      for (char& c : why)
        if (c == ',' || c == '\n') c = ';';
      emit("0", "error", "nan", why);
    }
  };

  const int threads = std::max(1, cfg.io.threads);
  if (threads == 1 || tasks.size() <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
          run_task(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Single writer, deterministic task order regardless of the pool schedule.
  io::CsvWriter csv(cfg.io.output);
  csv.row({"alpha", "n", "replication", "pair", "metric", "value", "status"});
  for (const auto& task_rows : rows)
    for (const auto& row : task_rows) csv.row(row);
  csv.flush();
}

void cmd_baselines(const RunConfig& cfg) {
  if (cfg.io.input.empty()) throw validation_error("baselines: io.input is required");
  if (cfg.io.output.empty()) throw validation_error("baselines: io.output is required");
  const MatrixSample sample = io::read_tensor_file(cfg.io.input);
  const bool labeled = sample.has_labels();
  if (!labeled)
    std::cerr << "baselines: input has no labels; LDA and misclassification "
                 "columns are omitted\n";

  const PipelineOutput out = run_pipeline(sample, cfg.optimizer);

  std::vector<std::pair<std::string, Eigen::VectorXd>> methods;
  methods.emplace_back("pp_w_nlda", project_scores(sample, out.est.w_nlda));
  methods.emplace_back("pp_pair_1", project_scores(sample, out.est.pairs.front()));
  if (labeled) {
    const LdaBaselineResult lda = lda_baseline(sample);
    methods.emplace_back("lda", project_scores(sample, lda.w));
  }
  {
    const auto mpca = mpca_baseline(sample, 1);
    methods.emplace_back("mpca", project_scores(sample, mpca.front()));
    const auto [u2d, v2d] = twod2pca_baseline(sample);
    ProjectionPair pair;
    pair.u = u2d;
    pair.v = v2d;
    methods.emplace_back("2d2pca", project_scores(sample, pair));
  }

  io::CsvWriter csv(cfg.io.output);
  std::vector<std::string> header{"method",  "equal_variance", "weight1", "mean1",
                                  "mean2",   "variance1",      "variance2",
                                  "loglik"};
  if (labeled) header.push_back("misclassification");
  csv.row(header);

  for (const auto& [name, scores] : methods) {
    for (bool equal_variance : {false, true}) {
      const ClusteringResult r = gmm1d_em(scores, equal_variance, cfg.io.seed,
                                          labeled ? &sample.labels : nullptr);
      std::vector<std::string> row{name,
                                   equal_variance ? "true" : "false",
                                   io::format_double(r.weights[0]),
                                   io::format_double(r.means[0]),
                                   io::format_double(r.means[1]),
                                   io::format_double(r.variances[0]),
                                   io::format_double(r.variances[1]),
                                   io::format_double(r.loglik)};
      if (labeled) row.push_back(io::format_double(*r.misclassification));
      csv.row(row);
    }
  }
  csv.flush();
}

void cmd_import_csv(const std::string& input, const std::string& output,
                    std::optional<Index> n, std::optional<Index> p,
                    std::optional<Index> q) {
  if (input.empty() || output.empty())
    throw validation_error("import-csv: input and output paths are required");
  io::write_tensor_file(output, io::import_csv(input, n, p, q));
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& report) {
  if (cfg.io.input.empty()) throw validation_error("gradcheck: io.input is required");
  const MatrixSample centered = center(io::read_tensor_file(cfg.io.input));
  const double scale_sq = data_scale_sq(centered);

  constexpr int kPairs = 20;
  constexpr double kStep = 1e-5;
  constexpr double kFail = 1e-4;

  Rng rng(cfg.io.seed);
  double max_rel = 0.0;
  int skipped = 0;
  for (int k = 0; k < kPairs; ++k) {
    const Eigen::VectorXd u = random_unit_vector(centered.p, rng);
    const Eigen::VectorXd v = random_unit_vector(centered.q, rng);
    const Eigen::VectorXd t = projection_scores(centered, u, v);
    const double m2 = t.squaredNorm() / static_cast<double>(centered.n);
    if (m2 < 1e-10 * scale_sq) {
      // Near-degenerate direction: excluded from the max, but reported.
      report << "pair " << k << ": near-degenerate projection, skipped\n";
      ++skipped;
      continue;
    }

    const KappaGradient g = kappa_gradient(centered, u, v);
    Eigen::VectorXd num_u(centered.p), num_v(centered.q);
    for (Index i = 0; i < centered.p; ++i) {
      Eigen::VectorXd up = u, um = u;
      up(i) += kStep;
      um(i) -= kStep;
      num_u(i) = (kappa_sample(centered, up, v) - kappa_sample(centered, um, v)) /
                 (2.0 * kStep);
    }
    for (Index i = 0; i < centered.q; ++i) {
      Eigen::VectorXd vp = v, vm = v;
      vp(i) += kStep;
      vm(i) -= kStep;
      num_v(i) = (kappa_sample(centered, u, vp) - kappa_sample(centered, u, vm)) /
                 (2.0 * kStep);
    }
    const double denom = std::sqrt(g.du.squaredNorm() + g.dv.squaredNorm());
    const double diff = std::sqrt((num_u - g.du).squaredNorm() + (num_v - g.dv).squaredNorm());
    const double rel = diff / std::max(denom, 1e-300);
    max_rel = std::max(max_rel, rel);
    report << "pair " << k << ": relative error " << io::format_double(rel) << "\n";
  }
  report << "max relative error: " << io::format_double(max_rel)
         << " (skipped " << skipped << ")\n";
  return max_rel > kFail ? 3 : 0;
}

}  // namespace mpp::cli
