#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mpp/commands.hpp"
#include "mpp/csv.hpp"
#include "mpp/errors.hpp"
#include "mpp/eval.hpp"
#include "mpp/model.hpp"
#include "mpp/run_config.hpp"
#include "mpp/tensor_file.hpp"
#include "test_helpers.hpp"

using namespace mpp;
using namespace mpp::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mpp_cmd_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Model 1 style configuration as a JSON document.
std::string model1_config_text(Index n, double alpha1, int restarts,
                               std::uint64_t seed, int n_pairs = 1) {
  std::ostringstream out;
  out << R"({
    "model": {
      "alpha1": )" << alpha1 << R"(, "p": 5, "q": 3, "n": )" << n << R"(,
      "row_cov": {"type": "ar1", "rho": 0.6},
      "col_cov": {"type": "ar1", "rho": 0.3},
      "means": {"type": "planted", "singular_values": [4.0], "orth_seed": 11}
    },
    "optimizer": {"algorithm": "bb", "restarts": )" << restarts
      << R"(, "n_pairs": )" << n_pairs << R"(, "direction": "auto", "seed": )" << seed
      << R"(},
    "io": {"seed": )" << seed << R"(}
  })";
  return out.str();
}

RunConfig model1_config(Index n, double alpha1, int restarts, std::uint64_t seed,
                        int n_pairs = 1) {
  return parse_run_config(model1_config_text(n, alpha1, restarts, seed, n_pairs));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MPP_CLI_BINARY) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("run config parsing") {
  SUBCASE("round trip of a full document") {
    const RunConfig cfg = model1_config(500, 0.3, 7, 21);
    CHECK(cfg.model.p == 5);
    CHECK(cfg.model.q == 3);
    CHECK(cfg.model.n == 500);
    CHECK(cfg.optimizer.config.restarts == 7);
    CHECK(cfg.optimizer.config.alpha1 == 0.3);
    CHECK(cfg.io.seed == 21);
    const MixtureParams mix = cfg.model.build();
    CHECK(mix.rank() == 1);
    CHECK(analytic_pairs(mix)[0].sigma == doctest::Approx(4.0).epsilon(1e-10));
  }

  SUBCASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(parse_run_config(R"({"mode": {}})"), validation_error);
    CHECK_THROWS_AS(parse_run_config(R"({"model": {"alpha": 0.3}})"), validation_error);
    CHECK_THROWS_AS(parse_run_config(R"({"optimizer": {"restart": 3}})"),
                    validation_error);
    CHECK_THROWS_AS(parse_run_config(R"({"io": {"outputs": "x"}})"), validation_error);
  }

  SUBCASE("malformed json is a validation error") {
    CHECK_THROWS_AS(parse_run_config("{"), validation_error);
  }
}

TEST_CASE("cmd_simulate") {
  TempDir tmp;
  RunConfig cfg = model1_config(500, 0.3, 5, 42);
  cfg.io.output = tmp.file("sim.mpp");
  cmd_simulate(cfg);

  SUBCASE("file length follows the format") {
    CHECK(fs::file_size(cfg.io.output) == 4u + 12u + 8u * 500 * 15 + 4u + 500u);
  }

  SUBCASE("same seed gives byte-identical output") {
    RunConfig again = cfg;
    again.io.output = tmp.file("sim2.mpp");
    cmd_simulate(again);
    CHECK(read_file(cfg.io.output) == read_file(again.io.output));
  }

  SUBCASE("manifest records the analytic truth") {
    const json manifest = json::parse(read_file(cfg.io.output + ".manifest.json"));
    const MixtureParams mix = cfg.model.build();
    const Eigen::MatrixXd truth = w_lda(mix);
    REQUIRE(manifest["w_lda"].size() == 5);
    for (Index r = 0; r < 5; ++r)
      for (Index c = 0; c < 3; ++c)
        CHECK(manifest["w_lda"][r][c].get<double>() ==
              doctest::Approx(truth(r, c)).epsilon(1e-12));
    CHECK(manifest["rank"] == 1);
    CHECK(manifest["singular_pairs"].size() == 1);
    CHECK(manifest["singular_pairs"][0]["sigma"].get<double>() ==
          doctest::Approx(4.0).epsilon(1e-10));
  }

  SUBCASE("labels survive the round trip") {
    const MatrixSample s = io::read_tensor_file(cfg.io.output);
    CHECK(s.has_labels());
    CHECK(s.n == 500);
  }
}

TEST_CASE("cmd_extract") {
  TempDir tmp;
  RunConfig cfg = model1_config(8000, 0.3, 10, 33);
  cfg.io.output = tmp.file("sim.mpp");
  cmd_simulate(cfg);

  cfg.io.input = cfg.io.output;
  cfg.io.output = tmp.file("res");
  cmd_extract(cfg);

  SUBCASE("recovers the planted direction") {
    const json doc = json::parse(read_file(tmp.file("res.json")));
    REQUIRE(doc["pairs"].size() == 1);
    Eigen::VectorXd u(5);
    for (Index i = 0; i < 5; ++i) u(i) = doc["pairs"][0]["u"][i].get<double>();
    const json manifest = json::parse(read_file(cfg.io.input + ".manifest.json"));
    Eigen::VectorXd u_truth(5);
    for (Index i = 0; i < 5; ++i)
      u_truth(i) = manifest["singular_pairs"][0]["u"][i].get<double>();
    CHECK(msi(u, u_truth) >= 0.99);
    CHECK(doc["rank_estimate"] == 1);
    CHECK(doc["pairs"][0]["lambda"].get<double>() == doctest::Approx(4.0).epsilon(0.2));
  }

  SUBCASE("emits one score row per observation") {
    std::ifstream csv(tmp.file("res.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("obs,label,score_pair_1,score_w_nlda") == 0);
    int rows = 0;
    while (std::getline(csv, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 8000);
  }

  SUBCASE("rerun is byte identical") {
    RunConfig again = cfg;
    again.io.output = tmp.file("res2");
    cmd_extract(again);
    CHECK(read_file(tmp.file("res.csv")) == read_file(tmp.file("res2.csv")));
    CHECK(read_file(tmp.file("res.json")) == read_file(tmp.file("res2.json")));
  }

  SUBCASE("n_pairs beyond the cap is a validation error") {
    RunConfig bad = cfg;
    bad.optimizer.config.n_pairs = 3;  // min(5,3) - 1 = 2
    CHECK_THROWS_AS(cmd_extract(bad), validation_error);
  }
}

TEST_CASE("cmd_campaign") {
  TempDir tmp;

  SUBCASE("zero replications leave only the header") {
    RunConfig cfg = model1_config(100, 0.3, 2, 1);
    cfg.evaluation.replications = 0;
    cfg.evaluation.alphas = {0.3};
    cfg.evaluation.sample_sizes = {100};
    cfg.io.output = tmp.file("empty.csv");
    cmd_campaign(cfg);
    CHECK(read_file(cfg.io.output) ==
          "alpha,n,replication,pair,metric,value,status\r\n");
  }

  SUBCASE("rows cover the grid and replications deterministically") {
    RunConfig cfg = model1_config(400, 0.3, 3, 7);
    cfg.evaluation.replications = 3;
    cfg.evaluation.alphas = {0.3, 0.4};
    cfg.evaluation.sample_sizes = {400};
    cfg.io.threads = 2;
    cfg.io.output = tmp.file("camp.csv");
    cmd_campaign(cfg);
    const std::string first = read_file(cfg.io.output);

    // 2 alphas x 1 n x 3 reps x 3 metric rows (msi_u, msi_v, log_frobenius).
    int lines = 0;
    for (char c : first) lines += c == '\n';
    CHECK(lines == 1 + 2 * 3 * 3);

    cfg.io.output = tmp.file("camp2.csv");
    cmd_campaign(cfg);
    CHECK(first == read_file(cfg.io.output));
  }

  SUBCASE("empty grids are rejected") {
    RunConfig cfg = model1_config(100, 0.3, 2, 1);
    cfg.evaluation.replications = 2;
    cfg.io.output = tmp.file("x.csv");
    CHECK_THROWS_AS(cmd_campaign(cfg), validation_error);
  }
}

TEST_CASE("cmd_baselines") {
  TempDir tmp;
  // Well separated two-group data: every method reaches zero error.
  std::string text = R"({
    "model": {
      "alpha1": 0.3, "p": 3, "q": 2, "n": 1000,
      "means": {"type": "planted", "singular_values": [20.0], "orth_seed": 3}
    },
    "optimizer": {"restarts": 6, "direction": "auto", "seed": 5},
    "io": {"seed": 9}
  })";
  RunConfig cfg = parse_run_config(text);
  cfg.io.output = tmp.file("sep.mpp");
  cmd_simulate(cfg);
  cfg.io.input = cfg.io.output;
  cfg.io.output = tmp.file("baselines.csv");
  cmd_baselines(cfg);

  std::ifstream csv(cfg.io.output);
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("method,equal_variance") == 0);
  CHECK(header.find("misclassification") != std::string::npos);
  std::string line;
  int rows = 0;
  bool saw_lda = false;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto fields = io::split_csv_line(line);
    saw_lda = saw_lda || fields[0] == "lda";
    CHECK(std::stod(fields.back()) == 0.0);  // misclassification
  }
  CHECK(rows == 10);  // 5 methods x 2 variance modes
  CHECK(saw_lda);
}

TEST_CASE("cmd_import_csv and gradcheck") {
  TempDir tmp;

  const std::string csv_path = tmp.file("data.csv");
  {
    std::ofstream out(csv_path);
    out << "obs,row,col,value\n";
    Rng rng(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 200; ++i)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c)
          out << i << ',' << r << ',' << c << ',' << normal(rng) << '\n';
  }
  const std::string tensor_path = tmp.file("data.mpp");
  cmd_import_csv(csv_path, tensor_path, {}, {}, {});
  const MatrixSample s = io::read_tensor_file(tensor_path);
  CHECK(s.n == 200);
  CHECK(s.p == 3);
  CHECK(s.q == 2);

  RunConfig cfg;
  cfg.io.input = tensor_path;
  cfg.io.seed = 17;
  std::ostringstream report1, report2;
  CHECK(cmd_gradcheck(cfg, report1) == 0);
  CHECK(report1.str().find("max relative error") != std::string::npos);
  CHECK(cmd_gradcheck(cfg, report2) == 0);
  CHECK(report1.str() == report2.str());  // deterministic under a fixed seed
}

TEST_CASE("cli binary end to end") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_path);
    out << model1_config_text(300, 0.3, 3, 19);
  }

  const std::string sim = tmp.file("sim.mpp");
  CHECK(run_cli("simulate --config " + cfg_path + " --output " + sim) == 0);
  CHECK(fs::exists(sim));

  // n_pairs over the cap: usage error, exit code 2.
  const std::string bad_cfg = tmp.file("bad.json");
  {
    std::ofstream out(bad_cfg);
    out << model1_config_text(300, 0.3, 3, 19, /*n_pairs=*/3);
  }
  CHECK(run_cli("extract --config " + bad_cfg + " --input " + sim + " --output " +
                tmp.file("r")) == 2);

  // Missing input: I/O error, exit code 4.
  CHECK(run_cli("extract --config " + cfg_path + " --input " + tmp.file("none.mpp") +
                " --output " + tmp.file("r2")) == 4);

  // Unknown flag: usage error from the parser.
  CHECK(run_cli("simulate --config " + cfg_path + " --frobnicate") == 2);

  // Valid extraction through the binary.
  CHECK(run_cli("extract --config " + cfg_path + " --input " + sim + " --output " +
                tmp.file("ok")) == 0);
  CHECK(fs::exists(tmp.file("ok.json")));
  CHECK(fs::exists(tmp.file("ok.csv")));
}
