// Command line front end: simulate, extract, campaign, baselines, import-csv,
// gradcheck. Exit codes: 0 success, 2 usage/validation, 3 numerical failure,
// 4 I/O.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "mpp/commands.hpp"
#include "mpp/errors.hpp"
#include "mpp/run_config.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config) {
  auto* opt = cmd->add_option("--config", flags.config_path, "JSON run configuration");
  if (needs_config) opt->required();
  cmd->add_option("--input", flags.input, "input path (overrides io.input)");
  cmd->add_option("--output", flags.output, "output path (overrides io.output)");
  cmd->add_option("--seed", flags.seed, "seed (overrides io.seed)");
  cmd->add_option("--threads", flags.threads, "worker threads (overrides io.threads)");
}

mpp::cli::RunConfig resolve(const CommonFlags& flags) {
  mpp::cli::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = mpp::cli::load_run_config(flags.config_path);
  if (!flags.input.empty()) cfg.io.input = flags.input;
  if (!flags.output.empty()) cfg.io.output = flags.output;
  if (flags.seed) cfg.io.seed = *flags.seed;
  if (flags.threads) cfg.io.threads = *flags.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection pursuit for matrix-valued data"};
  app.require_subcommand(1);

  CommonFlags simulate_flags, extract_flags, campaign_flags, baselines_flags,
      gradcheck_flags;
  std::string import_in, import_out;
  std::optional<mpp::Index> import_n, import_p, import_q;

  auto* simulate = app.add_subcommand("simulate", "draw from a configured mixture");
  add_common(simulate, simulate_flags, /*needs_config=*/true);

  auto* extract = app.add_subcommand("extract", "extract pairs and reconstruct W");
  add_common(extract, extract_flags, /*needs_config=*/true);

  auto* campaign = app.add_subcommand("campaign", "replicated simulation study");
  add_common(campaign, campaign_flags, /*needs_config=*/true);

  auto* baselines = app.add_subcommand("baselines", "clustering comparison table");
  add_common(baselines, baselines_flags, /*needs_config=*/true);

  auto* import_csv = app.add_subcommand("import-csv", "CSV to tensor file");
  import_csv->add_option("--input", import_in, "CSV path")->required();
  import_csv->add_option("--output", import_out, "tensor file path")->required();
  import_csv->add_option("--n", import_n, "observation count (wide form check)");
  import_csv->add_option("--p", import_p, "row count");
  import_csv->add_option("--q", import_q, "column count");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_common(gradcheck, gradcheck_flags, /*needs_config=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      mpp::cli::cmd_simulate(resolve(simulate_flags));
    } else if (extract->parsed()) {
      mpp::cli::cmd_extract(resolve(extract_flags));
    } else if (campaign->parsed()) {
      mpp::cli::cmd_campaign(resolve(campaign_flags));
    } else if (baselines->parsed()) {
      mpp::cli::cmd_baselines(resolve(baselines_flags));
    } else if (import_csv->parsed()) {
      mpp::cli::cmd_import_csv(import_in, import_out, import_n, import_p, import_q);
    } else if (gradcheck->parsed()) {
      return mpp::cli::cmd_gradcheck(resolve(gradcheck_flags), std::cout);
    }
  } catch (const mpp::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const mpp::numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const mpp::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
