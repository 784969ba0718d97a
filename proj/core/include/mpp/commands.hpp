#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mpp/run_config.hpp"
#include "mpp/sample.hpp"

namespace mpp::cli {

// Batch entry points behind the CLI subcommands. All of them throw
// validation_error / numeric_error / io_error; the binary maps those onto
// exit codes 2 / 3 / 4.

// Draws from the configured mixture, writes the tensor file to io.output and
// a JSON manifest (parameters, analytic W_LDA, analytic singular pairs, seed)
// next to it as <output>.manifest.json.
void cmd_simulate(const RunConfig& cfg);

// Runs the extraction + reconstruction pipeline on io.input and writes
// <output>.json (pairs, per-pair diagnostics, W_nLDA, rank estimate) and
// <output>.csv (per-observation scores).
void cmd_extract(const RunConfig& cfg);

// Simulation campaign over the (alpha, n) grid with m replications each;
// writes one long-form CSV row per (alpha, n, replication, pair, metric).
void cmd_campaign(const RunConfig& cfg);

// Compares the kurtosis pursuit against LDA / MPCA / (2D)^2PCA on a labeled
// tensor file: clusters every score vector with both variance modes and
// writes the misclassification table.
void cmd_baselines(const RunConfig& cfg);

// CSV (long or wide form) -> tensor file.
void cmd_import_csv(const std::string& input, const std::string& output,
                    std::optional<Index> n, std::optional<Index> p,
                    std::optional<Index> q);

// Analytic vs central finite-difference kurtosis gradients at random pairs;
// returns 0 when the max relative error stays below 1e-4, else 3.
int cmd_gradcheck(const RunConfig& cfg, std::ostream& report);

}  // namespace mpp::cli
