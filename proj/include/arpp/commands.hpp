#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "arpp/config.hpp"
#include "arpp/dmh.hpp"
#include "arpp/summaries.hpp"

namespace arpp {

struct CommandResult {
  std::vector<fs::path> outputs;
  json manifest;
};

/// Reads every replicate file listed in the config against its window.
/// Throws ConfigError when none are listed.
ReplicateSet load_replicates(const RunConfig& cfg);

/// Fixed radius, or the minimum observed distance in "min-distance" mode.
double resolve_hardcore(const RunConfig& cfg, const ReplicateSet& data);

AttractionRepulsionFamily make_family(const RunConfig& cfg, double hardcore_radius);

/// Bandwidth from the config, else the rule of thumb at the mean replicate intensity.
double resolve_bandwidth(const RunConfig& cfg, const ReplicateSet& data);

/// Evenly spaced radii from grid.from (default: delta) to grid.to.
RadiusGrid make_grid(const PcfSettings& pcf, double delta);

/// Per-parameter posterior mean, 95% HPD and batch-means MCSE (null below
/// 100 samples), plus the acceptance rate.
json summarize_chain(const PosteriorChain& chain);

/// Forward-simulates simulate.n_samples patterns at simulate.params and writes
/// <prefix>_<i>.csv plus simulate_manifest.json.
CommandResult cmd_simulate(const RunConfig& cfg);

/// DMH fit of the replicates; writes chain.csv, summary.json and fit_manifest.json.
CommandResult cmd_fit(const RunConfig& cfg);

/// Pooled PCF with Loh bootstrap bands; writes pcf.csv, pcf_manifest.json and
/// optionally pcf.svg. Throws DataError for fewer than two points.
CommandResult cmd_pcf(const RunConfig& cfg);

/// Posterior-predictive PCF bands from a chain file; writes gof.csv,
/// gof_manifest.json and optionally gof.svg. Throws DataError for an empty chain.
CommandResult cmd_gof(const RunConfig& cfg, const fs::path& chain_path);

/// Library version string.
std::string version();

}  // namespace arpp
