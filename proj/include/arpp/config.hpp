#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "arpp/dmh.hpp"
#include "arpp/geometry.hpp"

namespace arpp {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// How the hard-core radius is chosen for fitting.
struct HardcoreMode {
  enum class Kind { fixed, min_distance };
  Kind kind = Kind::fixed;
  double value = 0.0;  // fixed only; 0 disables the hard core
};

/// Fixed parameters for forward simulation.
struct TrueParams {
  double lambda = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double k = 0.0;
  double hardcore_radius = 0.0;
};

struct SimulateSettings {
  std::optional<TrueParams> params;
  std::size_t n_samples = 1;
  std::uint64_t burn_in = 100'000;
  std::uint64_t thin = 1'000;
  double p_birth = 0.5;
  /// Starting pattern; empty pattern when unset.
  std::optional<fs::path> init;
  std::string prefix = "pattern";
};

/// Partial prior override; unset fields keep the defaults for the resolved R.
struct PriorOverrides {
  std::optional<UniformPrior> lambda, theta1, theta2, theta3;
  std::optional<GammaPrior> k;

  PriorSpec resolve(double hardcore_radius) const;
};

struct DmhSettings {
  std::uint64_t n_outer = 1000;
  std::uint64_t m_inner = 0;
  std::uint64_t thin = 1;
  std::uint64_t burn_in = 0;
  bool adapt = true;
  std::size_t workers = 0;
  std::vector<double> proposal_sd;
  std::vector<double> init;
};

struct GridSettings {
  std::optional<double> from;  // default: delta
  double to = 100.0;
  std::size_t count = 512;
};

struct PcfSettings {
  std::optional<double> delta;  // default: 0.1 / sqrt(n / A)
  std::size_t bootstrap = 999;
  GridSettings grid;
  bool svg = true;
};

struct GofSettings {
  std::size_t n_sims = 99;
  std::uint64_t burn_in = 100'000;
  bool svg = true;
};

/// Validated run configuration. Relative paths are resolved against the
/// directory of the config file.
struct RunConfig {
  Window window = Window::disc({0.0, 0.0}, 1.0);
  std::vector<fs::path> replicates;
  HardcoreMode hardcore;
  double r_max = 100.0;
  PriorOverrides prior;
  DmhSettings dmh;
  PcfSettings pcf;
  SimulateSettings simulate;
  GofSettings gof;
  std::uint64_t seed = 0;
  fs::path out_dir = "out";

  /// Canonical JSON with absolute paths; parse_config(to_json()) round-trips.
  json to_json() const;
};

/// Validates the whole document before returning. Unknown keys, wrong types
/// and out-of-range values throw ConfigError.
RunConfig parse_config(const json& doc, const fs::path& base_dir);

/// Loads a config file, or the embedded config of a run manifest (a JSON
/// object with "command" and "config" keys).
RunConfig load_config(const fs::path& path);

}  // namespace arpp
