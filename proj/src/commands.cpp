#include "arpp/commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include "arpp/bd_sampler.hpp"
#include "arpp/errors.hpp"
#include "arpp/io.hpp"
#include "arpp/posterior.hpp"

#ifndef ARPP_VERSION
#define ARPP_VERSION "0.0.0"
#endif

namespace arpp {

namespace {

json base_manifest(const std::string& command, const RunConfig& cfg) {
  return {{"command", command},
          {"config", cfg.to_json()},
          {"seed", cfg.seed},
          {"versions", {{"arpp", ARPP_VERSION}, {"compiler", __VERSION__}}}};
}

fs::path write_manifest(const RunConfig& cfg, const std::string& command, const json& manifest) {
  const fs::path path = cfg.out_dir / (command + "_manifest.json");
  write_text_atomic(path, manifest.dump(2) + "\n");
  return path;
}

json paths_json(const std::vector<fs::path>& paths) {
  json out = json::array();
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

}  // namespace

std::string version() { return ARPP_VERSION; }

ReplicateSet load_replicates(const RunConfig& cfg) {
  if (cfg.replicates.empty()) throw ConfigError("config.replicates: at least one file is required");
  ReplicateSet data;
  for (const auto& path : cfg.replicates) data.patterns.push_back(read_pattern_csv(path, cfg.window));
  data.validate();
  return data;
}

double resolve_hardcore(const RunConfig& cfg, const ReplicateSet& data) {
  if (cfg.hardcore.kind == HardcoreMode::Kind::min_distance) return fix_hardcore_radius(data);
  return cfg.hardcore.value;
}

AttractionRepulsionFamily make_family(const RunConfig& cfg, double hardcore_radius) {
  return AttractionRepulsionFamily(cfg.prior.resolve(hardcore_radius), hardcore_radius, cfg.r_max);
}

double resolve_bandwidth(const RunConfig& cfg, const ReplicateSet& data) {
  if (cfg.pcf.delta) return *cfg.pcf.delta;
  const double mean_n =
      static_cast<double>(data.total_points()) / static_cast<double>(data.patterns.size());
  if (!(mean_n > 0.0)) throw DataError("cannot choose a bandwidth for empty patterns");
  return default_bandwidth(mean_n, data.window().area());
}

RadiusGrid make_grid(const PcfSettings& pcf, double delta) {
  const double from = pcf.grid.from.value_or(delta);
  if (!(from < pcf.grid.to) && pcf.grid.count > 1)
    throw ConfigError("pcf.grid: first radius " + format_double(from) +
                      " is not below the last radius " + format_double(pcf.grid.to));
  if (pcf.grid.count == 1) return RadiusGrid({from});
  return RadiusGrid::linspace(from, pcf.grid.to, pcf.grid.count);
}

json summarize_chain(const PosteriorChain& chain) {
  json params = json::object();
  for (std::size_t j = 0; j < chain.names.size(); ++j) {
    const auto col = chain.column(j);
    json entry = {{"mean", nullptr}, {"hpd_lo", nullptr}, {"hpd_hi", nullptr}, {"mcse", nullptr}};
    if (!col.empty())
      entry["mean"] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    if (col.size() >= 2) {
      const auto h = hpd(col, 0.95);
      entry["hpd_lo"] = h.lo;
      entry["hpd_hi"] = h.hi;
    }
    if (col.size() >= 100) entry["mcse"] = batch_means_mcse(col);
    params[chain.names[j]] = entry;
  }
  return {{"parameters", params},
          {"n_samples", chain.samples.size()},
          {"hpd_level", 0.95},
          {"acceptance_rate", chain.acceptance_rate()}};
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  const auto& sim = cfg.simulate;
  if (!sim.params) throw ConfigError("simulate.params: required for simulate");
  const auto& t = *sim.params;
  ModelParams params;
  params.lambda = t.lambda;
  params.k = t.k;
  params.interaction = ARInteraction::create(t.theta1, t.theta2, t.theta3, t.hardcore_radius, cfg.r_max);

  PointPattern init{cfg.window, {}};
  if (sim.init) init = read_pattern_csv(*sim.init, cfg.window);

  BdConfig bd;
  bd.p_birth = sim.p_birth;
  bd.burn_in = sim.burn_in;
  bd.thin = sim.thin;
  bd.seed = cfg.seed;
  bd.validate();

  Rng rng(derive_seed(cfg.seed, {3}));
  CachedPattern cache(init, params);
  CommandResult result;
  json counts = json::array();
  for (std::size_t s = 0; s < sim.n_samples; ++s) {
    bd_advance(cache, bd, s == 0 ? bd.burn_in : bd.thin, rng);
    const fs::path path = cfg.out_dir / (sim.prefix + "_" + std::to_string(s + 1) + ".csv");
    write_pattern_csv(path, cache.pattern());
    result.outputs.push_back(path);
    counts.push_back(cache.size());
  }

  const auto& ar = std::get<ARInteraction>(params.interaction);
  json m = base_manifest("simulate", cfg);
  m["params"] = {{"lambda", t.lambda}, {"theta1", t.theta1}, {"theta2", t.theta2},
                 {"theta3", t.theta3}, {"k", t.k},           {"hardcore_radius", t.hardcore_radius},
                 {"r_max", cfg.r_max}, {"r1", ar.r1()},      {"r2", ar.r2()}};
  m["steps"] = {{"burn_in", bd.burn_in},
                {"thin", bd.thin},
                {"total", bd.burn_in + bd.thin * (sim.n_samples - 1)}};
  m["point_counts"] = counts;
  m["outputs"] = paths_json(result.outputs);
  result.outputs.push_back(write_manifest(cfg, "simulate", m));
  result.manifest = std::move(m);
  return result;
}

CommandResult cmd_fit(const RunConfig& cfg) {
  const ReplicateSet data = load_replicates(cfg);
  const double R = resolve_hardcore(cfg, data);
  const auto family = make_family(cfg, R);
  if (R > 0.0) check_hardcore(data, R);

  DmhConfig dc;
  dc.n_outer = cfg.dmh.n_outer;
  dc.m_inner = cfg.dmh.m_inner;
  dc.thin = cfg.dmh.thin;
  dc.burn_in = cfg.dmh.burn_in;
  dc.adapt = cfg.dmh.adapt;
  dc.workers = cfg.dmh.workers;
  dc.proposal_sd = cfg.dmh.proposal_sd;
  dc.seed = cfg.seed;
  std::size_t warnings = 0;
  dc.on_warning = [&warnings](const std::string& msg) {
    if (warnings++ < 10) std::cerr << "warning: " << msg << "\n";
  };
  std::optional<std::vector<double>> init;
  if (!cfg.dmh.init.empty()) init = cfg.dmh.init;

  const auto start = std::chrono::steady_clock::now();
  const PosteriorChain chain = dmh_run(data, family, dc, init);
  const double walltime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  CommandResult result;
  const fs::path chain_path = cfg.out_dir / "chain.csv";
  write_chain_csv(chain_path, chain);
  result.outputs.push_back(chain_path);

  json summary = summarize_chain(chain);
  summary["hardcore_radius"] = R;
  summary["r_max"] = cfg.r_max;
  summary["knot_failures"] = chain.knot_failures;
  const fs::path summary_path = cfg.out_dir / "summary.json";
  write_text_atomic(summary_path, summary.dump(2) + "\n");
  result.outputs.push_back(summary_path);

  const PriorSpec& prior = family.prior();
  json m = base_manifest("fit", cfg);
  m["hardcore_radius"] = R;
  m["r_max"] = cfg.r_max;
  m["prior"] = {{"lambda", {prior.lambda.lo, prior.lambda.hi}},
                {"theta1", {prior.theta1.lo, prior.theta1.hi}},
                {"theta2", {prior.theta2.lo, prior.theta2.hi}},
                {"theta3", {prior.theta3.lo, prior.theta3.hi}},
                {"k", {{"shape", prior.k.shape}, {"rate", prior.k.rate}}}};
  m["data_files"] = paths_json(cfg.replicates);
  m["m_inner"] = dc.m_inner == 0 ? json(nullptr) : json(dc.m_inner);
  m["final_step_sizes"] = chain.final_step_sizes;
  m["acceptance_rate"] = chain.acceptance_rate();
  m["walltime_seconds"] = walltime;
  m["outputs"] = paths_json(result.outputs);
  result.outputs.push_back(write_manifest(cfg, "fit", m));
  result.manifest = std::move(m);
  return result;
}

CommandResult cmd_pcf(const RunConfig& cfg) {
  const ReplicateSet data = load_replicates(cfg);
  if (data.total_points() < 2) throw DataError("PCF needs at least two points in total");
  const double delta = resolve_bandwidth(cfg, data);
  const RadiusGrid grid = make_grid(cfg.pcf, delta);
  Rng rng(derive_seed(cfg.seed, {4}));
  const PcfEstimate est = loh_bootstrap(data, grid, delta, cfg.pcf.bootstrap, rng);

  CommandResult result;
  const fs::path csv = cfg.out_dir / "pcf.csv";
  write_text_atomic(csv, pcf_csv(est));
  result.outputs.push_back(csv);
  if (cfg.pcf.svg) {
    const fs::path svg = cfg.out_dir / "pcf.svg";
    write_text_atomic(svg, svg_line_plot(grid.values(), {{est.lo95, est.hi95, "#4a7bd0"}},
                                         {{est.g_hat, "black", false}}, 1.0, "r (px)", "g(r)"));
    result.outputs.push_back(svg);
  }

  std::size_t below = 0;
  for (double r : grid.values()) below += r < delta ? 1 : 0;
  json m = base_manifest("pcf", cfg);
  m["delta"] = delta;
  m["bootstrap"] = est.B;
  m["data_files"] = paths_json(cfg.replicates);
  m["point_counts"] = json::array();
  for (const auto& p : data.patterns) m["point_counts"].push_back(p.size());
  m["bias_prone_below"] = delta;
  m["bias_prone_radii"] = below;
  m["outputs"] = paths_json(result.outputs);
  result.outputs.push_back(write_manifest(cfg, "pcf", m));
  result.manifest = std::move(m);
  return result;
}

CommandResult cmd_gof(const RunConfig& cfg, const fs::path& chain_path) {
  const PosteriorChain chain = read_chain_csv(chain_path);
  if (chain.samples.empty()) throw DataError(chain_path.string() + ": chain has no samples");
  const ReplicateSet data = load_replicates(cfg);
  const double R = resolve_hardcore(cfg, data);
  const auto family = make_family(cfg, R);
  if (chain.names != family.names())
    throw DataError(chain_path.string() + ": chain columns do not match the model parameters");

  const double delta = resolve_bandwidth(cfg, data);
  const RadiusGrid grid = make_grid(cfg.pcf, delta);
  const auto empirical = pcf_point_estimate(data, grid, delta);
  BdConfig bd;
  bd.burn_in = cfg.gof.burn_in;
  const GofBands bands = posterior_predictive_gof(chain, family, cfg.window, grid, delta,
                                                  cfg.gof.n_sims, bd, derive_seed(cfg.seed, {5}),
                                                  cfg.dmh.workers);

  CommandResult result;
  const fs::path csv = cfg.out_dir / "gof.csv";
  write_text_atomic(csv, gof_csv(bands, empirical));
  result.outputs.push_back(csv);
  if (cfg.gof.svg) {
    const fs::path svg = cfg.out_dir / "gof.svg";
    write_text_atomic(svg, svg_line_plot(grid.values(), {{bands.lo95, bands.hi95, "#4a7bd0"}},
                                         {{empirical, "#d03a2f", false}}, 1.0, "r (px)", "g(r)"));
    result.outputs.push_back(svg);
  }

  std::size_t inside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    inside += (empirical[i] >= bands.lo95[i] && empirical[i] <= bands.hi95[i]) ? 1 : 0;
  json m = base_manifest("gof", cfg);
  m["chain_file"] = fs::absolute(chain_path).lexically_normal().string();
  m["hardcore_radius"] = R;
  m["delta"] = delta;
  m["n_sims"] = bands.n_sims;
  m["fraction_inside"] = static_cast<double>(inside) / static_cast<double>(grid.size());
  m["outputs"] = paths_json(result.outputs);
  result.outputs.push_back(write_manifest(cfg, "gof", m));
  result.manifest = std::move(m);
  return result;
}

}  // namespace arpp
