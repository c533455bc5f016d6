#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "arpp/gibbs_model.hpp"
#include "arpp/random.hpp"

namespace arpp {

/// Birth-death Metropolis-Hastings settings.
struct BdConfig {
  double p_birth = 0.5;
  std::uint64_t n_steps = 0;
  std::uint64_t seed = 0;
  /// Forward simulation: steps discarded before the first sample and between samples.
  std::uint64_t burn_in = 100'000;
  std::uint64_t thin = 1'000;
  /// Births beyond this many points are rejected (truncated model); unlimited by default.
  std::size_t max_points = std::numeric_limits<std::size_t>::max();

  /// Throws std::invalid_argument unless 0 < p_birth < 1 and thin >= 1.
  void validate() const;
};

/// log of the birth acceptance ratio (p_death / p_birth) e^delta A / (n + 1),
/// where n counts points before the birth.
double log_birth_ratio(double delta, std::size_t n, double area, double p_birth);
/// log of the death acceptance ratio (p_birth / p_death) e^delta n / A,
/// where n counts points before the death.
double log_death_ratio(double delta, std::size_t n, double area, double p_birth);

struct BdStats {
  std::uint64_t births_proposed = 0;
  std::uint64_t births_accepted = 0;
  std::uint64_t deaths_proposed = 0;
  std::uint64_t deaths_accepted = 0;
};

/// One birth-death proposal targeting h(. | cache.params()). Births place a
/// uniform point in the window; deaths pick a uniform existing point. A death
/// proposed on the empty pattern is rejected. Returns whether the move was accepted.
bool bd_step(CachedPattern& cache, const BdConfig& cfg, Rng& rng, StagedUpdate& scratch,
             BdStats* stats = nullptr);
bool bd_step(CachedPattern& cache, const BdConfig& cfg, Rng& rng);

/// Runs cfg.n_steps steps on an existing cache.
BdStats bd_advance(CachedPattern& cache, const BdConfig& cfg, std::uint64_t n_steps, Rng& rng);

/// Pattern after cfg.n_steps steps from `init`.
PointPattern bd_run(const PointPattern& init, const ModelParams& params, const BdConfig& cfg,
                    Rng& rng);

/// Forward simulation from the empty pattern: cfg.burn_in steps, then one
/// sample every cfg.thin steps. Deterministic given cfg.seed.
std::vector<PointPattern> bd_sample_patterns(const Window& window, const ModelParams& params,
                                             const BdConfig& cfg, std::size_t n_samples);

}  // namespace arpp
