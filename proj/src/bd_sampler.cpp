#include "arpp/bd_sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace arpp {

void BdConfig::validate() const {
  if (!(p_birth > 0.0 && p_birth < 1.0))
    throw std::invalid_argument("birth-death: p_birth must lie in (0, 1)");
  if (thin == 0) throw std::invalid_argument("birth-death: thin must be >= 1");
}

double log_birth_ratio(double delta, std::size_t n, double area, double p_birth) {
  return std::log1p(-p_birth) - std::log(p_birth) + delta + std::log(area) -
         std::log(static_cast<double>(n + 1));
}

double log_death_ratio(double delta, std::size_t n, double area, double p_birth) {
  return std::log(p_birth) - std::log1p(-p_birth) + delta + std::log(static_cast<double>(n)) -
         std::log(area);
}

bool bd_step(CachedPattern& cache, const BdConfig& cfg, Rng& rng, StagedUpdate& scratch,
             BdStats* stats) {
  const double area = cache.window().area();
  const std::size_t n = cache.size();
  if (uniform01(rng) < cfg.p_birth) {
    if (stats) ++stats->births_proposed;
    const Point xi = cache.window().sample_uniform(rng);
    if (n >= cfg.max_points) return false;
    const double delta = cache.stage_birth(xi, scratch);
    if (delta == kNegInf) return false;
    const double log_ratio = log_birth_ratio(delta, n, area, cfg.p_birth);
    if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
      cache.commit(scratch);
      if (stats) ++stats->births_accepted;
      return true;
    }
    return false;
  }
  if (stats) ++stats->deaths_proposed;
  if (n == 0) return false;
  const auto victim = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  const double delta = cache.stage_death(victim, scratch);
  if (delta == kNegInf) return false;
  const double log_ratio = log_death_ratio(delta, n, area, cfg.p_birth);
  if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
    cache.commit(scratch);
    if (stats) ++stats->deaths_accepted;
    return true;
  }
  return false;
}

bool bd_step(CachedPattern& cache, const BdConfig& cfg, Rng& rng) {
  StagedUpdate scratch;
  return bd_step(cache, cfg, rng, scratch);
}

BdStats bd_advance(CachedPattern& cache, const BdConfig& cfg, std::uint64_t n_steps, Rng& rng) {
  BdStats stats;
  StagedUpdate scratch;
  for (std::uint64_t t = 0; t < n_steps; ++t) bd_step(cache, cfg, rng, scratch, &stats);
  return stats;
}

PointPattern bd_run(const PointPattern& init, const ModelParams& params, const BdConfig& cfg,
                    Rng& rng) {
  cfg.validate();
  if (cfg.n_steps == 0) return init;
  CachedPattern cache(init, params);
  bd_advance(cache, cfg, cfg.n_steps, rng);
  return cache.pattern();
}

std::vector<PointPattern> bd_sample_patterns(const Window& window, const ModelParams& params,
                                             const BdConfig& cfg, std::size_t n_samples) {
  cfg.validate();
  Rng rng(cfg.seed);
  CachedPattern cache(PointPattern{window, {}}, params);
  std::vector<PointPattern> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    bd_advance(cache, cfg, s == 0 ? cfg.burn_in : cfg.thin, rng);
    out.push_back(cache.pattern());
  }
  return out;
}

}  // namespace arpp
