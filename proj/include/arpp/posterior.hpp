#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "arpp/bd_sampler.hpp"
#include "arpp/dmh.hpp"
#include "arpp/summaries.hpp"

namespace arpp {

struct HpdInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
};

/// Shortest interval spanning ceil(level * N) consecutive order statistics
/// Ties resolve to the smallest lower end.
/// Throws std::invalid_argument for N < 2 or level outside (0, 1).
HpdInterval hpd(std::span<const double> samples, double level = 0.95);

/// Batch-means Monte Carlo standard error with b = floor(sqrt(N)) batches of
/// m = floor(N / b) draws (remainder dropped):
///   sigma^2 = m / (b - 1) sum_k (mean_k - mean)^2,  MCSE = sigma / sqrt(b m).
/// Throws DataError for N < 100.
double batch_means_mcse(std::span<const double> samples);

/// Pointwise simulation envelope of the PCF.
struct GofBands {
  RadiusGrid grid;
  std::vector<double> mean;
  std::vector<double> lo95;
  std::vector<double> hi95;
  std::size_t n_sims = 0;
};

/// One forward simulation per parameter set (burn-in cfg.burn_in from the empty
/// pattern, seed derived from `seed` and the simulation index); each pattern's
/// PCF point estimate is computed with bandwidth `delta` and the bands are the
/// pointwise 2.5% / 97.5% quantiles across simulations.
GofBands simulation_bands(std::span<const ModelParams> params, const Window& window,
                          const RadiusGrid& grid, double delta, const BdConfig& cfg,
                          std::uint64_t seed, std::size_t workers = 0);

/// Indices of n_sims evenly spaced retained samples: floor((s + 1/2) N / n_sims).
std::vector<std::size_t> evenly_spaced(std::size_t chain_size, std::size_t n_sims);

/// Posterior-predictive bands: n_sims evenly spaced chain states, one forward
/// simulation each. Throws DataError for an empty chain.
GofBands posterior_predictive_gof(const PosteriorChain& chain, const ParameterFamily& family,
                                  const Window& window, const RadiusGrid& grid, double delta,
                                  std::size_t n_sims, const BdConfig& cfg, std::uint64_t seed,
                                  std::size_t workers = 0);

}  // namespace arpp
