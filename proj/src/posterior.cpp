#include "arpp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "arpp/errors.hpp"
#include "arpp/parallel.hpp"

namespace arpp {

HpdInterval hpd(std::span<const double> samples, double level) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("HPD needs at least two samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("HPD level must lie in (0, 1)");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  auto w = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  w = std::clamp<std::size_t>(w, 1, n);
  std::size_t best = 0;
  double best_width = s[w - 1] - s[0];
  for (std::size_t i = 1; i + w <= n; ++i) {
    const double width = s[i + w - 1] - s[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {s[best], s[best + w - 1], level};
}

double batch_means_mcse(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 100) throw DataError("batch means needs at least 100 samples");
  const auto b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t m = n / b;
  std::vector<double> means(b, 0.0);
  double grand = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += samples[k * m + i];
    means[k] = acc / static_cast<double>(m);
    grand += acc;
  }
  grand /= static_cast<double>(b * m);
  double ss = 0.0;
  for (double mk : means) ss += (mk - grand) * (mk - grand);
  const double var = static_cast<double>(m) / static_cast<double>(b - 1) * ss;
  return std::sqrt(var / static_cast<double>(b * m));
}

GofBands simulation_bands(std::span<const ModelParams> params, const Window& window,
                          const RadiusGrid& grid, double delta, const BdConfig& cfg,
                          std::uint64_t seed, std::size_t workers) {
  const std::size_t n_sims = params.size();
  if (n_sims == 0) throw DataError("simulation bands need at least one simulation");
  std::vector<std::vector<double>> curves(n_sims);
  parallel_for(n_sims, workers, [&](std::size_t s) {
    BdConfig sim = cfg;
    sim.seed = derive_seed(seed, {2, s});
    auto patterns = bd_sample_patterns(window, params[s], sim, 1);
    curves[s] = pcf_point_estimate(ReplicateSet{std::move(patterns)}, grid, delta);
  });

  GofBands bands{grid, std::vector<double>(grid.size(), 0.0), {}, {}, n_sims};
  bands.lo95.resize(grid.size());
  bands.hi95.resize(grid.size());
  std::vector<double> column(n_sims);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t s = 0; s < n_sims; ++s) column[s] = curves[s][c];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    bands.mean[c] = sum / static_cast<double>(n_sims);
    bands.lo95[c] = quantile_sorted(column, 0.025);
    bands.hi95[c] = quantile_sorted(column, 0.975);
  }
  return bands;
}

std::vector<std::size_t> evenly_spaced(std::size_t chain_size, std::size_t n_sims) {
  std::vector<std::size_t> idx(n_sims);
  for (std::size_t s = 0; s < n_sims; ++s)
    idx[s] = static_cast<std::size_t>((static_cast<double>(s) + 0.5) *
                                      static_cast<double>(chain_size) /
                                      static_cast<double>(n_sims));
  return idx;
}

GofBands posterior_predictive_gof(const PosteriorChain& chain, const ParameterFamily& family,
                                  const Window& window, const RadiusGrid& grid, double delta,
                                  std::size_t n_sims, const BdConfig& cfg, std::uint64_t seed,
                                  std::size_t workers) {
  if (chain.samples.empty()) throw DataError("posterior predictive check needs a non-empty chain");
  if (n_sims == 0) throw std::invalid_argument("posterior predictive check: n_sims must be >= 1");
  std::vector<ModelParams> params;
  params.reserve(n_sims);
  for (std::size_t i : evenly_spaced(chain.samples.size(), n_sims))
    params.push_back(family.build(chain.samples[i]));
  return simulation_bands(params, window, grid, delta, cfg, seed, workers);
}

}  // namespace arpp
