#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arpp/geometry.hpp"
#include "arpp/gibbs_model.hpp"
#include "arpp/random.hpp"

namespace arpp {

/// Strictly increasing positive radii at which summaries are evaluated.
class RadiusGrid {
 public:
  /// Throws std::invalid_argument unless values are positive and strictly increasing.
  explicit RadiusGrid(std::vector<double> r_values);
  /// `count` evenly spaced radii from `from` to `to` inclusive.
  static RadiusGrid linspace(double from, double to, std::size_t count);

  const std::vector<double>& values() const { return r_; }
  std::size_t size() const { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  double max() const { return r_.back(); }

 private:
  std::vector<double> r_;
};

enum class EdgeCorrection { none, isotropic };

/// Ripley's K: A / (n (n - 1)) * sum over ordered pairs with distance < r of
/// e_ij, where e_ij = 1 or the reciprocal fraction of the circle of radius d_ij
/// around x_i inside the window. Throws DataError for n < 2.
std::vector<double> k_hat(const PointPattern& pattern, const RadiusGrid& grid,
                          EdgeCorrection correction = EdgeCorrection::none);

/// Epanechnikov smoothing kernel 3/(4 delta) max(0, 1 - t^2/delta^2).
inline double pcf_kernel(double t, double delta) {
  const double u = t / delta;
  return u * u < 1.0 ? 0.75 / delta * (1.0 - u * u) : 0.0;
}

/// Rule-of-thumb bandwidth 0.1 / sqrt(n / A).
double default_bandwidth(double n_points, double area);

/// Row-major n x |grid| matrix of local pair correlation functions.
struct LisaMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

/// Local PCFs g_i(r) = A / (2 pi n r) sum_{j != i} k(|x_i - x_j| - r), no edge
/// correction. Requires delta > 0; a pattern with fewer than two points gives zero rows.
LisaMatrix lisa_pcf(const PointPattern& pattern, const RadiusGrid& grid, double delta);

/// Mean of the pooled local PCFs of all replicates.
std::vector<double> pcf_point_estimate(const ReplicateSet& replicates, const RadiusGrid& grid,
                                       double delta);

struct PcfEstimate {
  RadiusGrid grid;
  std::vector<double> g_hat;
  std::vector<double> lo95;
  std::vector<double> hi95;
  std::size_t B = 0;
  double delta = 0.0;
};

/// Loh bootstrap: local PCFs of all replicates are pooled, each bootstrap draw
/// averages n_pool rows resampled uniformly with replacement, and bands are the
/// pointwise 2.5% / 97.5% type-7 quantiles over B draws.
/// Throws DataError when fewer than two points are available in total.
PcfEstimate loh_bootstrap(const ReplicateSet& replicates, const RadiusGrid& grid, double delta,
                          std::size_t B, Rng& rng);

/// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace arpp
