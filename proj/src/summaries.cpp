#include "arpp/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arpp/errors.hpp"

namespace arpp {

RadiusGrid::RadiusGrid(std::vector<double> r_values) : r_(std::move(r_values)) {
  if (r_.empty()) throw std::invalid_argument("radius grid: empty");
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!(r_[i] > 0.0) || !std::isfinite(r_[i]))
      throw std::invalid_argument("radius grid: radii must be positive and finite");
    if (i > 0 && !(r_[i] > r_[i - 1]))
      throw std::invalid_argument("radius grid: radii must be strictly increasing");
  }
}

RadiusGrid RadiusGrid::linspace(double from, double to, std::size_t count) {
  if (count == 0) throw std::invalid_argument("radius grid: count must be >= 1");
  std::vector<double> r(count);
  if (count == 1) {
    r[0] = from;
  } else {
    const double step = (to - from) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) r[i] = from + step * static_cast<double>(i);
    r.back() = to;
  }
  return RadiusGrid(std::move(r));
}

std::vector<double> k_hat(const PointPattern& pattern, const RadiusGrid& grid,
                          EdgeCorrection correction) {
  const auto& pts = pattern.points;
  const std::size_t n = pts.size();
  if (n < 2) throw DataError("K function needs at least two points");
  const double r_top = grid.max();

  // (distance, weight) for ordered pairs closer than the largest radius.
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(pts[i], pts[j]);
      if (!(d < r_top)) continue;
      if (correction == EdgeCorrection::none) {
        pairs.emplace_back(d, 2.0);
      } else {
        pairs.emplace_back(d, 1.0 / pattern.window.circle_fraction_inside(pts[i], d));
        pairs.emplace_back(d, 1.0 / pattern.window.circle_fraction_inside(pts[j], d));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());

  const double scale = pattern.window.area() / (static_cast<double>(n) * static_cast<double>(n - 1));
  std::vector<double> out(grid.size());
  std::size_t next = 0;
  double acc = 0.0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    while (next < pairs.size() && pairs[next].first < grid[m]) acc += pairs[next++].second;
    out[m] = scale * acc;
  }
  return out;
}

double default_bandwidth(double n_points, double area) {
  if (!(n_points > 0.0) || !(area > 0.0))
    throw DataError("bandwidth: need a positive point count and area");
  return 0.1 / std::sqrt(n_points / area);
}

LisaMatrix lisa_pcf(const PointPattern& pattern, const RadiusGrid& grid, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("local PCF: bandwidth must be positive");
  const auto& pts = pattern.points;
  const std::size_t n = pts.size();
  const auto& r = grid.values();
  LisaMatrix out;
  out.rows = n;
  out.cols = r.size();
  out.values.assign(n * r.size(), 0.0);
  if (n < 2) return out;

  std::vector<double> norm(r.size());
  const double area = pattern.window.area();
  for (std::size_t m = 0; m < r.size(); ++m)
    norm[m] = area / (2.0 * std::numbers::pi * static_cast<double>(n) * r[m]);

  const double reach = grid.max() + delta;
  NeighborGrid index(reach, pattern.window.bounds());
  for (std::size_t i = 0; i < n; ++i) {
    index.for_each_within(pts[i], reach, std::nullopt, [&](std::uint32_t j, double d) {
      const auto first = std::upper_bound(r.begin(), r.end(), d - delta);
      for (auto it = first; it != r.end() && *it < d + delta; ++it) {
        const auto m = static_cast<std::size_t>(it - r.begin());
        const double v = pcf_kernel(d - *it, delta) * norm[m];
        out.values[i * out.cols + m] += v;
        out.values[j * out.cols + m] += v;
      }
    });
    index.insert(static_cast<std::uint32_t>(i), pts[i]);
  }
  return out;
}

namespace {

std::vector<LisaMatrix> pooled_rows(const ReplicateSet& replicates, const RadiusGrid& grid,
                                    double delta, std::size_t& total_rows) {
  std::vector<LisaMatrix> mats;
  total_rows = 0;
  for (const auto& p : replicates.patterns) {
    mats.push_back(lisa_pcf(p, grid, delta));
    total_rows += mats.back().rows;
  }
  return mats;
}

}  // namespace

std::vector<double> pcf_point_estimate(const ReplicateSet& replicates, const RadiusGrid& grid,
                                       double delta) {
  std::size_t total = 0;
  const auto mats = pooled_rows(replicates, grid, delta, total);
  std::vector<double> mean(grid.size(), 0.0);
  if (total == 0) return mean;
  for (const auto& m : mats)
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t c = 0; c < m.cols; ++c) mean[c] += m(i, c);
  for (double& v : mean) v /= static_cast<double>(total);
  return mean;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

PcfEstimate loh_bootstrap(const ReplicateSet& replicates, const RadiusGrid& grid, double delta,
                          std::size_t B, Rng& rng) {
  if (replicates.total_points() < 2) throw DataError("PCF needs at least two points");
  if (B == 0) throw std::invalid_argument("bootstrap: B must be >= 1");
  std::size_t total = 0;
  const auto mats = pooled_rows(replicates, grid, delta, total);
  std::vector<const double*> rows;
  rows.reserve(total);
  for (const auto& m : mats)
    for (std::size_t i = 0; i < m.rows; ++i) rows.push_back(m.row(i).data());

  const std::size_t cols = grid.size();
  PcfEstimate est{grid, std::vector<double>(cols, 0.0), {}, {}, B, delta};
  for (const double* row : rows)
    for (std::size_t c = 0; c < cols; ++c) est.g_hat[c] += row[c];
  for (double& v : est.g_hat) v /= static_cast<double>(total);

  // boot[c * B + b]: draw b at radius c.
  std::vector<double> boot(cols * B, 0.0);
  std::vector<double> acc(cols);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  for (std::size_t b = 0; b < B; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t s = 0; s < total; ++s) {
      const double* row = rows[pick(rng)];
      for (std::size_t c = 0; c < cols; ++c) acc[c] += row[c];
    }
    for (std::size_t c = 0; c < cols; ++c) boot[c * B + b] = acc[c] / static_cast<double>(total);
  }
  est.lo95.resize(cols);
  est.hi95.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::span<double> draws(boot.data() + c * B, B);
    std::sort(draws.begin(), draws.end());
    est.lo95[c] = quantile_sorted(draws, 0.025);
    est.hi95[c] = quantile_sorted(draws, 0.975);
  }
  return est;
}

}  // namespace arpp
