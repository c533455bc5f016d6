#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "arpp/geometry.hpp"
#include "arpp/interaction.hpp"

namespace arpp {

/// Parameters of the saturated pairwise Gibbs density
///   h(X) = lambda^n prod_i exp{ min( sum_{j != i} log phi(|x_i - x_j|), k ) }.
/// k = +inf disables saturation (plain pairwise model).
struct ModelParams {
  double lambda = 1.0;
  double k = std::numeric_limits<double>::infinity();
  Interaction interaction = StraussInteraction(1.0, 1.0);

  double range() const { return interaction_range(interaction); }
  /// Throws std::invalid_argument unless lambda > 0 and k > 0.
  void validate() const;
};

/// Independent patterns observed in one common window.
struct ReplicateSet {
  std::vector<PointPattern> patterns;

  /// Throws DataError when empty, when windows differ or when points fall outside.
  void validate() const;
  const Window& window() const { return patterns.front().window; }
  std::size_t total_points() const;
};

/// Unnormalized log density log h(X | params); -inf when some pair has phi = 0.
/// Only pairs within the interaction range contribute.
double log_h(const PointPattern& pattern, const ModelParams& params);
double log_h(const Window& window, const std::vector<Point>& points, const ModelParams& params);

/// Sum of log_h over replicates (independent patterns, shared parameters).
double log_h_replicates(const ReplicateSet& replicates, const ModelParams& params);

/// Geyer saturation log density with the strength multiplying the capped count:
///   n log lambda + sum_i log_gamma * min(#{j != i : |x_i - x_j| <= R}, k).
double geyer_log_h(const std::vector<Point>& points, double lambda, const StepInteraction& step,
                   double k);

/// Proposed single-point change to a CachedPattern. Produced by stage_birth /
/// stage_death, consumed by commit; dropping it leaves the cache untouched.
struct StagedUpdate {
  enum class Kind { birth, death };

  Kind kind = Kind::birth;
  Point point;
  std::uint32_t index = 0;  // death: victim index
  double delta = 0.0;       // log h(new) - log h(old), +-inf allowed
  // New cached totals after commit.
  double new_total = 0.0;
  std::size_t new_blocked = 0;
  // Birth only: the new point's own pair sum.
  double own_sum = 0.0;
  std::uint32_t own_neg_inf = 0;
  // (neighbor, log phi) pairs touched by the move.
  std::vector<std::pair<std::uint32_t, double>> touched;
  std::uint64_t generation = 0;
};

/// A point pattern with per-point interaction sums kept current under
/// single-point births and deaths.
///
/// Each point i carries s_i = sum_{j != i} log phi(d_ij), split into a finite
/// part and a count of -inf terms so that removing a hard-core violator restores
/// a finite likelihood exactly. log h = n log lambda + sum_i min(s_i, k) is
/// maintained as the sum over "unblocked" points plus a blocked-point counter.
class CachedPattern {
 public:
  /// Full sums are recomputed after this many commits to bound rounding drift.
  static constexpr std::uint64_t kRefreshInterval = 50'000;

  /// `grid_cell_size` defaults to the interaction range; any larger value gives
  /// identical results with coarser buckets.
  CachedPattern(PointPattern pattern, ModelParams params, double grid_cell_size = 0.0);

  double log_h() const;
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Window& window() const { return window_; }
  const ModelParams& params() const { return params_; }
  PointPattern pattern() const { return {window_, points_}; }
  const NeighborGrid& grid() const { return grid_; }

  /// s_i as an extended real (-inf if any neighbor has phi = 0).
  double point_sum(std::size_t i) const;
  /// Number of points whose sum is -inf.
  std::size_t blocked_points() const { return blocked_; }

  /// Delta of log h for adding xi. `out` is overwritten and its buffers reused.
  double stage_birth(Point xi, StagedUpdate& out) const;
  /// Delta of log h for removing point `index`.
  double stage_death(std::size_t index, StagedUpdate& out) const;
  /// Applies a staged update produced against the current state.
  void commit(const StagedUpdate& update);

  /// Recomputes every per-point sum and the cached total from scratch.
  void refresh();

 private:
  template <class F>
  double stage_birth_impl(const F& f, Point xi, StagedUpdate& out) const;
  template <class F>
  double stage_death_impl(const F& f, std::size_t index, StagedUpdate& out) const;
  template <class F>
  void refresh_impl(const F& f);

  double capped(double s) const { return s < params_.k ? s : params_.k; }
  double finalize_delta(double local, double lambda_term, std::size_t new_blocked) const;

  Window window_;
  ModelParams params_;
  double log_lambda_;
  double range_;
  std::vector<Point> points_;
  std::vector<double> sum_;             // finite part of s_i
  std::vector<std::uint32_t> neg_inf_;  // number of -inf terms in s_i
  NeighborGrid grid_;
  double total_ = 0.0;       // sum over unblocked points of min(s_i, k)
  std::size_t blocked_ = 0;  // points with neg_inf_ > 0
  std::uint64_t generation_ = 0;
  std::uint64_t commits_since_refresh_ = 0;
};

}  // namespace arpp
