#include "arpp/gibbs_model.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "arpp/errors.hpp"

namespace arpp {

void ModelParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("model: lambda must be positive and finite");
  if (!(k > 0.0)) throw std::invalid_argument("model: saturation k must be positive");
}

void ReplicateSet::validate() const {
  if (patterns.empty()) throw DataError("replicate set is empty");
  for (const auto& p : patterns) {
    if (!(p.window == patterns.front().window))
      throw DataError("replicates must share one observation window");
    require_inside(p);
  }
}

std::size_t ReplicateSet::total_points() const {
  std::size_t n = 0;
  for (const auto& p : patterns) n += p.size();
  return n;
}

double log_h(const Window& window, const std::vector<Point>& points, const ModelParams& params) {
  const std::size_t n = points.size();
  if (n == 0) return 0.0;
  const double range = params.range();
  NeighborGrid grid(range, window.bounds());
  for (std::size_t i = 0; i < n; ++i) grid.insert(static_cast<std::uint32_t>(i), points[i]);
  double total = n * std::log(params.lambda);
  std::visit(
      [&](const auto& f) {
        for (std::size_t i = 0; i < n && std::isfinite(total); ++i) {
          double s = 0.0;
          grid.for_each_within(points[i], range, static_cast<std::uint32_t>(i),
                               [&](std::uint32_t, double d) { s += f.log_phi(d); });
          total += s < params.k ? s : params.k;
        }
      },
      params.interaction);
  return std::isnan(total) ? kNegInf : total;
}

double log_h(const PointPattern& pattern, const ModelParams& params) {
  return log_h(pattern.window, pattern.points, params);
}

double log_h_replicates(const ReplicateSet& replicates, const ModelParams& params) {
  double total = 0.0;
  for (const auto& p : replicates.patterns) total += log_h(p, params);
  return total;
}

double geyer_log_h(const std::vector<Point>& points, double lambda, const StepInteraction& step,
                   double k) {
  const std::size_t n = points.size();
  if (n == 0) return 0.0;
  double total = n * std::log(lambda);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && distance(points[i], points[j]) <= step.radius()) ++count;
    total += step.log_gamma() * std::min(static_cast<double>(count), k);
  }
  return total;
}

CachedPattern::CachedPattern(PointPattern pattern, ModelParams params, double grid_cell_size)
    : window_(pattern.window),
      params_(std::move(params)),
      log_lambda_(std::log(params_.lambda)),
      range_(params_.range()),
      points_(std::move(pattern.points)),
      grid_(std::max(grid_cell_size, range_), window_.bounds()) {
  params_.validate();
  for (std::size_t i = 0; i < points_.size(); ++i)
    grid_.insert(static_cast<std::uint32_t>(i), points_[i]);
  refresh();
}

double CachedPattern::log_h() const {
  if (blocked_ > 0) return kNegInf;
  return static_cast<double>(points_.size()) * log_lambda_ + total_;
}

double CachedPattern::point_sum(std::size_t i) const {
  return neg_inf_[i] > 0 ? kNegInf : sum_[i];
}

double CachedPattern::finalize_delta(double local, double lambda_term,
                                     std::size_t new_blocked) const {
  if (new_blocked > 0) return kNegInf;
  if (blocked_ > 0) return std::numeric_limits<double>::infinity();
  return lambda_term + local;
}

template <class F>
double CachedPattern::stage_birth_impl(const F& f, Point xi, StagedUpdate& out) const {
  out.kind = StagedUpdate::Kind::birth;
  out.point = xi;
  out.generation = generation_;
  out.touched.clear();
  grid_.for_each_within(xi, range_, std::nullopt, [&](std::uint32_t j, double d) {
    const double lp = f.log_phi(d);
    if (lp != 0.0) out.touched.emplace_back(j, lp);
  });

  double own = 0.0;
  std::uint32_t own_inf = 0;
  double local = 0.0;
  std::size_t blocked = blocked_;
  for (const auto& [j, lp] : out.touched) {
    const std::uint32_t old_inf = neg_inf_[j];
    const double old_s = sum_[j];
    std::uint32_t new_inf = old_inf;
    double new_s = old_s;
    if (lp == kNegInf) {
      ++own_inf;
      ++new_inf;
    } else {
      own += lp;
      new_s += lp;
    }
    if (old_inf == 0 && new_inf == 0) {
      local += capped(new_s) - capped(old_s);
    } else if (old_inf == 0) {
      local -= capped(old_s);
      ++blocked;
    }
  }
  if (own_inf == 0)
    local += capped(own);
  else
    ++blocked;

  out.own_sum = own;
  out.own_neg_inf = own_inf;
  out.new_total = total_ + local;
  out.new_blocked = blocked;
  out.delta = finalize_delta(local, log_lambda_, blocked);
  return out.delta;
}

template <class F>
double CachedPattern::stage_death_impl(const F& f, std::size_t index, StagedUpdate& out) const {
  assert(index < points_.size());
  const Point p = points_[index];
  out.kind = StagedUpdate::Kind::death;
  out.point = p;
  out.index = static_cast<std::uint32_t>(index);
  out.generation = generation_;
  out.touched.clear();
  grid_.for_each_within(p, range_, static_cast<std::uint32_t>(index),
                        [&](std::uint32_t j, double d) {
                          const double lp = f.log_phi(d);
                          if (lp != 0.0) out.touched.emplace_back(j, lp);
                        });

  double local = 0.0;
  std::size_t blocked = blocked_;
  if (neg_inf_[index] == 0)
    local -= capped(sum_[index]);
  else
    --blocked;
  for (const auto& [j, lp] : out.touched) {
    const std::uint32_t old_inf = neg_inf_[j];
    const double old_s = sum_[j];
    std::uint32_t new_inf = old_inf;
    double new_s = old_s;
    if (lp == kNegInf)
      --new_inf;
    else
      new_s -= lp;
    if (old_inf == 0 && new_inf == 0) {
      local += capped(new_s) - capped(old_s);
    } else if (new_inf == 0) {
      local += capped(new_s);
      --blocked;
    }
  }
  out.own_sum = 0.0;
  out.own_neg_inf = 0;
  out.new_total = total_ + local;
  out.new_blocked = blocked;
  out.delta = finalize_delta(local, -log_lambda_, blocked);
  return out.delta;
}

double CachedPattern::stage_birth(Point xi, StagedUpdate& out) const {
  return std::visit([&](const auto& f) { return stage_birth_impl(f, xi, out); },
                    params_.interaction);
}

double CachedPattern::stage_death(std::size_t index, StagedUpdate& out) const {
  return std::visit([&](const auto& f) { return stage_death_impl(f, index, out); },
                    params_.interaction);
}

void CachedPattern::commit(const StagedUpdate& update) {
  assert(update.generation == generation_ && "stale staged update");
  if (update.kind == StagedUpdate::Kind::birth) {
    for (const auto& [j, lp] : update.touched) {
      if (lp == kNegInf)
        ++neg_inf_[j];
      else
        sum_[j] += lp;
    }
    const auto idx = static_cast<std::uint32_t>(points_.size());
    points_.push_back(update.point);
    sum_.push_back(update.own_sum);
    neg_inf_.push_back(update.own_neg_inf);
    grid_.insert(idx, update.point);
  } else {
    for (const auto& [j, lp] : update.touched) {
      if (lp == kNegInf)
        --neg_inf_[j];
      else
        sum_[j] -= lp;
    }
    const std::uint32_t idx = update.index;
    const auto last = static_cast<std::uint32_t>(points_.size() - 1);
    grid_.remove(idx, points_[idx]);
    if (idx != last) {
      grid_.remove(last, points_[last]);
      grid_.insert(idx, points_[last]);
      points_[idx] = points_[last];
      sum_[idx] = sum_[last];
      neg_inf_[idx] = neg_inf_[last];
    }
    points_.pop_back();
    sum_.pop_back();
    neg_inf_.pop_back();
  }
  total_ = update.new_total;
  blocked_ = update.new_blocked;
  ++generation_;
  if (++commits_since_refresh_ >= kRefreshInterval) refresh();
}

template <class F>
void CachedPattern::refresh_impl(const F& f) {
  const std::size_t n = points_.size();
  sum_.assign(n, 0.0);
  neg_inf_.assign(n, 0);
  total_ = 0.0;
  blocked_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::uint32_t inf = 0;
    grid_.for_each_within(points_[i], range_, static_cast<std::uint32_t>(i),
                          [&](std::uint32_t, double d) {
                            const double lp = f.log_phi(d);
                            if (lp == kNegInf)
                              ++inf;
                            else
                              s += lp;
                          });
    sum_[i] = s;
    neg_inf_[i] = inf;
    if (inf == 0)
      total_ += capped(s);
    else
      ++blocked_;
  }
}

void CachedPattern::refresh() {
  std::visit([&](const auto& f) { refresh_impl(f); }, params_.interaction);
  commits_since_refresh_ = 0;
  ++generation_;
}

}  // namespace arpp
