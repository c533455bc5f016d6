#include "arpp/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "arpp/errors.hpp"

namespace arpp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Arc {
  double lo;
  double hi;
};

// Total length of the union of arcs on [0, 2pi); arcs may wrap around zero.
double union_length(std::vector<Arc> arcs) {
  std::vector<Arc> flat;
  for (const Arc& a : arcs) {
    double lo = std::fmod(a.lo, kTwoPi);
    if (lo < 0) lo += kTwoPi;
    const double len = a.hi - a.lo;
    if (len >= kTwoPi) return kTwoPi;
    const double hi = lo + len;
    if (hi <= kTwoPi) {
      flat.push_back({lo, hi});
    } else {
      flat.push_back({lo, kTwoPi});
      flat.push_back({0.0, hi - kTwoPi});
    }
  }
  std::sort(flat.begin(), flat.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  double total = 0.0;
  double cur_lo = 0.0;
  double cur_hi = -1.0;
  for (const Arc& a : flat) {
    if (a.lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = a.lo;
      cur_hi = a.hi;
    } else {
      cur_hi = std::max(cur_hi, a.hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return std::min(total, kTwoPi);
}

}  // namespace

Window Window::disc(Point center, double radius) {
  if (!std::isfinite(center.x) || !std::isfinite(center.y))
    throw std::invalid_argument("disc window: center must be finite");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("disc window: radius must be positive and finite");
  return Window(Disc{center, radius});
}

Window Window::rect(double x_min, double y_min, double x_max, double y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max))
    throw std::invalid_argument("rect window: bounds must be finite");
  if (!(x_min < x_max) || !(y_min < y_max))
    throw std::invalid_argument("rect window: requires x_min < x_max and y_min < y_max");
  return Window(Rect{x_min, y_min, x_max, y_max});
}

double Window::area() const {
  if (const auto* d = std::get_if<Disc>(&shape_)) return std::numbers::pi * d->radius * d->radius;
  const auto& r = std::get<Rect>(shape_);
  return (r.x_max - r.x_min) * (r.y_max - r.y_min);
}

bool Window::contains(Point p) const {
  if (const auto* d = std::get_if<Disc>(&shape_))
    return squared_distance(p, d->center) <= d->radius * d->radius;
  const auto& r = std::get<Rect>(shape_);
  return p.x >= r.x_min && p.x <= r.x_max && p.y >= r.y_min && p.y <= r.y_max;
}

Point Window::sample_uniform(Rng& rng) const {
  if (const auto* d = std::get_if<Disc>(&shape_)) {
    std::uniform_real_distribution<double> u(-d->radius, d->radius);
    const double r2 = d->radius * d->radius;
    for (;;) {
      const double dx = u(rng);
      const double dy = u(rng);
      if (dx * dx + dy * dy <= r2) return {d->center.x + dx, d->center.y + dy};
    }
  }
  const auto& r = std::get<Rect>(shape_);
  std::uniform_real_distribution<double> ux(r.x_min, r.x_max);
  std::uniform_real_distribution<double> uy(r.y_min, r.y_max);
  const double x = ux(rng);
  return {x, uy(rng)};
}

Bounds Window::bounds() const {
  if (const auto* d = std::get_if<Disc>(&shape_))
    return {d->center.x - d->radius, d->center.y - d->radius, d->center.x + d->radius,
            d->center.y + d->radius};
  const auto& r = std::get<Rect>(shape_);
  return {r.x_min, r.y_min, r.x_max, r.y_max};
}

double Window::circle_fraction_inside(Point center, double radius) const {
  if (radius <= 0.0) return 1.0;
  if (const auto* d = std::get_if<Disc>(&shape_)) {
    const double rho = distance(center, d->center);
    if (rho + radius <= d->radius) return 1.0;
    if (rho == 0.0) return radius <= d->radius ? 1.0 : 0.0;
    // Circle point at angle psi from the outward direction is inside iff cos(psi) <= t.
    const double t = (d->radius * d->radius - rho * rho - radius * radius) / (2.0 * rho * radius);
    if (t >= 1.0) return 1.0;
    if (t <= -1.0) return 0.0;
    return 1.0 - std::acos(t) / std::numbers::pi;
  }
  const auto& r = std::get<Rect>(shape_);
  // Arcs cut off by each of the four half-planes, centered on the outward normal.
  const double gaps[4] = {r.x_max - center.x, r.y_max - center.y, center.x - r.x_min,
                          center.y - r.y_min};
  std::vector<Arc> outside;
  for (int side = 0; side < 4; ++side) {
    if (gaps[side] >= radius) continue;
    if (gaps[side] <= -radius) return 0.0;
    const double half = std::acos(gaps[side] / radius);
    const double mid = side * (std::numbers::pi / 2.0);
    outside.push_back({mid - half, mid + half});
  }
  if (outside.empty()) return 1.0;
  return 1.0 - union_length(std::move(outside)) / kTwoPi;
}

void require_inside(const PointPattern& pattern) {
  std::ostringstream msg;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < pattern.points.size(); ++i) {
    const Point p = pattern.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !pattern.window.contains(p)) {
      if (bad < 20) msg << (bad ? ", " : "") << "#" << i << " (" << p.x << ", " << p.y << ")";
      ++bad;
    }
  }
  if (bad > 0) {
    std::ostringstream full;
    full << bad << " point(s) outside the window: " << msg.str() << (bad > 20 ? ", ..." : "");
    throw DataError(full.str());
  }
}

double min_pairwise_distance(const std::vector<Point>& points) {
  std::vector<Point> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](Point a, Point b) { return a.x < b.x; });
  double best2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double dx = sorted[j].x - sorted[i].x;
      if (dx * dx >= best2) break;
      best2 = std::min(best2, squared_distance(sorted[i], sorted[j]));
    }
  }
  return std::sqrt(best2);
}

NeighborGrid::NeighborGrid(double cell_size, Bounds bounds) : cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw std::invalid_argument("neighbor grid: cell size must be positive and finite");
  const double w = std::max(bounds.x_max - bounds.x_min, 0.0);
  const double h = std::max(bounds.y_max - bounds.y_min, 0.0);
  // Keep the dense table bounded; larger buckets keep queries exact.
  constexpr double kMaxCells = 1 << 22;
  bucket_size_ = cell_size;
  if ((w / bucket_size_ + 1) * (h / bucket_size_ + 1) > kMaxCells)
    bucket_size_ = std::max(w, h) / (std::sqrt(kMaxCells) - 1);
  x0_ = bounds.x_min;
  y0_ = bounds.y_min;
  nx_ = std::max(1, static_cast<int>(std::ceil(w / bucket_size_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(h / bucket_size_)));
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
}

int NeighborGrid::cell_x(double x) const {
  const double c = std::floor((x - x0_) / bucket_size_);
  if (!(c >= 0.0)) return 0;
  return c >= nx_ - 1 ? nx_ - 1 : static_cast<int>(c);
}

int NeighborGrid::cell_y(double y) const {
  const double c = std::floor((y - y0_) / bucket_size_);
  if (!(c >= 0.0)) return 0;
  return c >= ny_ - 1 ? ny_ - 1 : static_cast<int>(c);
}

void NeighborGrid::insert(std::uint32_t index, Point p) {
  buckets_[bucket_of(p)].push_back({index, p});
  ++count_;
}

void NeighborGrid::remove(std::uint32_t index, Point p) {
  auto& bucket = buckets_[bucket_of(p)];
  auto it = std::find_if(bucket.begin(), bucket.end(),
                         [&](const Entry& e) { return e.index == index; });
  assert(it != bucket.end() && "removing a point that is not stored");
  if (it == bucket.end()) return;
  *it = bucket.back();
  bucket.pop_back();
  --count_;
}

void NeighborGrid::clear() {
  for (auto& b : buckets_) b.clear();
  count_ = 0;
}

std::vector<NeighborGrid::Neighbor> NeighborGrid::neighbors_within(
    Point p, double r, std::optional<std::uint32_t> exclude) const {
  std::vector<Neighbor> out;
  for_each_within(p, r, exclude, [&](std::uint32_t i, double d) { out.push_back({i, d}); });
  return out;
}

bool NeighborGrid::same_contents(const NeighborGrid& other) const {
  if (count_ != other.count_ || buckets_.size() != other.buckets_.size()) return false;
  auto key = [](const Entry& a, const Entry& b) { return a.index < b.index; };
  for (std::size_t c = 0; c < buckets_.size(); ++c) {
    auto a = buckets_[c];
    auto b = other.buckets_[c];
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].index != b[i].index || !(a[i].p == b[i].p)) return false;
  }
  return true;
}

}  // namespace arpp
