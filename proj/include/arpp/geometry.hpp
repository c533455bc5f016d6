#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <variant>
#include <vector>

#include "arpp/random.hpp"

namespace arpp {

/// A location in the plane, in pixels.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Axis-aligned bounding box.
struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

/// Bounded observation window: a disc or an axis-aligned rectangle.
/// Construction validates the shape, so every Window has positive area.
class Window {
 public:
  struct Disc {
    Point center;
    double radius = 0.0;
    friend bool operator==(const Disc&, const Disc&) = default;
  };
  struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    friend bool operator==(const Rect&, const Rect&) = default;
  };

  static Window disc(Point center, double radius);
  static Window rect(double x_min, double y_min, double x_max, double y_max);

  double area() const;
  /// Closed set: boundary points are inside.
  bool contains(Point p) const;
  /// Exactly uniform draw over the window (disc draws use rejection from the bounding square).
  Point sample_uniform(Rng& rng) const;
  Bounds bounds() const;

  /// Fraction of the circle of the given radius around `center` that lies inside
  /// the window. Used for isotropic (Ripley) edge correction.
  double circle_fraction_inside(Point center, double radius) const;

  bool is_disc() const { return std::holds_alternative<Disc>(shape_); }
  const std::variant<Disc, Rect>& shape() const { return shape_; }

  friend bool operator==(const Window&, const Window&) = default;

 private:
  explicit Window(std::variant<Disc, Rect> shape) : shape_(shape) {}
  std::variant<Disc, Rect> shape_;
};

/// A finite set of points together with the window they were observed in.
struct PointPattern {
  Window window;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Throws DataError naming every point that lies outside the window.
void require_inside(const PointPattern& pattern);

/// Smallest pairwise distance in the pattern; +inf when fewer than two points.
/// Sweep over x-sorted points, O(n log n) for well-spread data.
double min_pairwise_distance(const std::vector<Point>& points);

/// Fixed-radius neighbor index over a dense uniform grid.
///
/// Cells are at least `cell_size` wide, so every point within `cell_size` of a
/// query lives in the query's cell or one of its eight neighbors. Points outside
/// the bounds are clamped into edge cells; clamping is monotone and never moves
/// two points more than one cell further apart, so queries stay exact.
class NeighborGrid {
 public:
  struct Neighbor {
    std::uint32_t index;
    double distance;
  };

  NeighborGrid(double cell_size, Bounds bounds);

  void insert(std::uint32_t index, Point p);
  /// Precondition: (index, p) is stored. Violations abort in debug builds and
  /// are ignored otherwise.
  void remove(std::uint32_t index, Point p);
  void clear();

  std::size_t point_count() const { return count_; }
  double cell_size() const { return cell_size_; }

  /// Calls fn(index, distance) for every stored point q with |p - q| <= r,
  /// skipping `exclude`. Requires r <= cell_size().
  template <class Fn>
  void for_each_within(Point p, double r, std::optional<std::uint32_t> exclude, Fn&& fn) const;

  std::vector<Neighbor> neighbors_within(Point p, double r,
                                         std::optional<std::uint32_t> exclude = std::nullopt) const;

  /// Same stored (index, point) entries in the same buckets, order-insensitive.
  bool same_contents(const NeighborGrid& other) const;

 private:
  struct Entry {
    std::uint32_t index;
    Point p;
  };

  int cell_x(double x) const;
  int cell_y(double y) const;
  std::size_t bucket_of(Point p) const {
    return static_cast<std::size_t>(cell_y(p.y)) * nx_ + static_cast<std::size_t>(cell_x(p.x));
  }

  double cell_size_;
  double bucket_size_;
  double x0_;
  double y0_;
  int nx_;
  int ny_;
  std::size_t count_ = 0;
  std::vector<std::vector<Entry>> buckets_;
};

template <class Fn>
void NeighborGrid::for_each_within(Point p, double r, std::optional<std::uint32_t> exclude,
                                   Fn&& fn) const {
  // Contract: one-ring lookups only cover radii up to the cell size.
  if (!(r <= cell_size_)) std::abort();
  const double r2 = r * r;
  const int cx = cell_x(p.x);
  const int cy = cell_y(p.y);
  const int x_lo = cx > 0 ? cx - 1 : 0;
  const int x_hi = cx + 1 < nx_ ? cx + 1 : nx_ - 1;
  const int y_lo = cy > 0 ? cy - 1 : 0;
  const int y_hi = cy + 1 < ny_ ? cy + 1 : ny_ - 1;
  const bool has_exclude = exclude.has_value();
  const std::uint32_t skip = exclude.value_or(0);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const auto& bucket = buckets_[static_cast<std::size_t>(y) * nx_ + x];
      for (const Entry& e : bucket) {
        if (has_exclude && e.index == skip) continue;
        const double d2 = squared_distance(p, e.p);
        if (d2 <= r2) fn(e.index, std::sqrt(d2));
      }
    }
  }
}

}  // namespace arpp
