#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "arpp/errors.hpp"
#include "arpp/geometry.hpp"
#include "arpp/random.hpp"
#include "oracles.hpp"

using namespace arpp;

namespace {

std::vector<std::uint32_t> grid_neighbors(const NeighborGrid& g, Point p, double r,
                                          std::optional<std::uint32_t> ex = std::nullopt) {
  std::vector<std::uint32_t> out;
  for (const auto& nb : g.neighbors_within(p, r, ex)) out.push_back(nb.index);
  std::sort(out.begin(), out.end());
  return out;
}

// Kolmogorov-Smirnov statistic against U(0, 1).
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  return d;
}

}  // namespace

TEST_CASE("window area") {
  CHECK(Window::disc({0, 0}, 1350).area() == doctest::Approx(5.7256e6).epsilon(1e-4));
  CHECK(Window::rect(0, 0, 1, 1).area() == 1.0);
  CHECK_THROWS_AS(Window::disc({0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Window::rect(0, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Window::rect(0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("window contains uses a closed set") {
  const auto d = Window::disc({0, 0}, 1);
  CHECK(d.contains({0, 1}));
  CHECK_FALSE(d.contains({0, 1.0001}));
  CHECK(Window::rect(0, 0, 2, 2).contains({1, 1}));
  CHECK(Window::rect(0, 0, 2, 2).contains({2, 0}));
  CHECK_FALSE(Window::rect(0, 0, 2, 2).contains({2.0001, 0}));
}

TEST_CASE("uniform sampling on the unit square passes KS at 1%") {
  Rng rng(11);
  const auto w = Window::rect(0, 0, 1, 1);
  std::vector<double> xs, ys;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Point p = w.sample_uniform(rng);
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const double crit = 1.6276 / std::sqrt(static_cast<double>(n));
  CHECK(ks_uniform(xs) < crit);
  CHECK(ks_uniform(ys) < crit);
}

TEST_CASE("uniform sampling on a disc stays inside and is centred") {
  Rng rng(12);
  const auto w = Window::disc({0, 0}, 2.0);
  const int n = 100000;
  double sx = 0, sy = 0, sr2 = 0;
  for (int i = 0; i < n; ++i) {
    const Point p = w.sample_uniform(rng);
    REQUIRE(w.contains(p));
    sx += p.x;
    sy += p.y;
    sr2 += p.x * p.x + p.y * p.y;
  }
  // Var(x) = R^2 / 4 for the uniform disc.
  const double se = std::sqrt(4.0 / 4.0 / n);
  CHECK(std::abs(sx / n) < 3 * se);
  CHECK(std::abs(sy / n) < 3 * se);
  // E|p|^2 = R^2 / 2, Var|p|^2 = R^4 / 12.
  CHECK(std::abs(sr2 / n - 2.0) < 3 * std::sqrt(16.0 / 12.0 / n));
}

TEST_CASE("shifted disc samples uniformly in its own frame") {
  Rng rng(13);
  const auto w = Window::disc({450, -20}, 450);
  for (int i = 0; i < 1000; ++i) CHECK(w.contains(w.sample_uniform(rng)));
}

TEST_CASE("circle fraction inside a window") {
  const auto d = Window::disc({0, 0}, 10);
  CHECK(d.circle_fraction_inside({0, 0}, 5) == doctest::Approx(1.0));
  CHECK(d.circle_fraction_inside({10, 0}, 1e-6) == doctest::Approx(0.5).epsilon(1e-4));
  const auto r = Window::rect(0, 0, 10, 10);
  CHECK(r.circle_fraction_inside({5, 5}, 2) == doctest::Approx(1.0));
  CHECK(r.circle_fraction_inside({0, 5}, 2) == doctest::Approx(0.5));
  CHECK(r.circle_fraction_inside({0, 0}, 2) == doctest::Approx(0.25));
  // Brute-force check on random configurations.
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const Point c = r.sample_uniform(rng);
    const double rad = 0.5 + 6.0 * uniform01(rng);
    int inside = 0;
    const int m = 20000;
    for (int k = 0; k < m; ++k) {
      const double a = 2 * std::numbers::pi * (k + 0.5) / m;
      inside += r.contains({c.x + rad * std::cos(a), c.y + rad * std::sin(a)}) ? 1 : 0;
    }
    CHECK(r.circle_fraction_inside(c, rad) == doctest::Approx(inside / double(m)).epsilon(1e-3));
    const auto dw = Window::disc({5, 5}, 5);
    const Point dc = dw.sample_uniform(rng);
    inside = 0;
    for (int k = 0; k < m; ++k) {
      const double a = 2 * std::numbers::pi * (k + 0.5) / m;
      inside += dw.contains({dc.x + rad * std::cos(a), dc.y + rad * std::sin(a)}) ? 1 : 0;
    }
    CHECK(dw.circle_fraction_inside(dc, rad) == doctest::Approx(inside / double(m)).epsilon(1e-3));
  }
}

TEST_CASE("require_inside lists every offender") {
  PointPattern p{Window::rect(0, 0, 1, 1), {{0.5, 0.5}, {2, 2}, {-1, 0.5}}};
  try {
    require_inside(p);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("#1") != std::string::npos);
    CHECK(msg.find("#2") != std::string::npos);
    CHECK(msg.find("#0") == std::string::npos);
  }
}

TEST_CASE("neighbor grid basics") {
  NeighborGrid g(10.0, Window::rect(0, 0, 100, 100).bounds());
  CHECK(g.neighbors_within({50, 50}, 10.0).empty());
  g.insert(0, {60, 50});
  const auto nb = g.neighbors_within({50, 50}, 10.0);
  REQUIRE(nb.size() == 1);
  CHECK(nb[0].index == 0);
  CHECK(nb[0].distance == 10.0);
  CHECK(g.point_count() == 1);
  NeighborGrid empty(10.0, Window::rect(0, 0, 100, 100).bounds());
  g.remove(0, {60, 50});
  CHECK(g.same_contents(empty));
  CHECK(g.point_count() == 0);
}

TEST_CASE("neighbor queries match brute force on random patterns") {
  Rng rng(21);
  const auto w = Window::disc({0, 0}, 1350);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10 + static_cast<int>(uniform01(rng) * 990);
    NeighborGrid g(100.0, w.bounds());
    std::vector<std::pair<std::uint32_t, Point>> stored;
    for (int i = 0; i < n; ++i) {
      const Point p = w.sample_uniform(rng);
      g.insert(i, p);
      stored.emplace_back(i, p);
    }
    CHECK(g.point_count() == static_cast<std::size_t>(n));
    for (int q = 0; q < 20; ++q) {
      const Point p = w.sample_uniform(rng);
      const double r = 100.0 * uniform01(rng);
      CHECK(grid_neighbors(g, p, r) == oracle::neighbors(stored, p, r));
      const auto ex = static_cast<std::uint32_t>(q % n);
      CHECK(grid_neighbors(g, stored[ex].second, 100.0, ex) ==
            oracle::neighbors(stored, stored[ex].second, 100.0, ex));
    }
  }
}

TEST_CASE("points outside the grid bounds are still found") {
  NeighborGrid g(5.0, Window::rect(0, 0, 20, 20).bounds());
  g.insert(0, {-3, -3});
  g.insert(1, {24, 10});
  CHECK(grid_neighbors(g, {0, 0}, 5.0) == std::vector<std::uint32_t>{0});
  CHECK(grid_neighbors(g, {20, 10}, 4.0) == std::vector<std::uint32_t>{1});
}

TEST_CASE("grid after random inserts and removes equals a rebuilt grid") {
  Rng rng(31);
  const auto w = Window::rect(0, 0, 500, 500);
  NeighborGrid g(25.0, w.bounds());
  std::vector<std::pair<std::uint32_t, Point>> live;
  std::uint32_t next = 0;
  for (int op = 0; op < 1000; ++op) {
    if (live.empty() || uniform01(rng) < 0.6) {
      const Point p = w.sample_uniform(rng);
      g.insert(next, p);
      live.emplace_back(next++, p);
    } else {
      const auto k = static_cast<std::size_t>(uniform01(rng) * live.size());
      g.remove(live[k].first, live[k].second);
      live.erase(live.begin() + static_cast<long>(k));
    }
    if (op % 100 == 0) {
      const Point p = w.sample_uniform(rng);
      CHECK(grid_neighbors(g, p, 25.0) == oracle::neighbors(live, p, 25.0));
    }
  }
  NeighborGrid rebuilt(25.0, w.bounds());
  for (const auto& [i, p] : live) rebuilt.insert(i, p);
  CHECK(g.same_contents(rebuilt));
  CHECK(g.point_count() == live.size());
}

TEST_CASE("coincident points are reported at distance zero") {
  NeighborGrid g(5.0, Window::rect(0, 0, 20, 20).bounds());
  g.insert(0, {3, 3});
  g.insert(1, {3, 3});
  const auto nb = g.neighbors_within({3, 3}, 1.0, 0u);
  REQUIRE(nb.size() == 1);
  CHECK(nb[0].index == 1);
  CHECK(nb[0].distance == 0.0);
}

TEST_CASE("minimum pairwise distance matches brute force") {
  Rng rng(41);
  const auto w = Window::disc({0, 0}, 300);
  for (int t = 0; t < 30; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 200; ++i) pts.push_back(w.sample_uniform(rng));
    double best = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, oracle::dist(pts[i], pts[j]));
    CHECK(min_pairwise_distance(pts) == doctest::Approx(best).epsilon(1e-15));
  }
  CHECK(std::isinf(min_pairwise_distance({{1, 1}})));
}
