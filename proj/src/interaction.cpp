#include "arpp/interaction.hpp"

#include <sstream>
#include <stdexcept>

#include "arpp/errors.hpp"

namespace arpp {

Knots solve_knots(double theta1, double theta2, double theta3, double hardcore_radius) {
  const double R = hardcore_radius;
  if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(theta3) ||
      !std::isfinite(R))
    throw NoKnotSolution("knot system: parameters must be finite");
  if (!(theta1 > 1.0)) {
    std::ostringstream msg;
    msg << "knot system: theta1 = " << theta1 << " <= 1 has no solution";
    throw NoKnotSolution(msg.str());
  }
  if (!(R >= 0.0) || !(theta2 > R) || !(theta3 > 0.0))
    throw NoKnotSolution("knot system: requires theta2 > R >= 0 and theta3 > 0");

  const double width = theta2 - R;
  const double a = theta1 / (width * width);
  const double excess = theta1 - 1.0;
  const double t3sq = theta3 * theta3;
  auto gap = [&](double u) { return (excess - a * u * u) / (a * u); };
  // Positive left of the root, negative right of it.
  auto residual = [&](double u) {
    const double v = gap(u);
    return a * u * t3sq * v * v * v - 1.0;
  };

  double lo = 0.0;
  double hi = width * std::sqrt(excess / theta1);
  constexpr int kMaxIter = 400;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (iter == kMaxIter || !(hi - lo <= 1e-12 * std::max(1.0, hi)))
    throw SolverFailure("knot system: bisection did not converge");
  const double u = (lo > 0.0) ? 0.5 * (lo + hi) : hi;
  const double v = gap(u);
  if (!(u > 0.0) || !(v > 0.0) || !std::isfinite(v))
    throw SolverFailure("knot system: degenerate bracket");
  const double r1 = theta2 + u;
  return {r1, r1 - v};
}

ARInteraction ARInteraction::create(double theta1, double theta2, double theta3,
                                    double hardcore_radius, double r_max) {
  if (!(r_max > hardcore_radius) || !std::isfinite(r_max))
    throw std::invalid_argument("attraction-repulsion interaction: r_max must exceed R");
  const Knots k = solve_knots(theta1, theta2, theta3, hardcore_radius);
  ARInteraction f;
  f.theta1_ = theta1;
  f.theta2_ = theta2;
  f.theta3_ = theta3;
  f.R_ = hardcore_radius;
  f.r_max_ = r_max;
  f.r1_ = k.r1;
  f.r2_ = k.r2;
  const double width = theta2 - hardcore_radius;
  f.curvature_ = theta1 / (width * width);
  return f;
}

StraussInteraction::StraussInteraction(double gamma, double radius)
    : gamma_(gamma), radius_(radius), log_gamma_(std::log(gamma)) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("Strauss interaction: gamma must lie in [0, 1]");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("Strauss interaction: radius must be positive");
}

StepInteraction::StepInteraction(double log_gamma, double radius)
    : log_gamma_(log_gamma), radius_(radius) {
  if (!std::isfinite(log_gamma))
    throw std::invalid_argument("step interaction: log gamma must be finite");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("step interaction: radius must be positive");
}

}  // namespace arpp
