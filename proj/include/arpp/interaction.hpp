#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

namespace arpp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Knots joining the quadratic peak to the decaying tail.
struct Knots {
  double r1;  ///< switch point between the two branches
  double r2;  ///< pole offset of the tail branch, r2 < r1
};

/// Solves the C1 matching conditions between the peak branch
///   y1(r) = theta1 - (sqrt(theta1) / (theta2 - R) * (r - theta2))^2
/// and the tail branch
///   y2(r) = 1 + 1 / (theta3 * (r - r2))^2.
///
/// With a = theta1 / (theta2 - R)^2, u = r1 - theta2 and v = r1 - r2 the two
/// conditions reduce to v = (theta1 - 1 - a u^2) / (a u) and a u theta3^2 v^3 = 1.
/// The left side of the latter is strictly decreasing in u on
/// (0, (theta2 - R) sqrt((theta1 - 1) / theta1)), so bisection on that bracket
/// always converges.
///
/// Throws NoKnotSolution when theta1 <= 1 (the tail stays above 1 and can never
/// meet the peak) or the shape is otherwise outside the domain (theta2 <= R,
/// theta3 <= 0, R < 0), and SolverFailure if bisection stalls.
Knots solve_knots(double theta1, double theta2, double theta3, double hardcore_radius);

/// Piecewise attraction-repulsion interaction: hard core on [0, R], quadratic
/// peak of height theta1 at theta2, tail 1 + 1/(theta3 (r - r2))^2 decaying to
/// 1, truncated to exactly 1 beyond r_max.
class ARInteraction {
 public:
  /// Validates the shape and solves the knots; see solve_knots for errors.
  static ARInteraction create(double theta1, double theta2, double theta3, double hardcore_radius,
                              double r_max);

  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  double theta3() const { return theta3_; }
  double hardcore_radius() const { return R_; }
  double r_max() const { return r_max_; }
  double r1() const { return r1_; }
  double r2() const { return r2_; }
  double range() const { return r_max_; }

  /// Untruncated branch values, exposed for smoothness checks.
  double peak_branch(double r) const {
    const double t = r - theta2_;
    return theta1_ - curvature_ * t * t;
  }
  double tail_branch(double r) const {
    const double t = theta3_ * (r - r2_);
    return 1.0 + 1.0 / (t * t);
  }

  double phi(double r) const {
    if (r <= R_) return 0.0;
    if (r > r_max_) return 1.0;
    if (r <= r1_) return std::max(peak_branch(r), 0.0);
    return tail_branch(r);
  }

  /// log phi; -inf inside the hard core or where phi underflows to zero.
  double log_phi(double r) const {
    if (r <= R_) return kNegInf;
    if (r > r_max_) return 0.0;
    if (r <= r1_) {
      const double y = peak_branch(r);
      return y > 0.0 ? std::log(y) : kNegInf;
    }
    const double t = theta3_ * (r - r2_);
    return std::log1p(1.0 / (t * t));
  }

 private:
  ARInteraction() = default;

  double theta1_ = 0.0;
  double theta2_ = 0.0;
  double theta3_ = 0.0;
  double R_ = 0.0;
  double r_max_ = 0.0;
  double r1_ = 0.0;
  double r2_ = 0.0;
  double curvature_ = 0.0;  // theta1 / (theta2 - R)^2
};

/// Strauss repulsion: gamma within distance R, 1 beyond.
class StraussInteraction {
 public:
  StraussInteraction(double gamma, double radius);

  double gamma() const { return gamma_; }
  double radius() const { return radius_; }
  double range() const { return radius_; }
  double phi(double r) const { return r <= radius_ ? gamma_ : 1.0; }
  double log_phi(double r) const { return r <= radius_ ? log_gamma_ : 0.0; }

 private:
  double gamma_;
  double radius_;
  double log_gamma_;
};

/// Step interaction with an unrestricted log-strength (Geyer-style pairs count).
class StepInteraction {
 public:
  StepInteraction(double log_gamma, double radius);

  double log_gamma() const { return log_gamma_; }
  double radius() const { return radius_; }
  double range() const { return radius_; }
  double phi(double r) const { return r <= radius_ ? std::exp(log_gamma_) : 1.0; }
  double log_phi(double r) const { return r <= radius_ ? log_gamma_ : 0.0; }

 private:
  double log_gamma_;
  double radius_;
};

using Interaction = std::variant<ARInteraction, StraussInteraction, StepInteraction>;

/// Distance beyond which log phi is identically zero.
inline double interaction_range(const Interaction& f) {
  return std::visit([](const auto& g) { return g.range(); }, f);
}

inline double phi(const Interaction& f, double r) {
  return std::visit([r](const auto& g) { return g.phi(r); }, f);
}

inline double log_phi(const Interaction& f, double r) {
  return std::visit([r](const auto& g) { return g.log_phi(r); }, f);
}

}  // namespace arpp
