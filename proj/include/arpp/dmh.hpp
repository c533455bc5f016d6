#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arpp/bd_sampler.hpp"
#include "arpp/gibbs_model.hpp"
#include "arpp/random.hpp"

namespace arpp {

struct UniformPrior {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

struct GammaPrior {
  double shape = 2.0;
  double rate = 1.0;

  /// Log density up to the normalizing constant; -inf for x <= 0.
  double log_density(double x) const;
};

/// Priors for (lambda, theta1, theta2, theta3, k).
struct PriorSpec {
  UniformPrior lambda{1e-5, 5e-3};
  UniformPrior theta1{1.001, 5.0};
  UniformPrior theta2{0.5, 50.0};
  UniformPrior theta3{0.01, 2.0};
  GammaPrior k{2.0, 1.0};

  /// Defaults, with the theta2 lower bound placed 0.5 px above the hard core.
  static PriorSpec defaults(double hardcore_radius);
  /// Throws ConfigError for unordered or non-finite bounds, theta1.lo <= 1,
  /// theta2.lo <= R, theta3.lo <= 0 or non-positive gamma hyperparameters.
  void validate(double hardcore_radius) const;
};

/// A parametric model family sampled by the outer chain. Parameters are plain
/// vectors; the family knows their names, prior, support and how to build the
/// model. Random-walk proposals move in log space for `log_scale` coordinates.
class ParameterFamily {
 public:
  virtual ~ParameterFamily() = default;

  virtual std::vector<std::string> names() const = 0;
  virtual std::vector<bool> log_scale() const = 0;
  virtual bool in_support(std::span<const double> theta) const = 0;
  /// Log prior density up to a constant; only called inside the support.
  virtual double log_prior(std::span<const double> theta) const = 0;
  /// Throws NumericalError (e.g. NoKnotSolution) when no model exists for theta.
  virtual ModelParams build(std::span<const double> theta) const = 0;
  virtual std::vector<double> default_step_sizes() const = 0;
  virtual std::vector<double> default_init(const ReplicateSet& data) const = 0;
  /// Points in the data closer than this make the likelihood vanish.
  virtual double hardcore_radius() const = 0;

  std::size_t dim() const { return names().size(); }
};

/// The attraction-repulsion model with saturation: theta = (lambda, theta1,
/// theta2, theta3, k); R and r_max are fixed. lambda and theta3 walk on log scale.
class AttractionRepulsionFamily final : public ParameterFamily {
 public:
  /// theta1 at or below this is outside the support.
  static constexpr double kMinTheta1 = 1.0 + 1e-6;

  AttractionRepulsionFamily(PriorSpec prior, double hardcore_radius, double r_max);

  std::vector<std::string> names() const override;
  std::vector<bool> log_scale() const override;
  bool in_support(std::span<const double> theta) const override;
  double log_prior(std::span<const double> theta) const override;
  ModelParams build(std::span<const double> theta) const override;
  std::vector<double> default_step_sizes() const override;
  std::vector<double> default_init(const ReplicateSet& data) const override;
  double hardcore_radius() const override { return R_; }

  const PriorSpec& prior() const { return prior_; }
  double r_max() const { return r_max_; }

 private:
  PriorSpec prior_;
  double R_;
  double r_max_;
};

/// Strauss model without saturation: theta = (lambda, gamma), fixed radius.
/// Used as a small exactly-checkable reference model.
class StraussFamily final : public ParameterFamily {
 public:
  StraussFamily(UniformPrior lambda, UniformPrior gamma, double radius);

  std::vector<std::string> names() const override;
  std::vector<bool> log_scale() const override;
  bool in_support(std::span<const double> theta) const override;
  double log_prior(std::span<const double> theta) const override;
  ModelParams build(std::span<const double> theta) const override;
  std::vector<double> default_step_sizes() const override;
  std::vector<double> default_init(const ReplicateSet& data) const override;
  double hardcore_radius() const override { return 0.0; }

 private:
  UniformPrior lambda_;
  UniformPrior gamma_;
  double radius_;
};

struct Proposal {
  std::vector<double> candidate;
  /// log q(candidate -> current) - log q(current -> candidate) in original coordinates.
  double log_jacobian = 0.0;
  /// Outside the support: rejected without simulation.
  bool out_of_support = false;
};

/// Componentwise Gaussian random walk in transformed coordinates.
Proposal propose(const ParameterFamily& family, std::span<const double> theta,
                 std::span<const double> step_sizes, Rng& rng);

/// Log density of proposing `to` from `from`, in transformed coordinates (up to a constant).
double log_proposal_density(const ParameterFamily& family, std::span<const double> from,
                            std::span<const double> to, std::span<const double> step_sizes);

struct DmhConfig {
  std::uint64_t n_outer = 1000;
  /// Inner birth-death steps per auxiliary draw; 0 selects max(10000, 3 * mean replicate size).
  std::uint64_t m_inner = 0;
  /// Per-parameter random-walk scales; empty selects the family defaults.
  std::vector<double> proposal_sd;
  std::uint64_t thin = 1;
  /// Adaptive steps before n_outer; never retained.
  std::uint64_t burn_in = 0;
  bool adapt = true;
  std::uint64_t seed = 0;
  /// 0 = hardware concurrency.
  std::size_t workers = 0;
  std::size_t inner_max_points = std::numeric_limits<std::size_t>::max();
  double p_birth = 0.5;
  /// Receives warnings such as knot-solver failures at a proposed state.
  std::function<void(const std::string&)> on_warning;

  void validate(std::size_t dim) const;
};

/// Terms of the log acceptance ratio of one outer step.
struct AcceptanceTerms {
  double log_prior_ratio = 0.0;
  double log_jacobian = 0.0;
  /// Per replicate, in input order:
  /// log h(X_i|cand) - log h(X_i|cur) + log h(Y_i|cur) - log h(Y_i|cand).
  std::vector<double> replicate_terms;
  double log_alpha = kNegInf;
};

struct DmhStepResult {
  bool accepted = false;
  bool out_of_support = false;
  bool build_failed = false;
  std::vector<double> candidate;
  AcceptanceTerms terms;
  std::vector<PointPattern> auxiliary;
};

struct PosteriorChain {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;
  /// Whether the move that produced each retained sample was accepted.
  std::vector<bool> accepted;
  std::uint64_t n_steps = 0;
  std::uint64_t accept_count = 0;
  std::uint64_t knot_failures = 0;
  /// Total auxiliary point count per post-burn-in step (0 when no simulation ran).
  std::vector<std::uint64_t> aux_counts;
  std::vector<double> final_step_sizes;

  double acceptance_rate() const {
    return n_steps == 0 ? 0.0 : static_cast<double>(accept_count) / static_cast<double>(n_steps);
  }
  std::vector<double> column(std::size_t j) const;
};

/// Double Metropolis-Hastings over a parameter family.
///
/// Each step proposes theta', runs one inner birth-death chain per replicate
/// starting at the data pattern for m_inner steps at theta', and accepts with
///   prior ratio * proposal ratio * prod_i h(X_i|theta') h(Y_i|theta) / (h(X_i|theta) h(Y_i|theta')).
/// Inner streams are keyed by the step counter and a content hash of each
/// replicate, so results depend neither on scheduling nor on replicate order.
class DmhSampler {
 public:
  DmhSampler(ReplicateSet data, const ParameterFamily& family, DmhConfig cfg,
             std::vector<double> init);

  DmhStepResult step();
  /// Outer step with an explicit candidate (no random-walk draw).
  DmhStepResult step_to(std::vector<double> candidate, double log_jacobian);

  const std::vector<double>& state() const { return state_; }
  const std::vector<double>& step_sizes() const { return step_sizes_; }
  void set_step_sizes(std::vector<double> sd) { step_sizes_ = std::move(sd); }
  std::uint64_t m_inner() const { return m_inner_; }
  std::uint64_t steps_taken() const { return counter_; }

 private:
  DmhStepResult evaluate(std::vector<double> candidate, double log_jacobian);

  ReplicateSet data_;
  const ParameterFamily& family_;
  DmhConfig cfg_;
  std::uint64_t m_inner_;
  std::vector<double> state_;
  ModelParams current_;
  std::vector<double> current_log_h_;
  std::vector<std::uint64_t> replicate_keys_;
  std::vector<std::size_t> canonical_order_;
  std::vector<double> step_sizes_;
  Rng outer_rng_;
  std::uint64_t counter_ = 0;
};

/// Full run: burn-in (with step-size adaptation when enabled), then n_outer
/// steps retaining every thin-th state. Throws DataError when the data violate
/// the family's hard core.
PosteriorChain dmh_run(const ReplicateSet& data, const ParameterFamily& family,
                       const DmhConfig& cfg, std::optional<std::vector<double>> init = {});

/// Minimum interpoint distance over all replicates, shrunk by a relative 1e-9
/// so the closest observed pair keeps a positive interaction.
double fix_hardcore_radius(const ReplicateSet& data);

/// Throws DataError naming the first pair closer than R (R > 0 only).
void check_hardcore(const ReplicateSet& data, double hardcore_radius);

/// FNV-1a over the coordinate bytes; keys replicate random streams.
std::uint64_t pattern_hash(const PointPattern& pattern);

}  // namespace arpp
