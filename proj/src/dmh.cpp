#include "arpp/dmh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "arpp/errors.hpp"
#include "arpp/parallel.hpp"

namespace arpp {

namespace {

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double clamp_into(double x, const UniformPrior& p) {
  const double margin = 1e-3 * p.width();
  return std::clamp(x, p.lo + margin, p.hi - margin);
}

}  // namespace

double GammaPrior::log_density(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(x) - rate * x;
}

PriorSpec PriorSpec::defaults(double hardcore_radius) {
  PriorSpec p;
  p.theta2 = {hardcore_radius + 0.5, std::max(50.0, hardcore_radius + 10.0)};
  return p;
}

void PriorSpec::validate(double hardcore_radius) const {
  auto check = [](const UniformPrior& u, const char* name) {
    if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || !(u.lo < u.hi)) {
      std::ostringstream msg;
      msg << "prior for " << name << ": bounds must be finite with lo < hi";
      throw ConfigError(msg.str());
    }
  };
  check(lambda, "lambda");
  check(theta1, "theta1");
  check(theta2, "theta2");
  check(theta3, "theta3");
  if (!(lambda.lo > 0.0)) throw ConfigError("prior for lambda: lower bound must be > 0");
  if (!(theta1.lo > 1.0)) throw ConfigError("prior for theta1: lower bound must be > 1");
  if (!(theta2.lo > hardcore_radius))
    throw ConfigError("prior for theta2: lower bound must exceed the hard-core radius");
  if (!(theta3.lo > 0.0)) throw ConfigError("prior for theta3: lower bound must be > 0");
  if (!(k.shape > 0.0) || !(k.rate > 0.0) || !std::isfinite(k.shape) || !std::isfinite(k.rate))
    throw ConfigError("prior for k: gamma shape and rate must be positive");
}

AttractionRepulsionFamily::AttractionRepulsionFamily(PriorSpec prior, double hardcore_radius,
                                                     double r_max)
    : prior_(prior), R_(hardcore_radius), r_max_(r_max) {
  if (!(R_ >= 0.0) || !std::isfinite(R_)) throw ConfigError("hard-core radius must be >= 0");
  if (!(r_max_ > prior_.theta2.hi) || !std::isfinite(r_max_))
    throw ConfigError("r_max must exceed the theta2 prior upper bound");
  prior_.validate(R_);
}

std::vector<std::string> AttractionRepulsionFamily::names() const {
  return {"lambda", "theta1", "theta2", "theta3", "k"};
}

std::vector<bool> AttractionRepulsionFamily::log_scale() const {
  return {true, false, false, true, false};
}

bool AttractionRepulsionFamily::in_support(std::span<const double> t) const {
  if (t.size() != 5 || !finite_all(t)) return false;
  return prior_.lambda.contains(t[0]) && prior_.theta1.contains(t[1]) && t[1] > kMinTheta1 &&
         prior_.theta2.contains(t[2]) && t[2] > R_ && prior_.theta3.contains(t[3]) &&
         t[3] > 0.0 && t[4] > 0.0;
}

double AttractionRepulsionFamily::log_prior(std::span<const double> t) const {
  return prior_.k.log_density(t[4]);
}

ModelParams AttractionRepulsionFamily::build(std::span<const double> t) const {
  ModelParams p;
  p.lambda = t[0];
  p.k = t[4];
  p.interaction = ARInteraction::create(t[1], t[2], t[3], R_, r_max_);
  return p;
}

std::vector<double> AttractionRepulsionFamily::default_step_sizes() const {
  const double k_scale = (prior_.k.shape + 3.0 * std::sqrt(prior_.k.shape)) / prior_.k.rate;
  return {0.02 * std::log(prior_.lambda.hi / prior_.lambda.lo), 0.02 * prior_.theta1.width(),
          0.02 * prior_.theta2.width(), 0.02 * std::log(prior_.theta3.hi / prior_.theta3.lo),
          0.02 * k_scale};
}

std::vector<double> AttractionRepulsionFamily::default_init(const ReplicateSet& data) const {
  const double n_bar =
      static_cast<double>(data.total_points()) / static_cast<double>(data.patterns.size());
  const double area = data.window().area();
  return {clamp_into(std::max(n_bar, 1.0) / area, prior_.lambda),
          std::max(prior_.theta1.lo + 0.1 * prior_.theta1.width(), kMinTheta1 + 1e-3),
          prior_.theta2.lo + 0.25 * prior_.theta2.width(),
          std::sqrt(prior_.theta3.lo * prior_.theta3.hi), prior_.k.shape / prior_.k.rate};
}

StraussFamily::StraussFamily(UniformPrior lambda, UniformPrior gamma, double radius)
    : lambda_(lambda), gamma_(gamma), radius_(radius) {
  if (!(lambda_.lo > 0.0) || !(lambda_.lo < lambda_.hi) || !std::isfinite(lambda_.hi))
    throw ConfigError("Strauss prior for lambda: need 0 < lo < hi < inf");
  if (!(gamma_.lo >= 0.0) || !(gamma_.hi <= 1.0) || !(gamma_.lo < gamma_.hi))
    throw ConfigError("Strauss prior for gamma: need 0 <= lo < hi <= 1");
  if (!(radius_ > 0.0)) throw ConfigError("Strauss radius must be positive");
}

std::vector<std::string> StraussFamily::names() const { return {"lambda", "gamma"}; }

std::vector<bool> StraussFamily::log_scale() const { return {true, false}; }

bool StraussFamily::in_support(std::span<const double> t) const {
  return t.size() == 2 && finite_all(t) && lambda_.contains(t[0]) && gamma_.contains(t[1]) &&
         t[1] > 0.0;
}

double StraussFamily::log_prior(std::span<const double>) const { return 0.0; }

ModelParams StraussFamily::build(std::span<const double> t) const {
  ModelParams p;
  p.lambda = t[0];
  p.k = std::numeric_limits<double>::infinity();
  p.interaction = StraussInteraction(t[1], radius_);
  return p;
}

std::vector<double> StraussFamily::default_step_sizes() const {
  return {0.05 * std::log(lambda_.hi / lambda_.lo), 0.05 * gamma_.width()};
}

std::vector<double> StraussFamily::default_init(const ReplicateSet& data) const {
  const double n_bar =
      static_cast<double>(data.total_points()) / static_cast<double>(data.patterns.size());
  return {clamp_into(std::max(n_bar, 1.0) / data.window().area(), lambda_),
          clamp_into(0.5 * (gamma_.lo + gamma_.hi), gamma_)};
}

Proposal propose(const ParameterFamily& family, std::span<const double> theta,
                 std::span<const double> step_sizes, Rng& rng) {
  const auto logs = family.log_scale();
  std::normal_distribution<double> normal(0.0, 1.0);
  Proposal out;
  out.candidate.assign(theta.begin(), theta.end());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double z = normal(rng);
    if (step_sizes[j] == 0.0) continue;
    if (logs[j]) {
      const double w = std::log(theta[j]) + step_sizes[j] * z;
      out.candidate[j] = std::exp(w);
      out.log_jacobian += step_sizes[j] * z;
    } else {
      out.candidate[j] = theta[j] + step_sizes[j] * z;
    }
  }
  out.out_of_support = !family.in_support(out.candidate);
  return out;
}

double log_proposal_density(const ParameterFamily& family, std::span<const double> from,
                            std::span<const double> to, std::span<const double> step_sizes) {
  const auto logs = family.log_scale();
  double total = 0.0;
  for (std::size_t j = 0; j < from.size(); ++j) {
    const double a = logs[j] ? std::log(from[j]) : from[j];
    const double b = logs[j] ? std::log(to[j]) : to[j];
    const double z = (b - a) / step_sizes[j];
    total += -0.5 * z * z - std::log(step_sizes[j]);
  }
  return total;
}

void DmhConfig::validate(std::size_t dim) const {
  if (thin == 0) throw ConfigError("dmh: thin must be >= 1");
  if (!proposal_sd.empty()) {
    if (proposal_sd.size() != dim)
      throw ConfigError("dmh: proposal_sd must have one entry per parameter");
    for (double s : proposal_sd)
      if (!(s > 0.0) || !std::isfinite(s))
        throw ConfigError("dmh: proposal step sizes must be positive");
  }
  if (!(p_birth > 0.0 && p_birth < 1.0)) throw ConfigError("dmh: p_birth must lie in (0, 1)");
}

std::vector<double> PosteriorChain::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s[j]);
  return out;
}

std::uint64_t pattern_hash(const PointPattern& pattern) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (const Point& p : pattern.points) {
    feed(p.x);
    feed(p.y);
  }
  return h;
}

double fix_hardcore_radius(const ReplicateSet& data) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : data.patterns) best = std::min(best, min_pairwise_distance(p.points));
  if (!std::isfinite(best))
    throw DataError("cannot fix the hard-core radius: no replicate has two points");
  return best * (1.0 - 1e-9);
}

void check_hardcore(const ReplicateSet& data, double hardcore_radius) {
  if (!(hardcore_radius > 0.0)) return;
  for (std::size_t r = 0; r < data.patterns.size(); ++r) {
    const auto& pts = data.patterns[r].points;
    NeighborGrid grid(hardcore_radius, data.patterns[r].window.bounds());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (const auto& nb : grid.neighbors_within(pts[i], hardcore_radius)) {
        std::ostringstream msg;
        msg << "replicate " << r << ": points #" << nb.index << " (" << pts[nb.index].x << ", "
            << pts[nb.index].y << ") and #" << i << " (" << pts[i].x << ", " << pts[i].y
            << ") are " << nb.distance << " px apart, within the hard-core radius "
            << hardcore_radius;
        throw DataError(msg.str());
      }
      grid.insert(static_cast<std::uint32_t>(i), pts[i]);
    }
  }
}

DmhSampler::DmhSampler(ReplicateSet data, const ParameterFamily& family, DmhConfig cfg,
                       std::vector<double> init)
    : data_(std::move(data)), family_(family), cfg_(std::move(cfg)), state_(std::move(init)) {
  data_.validate();
  cfg_.validate(family_.dim());
  check_hardcore(data_, family_.hardcore_radius());
  if (!family_.in_support(state_)) throw ConfigError("dmh: initial state outside the prior support");
  current_ = family_.build(state_);

  const double n_bar =
      static_cast<double>(data_.total_points()) / static_cast<double>(data_.patterns.size());
  m_inner_ = cfg_.m_inner > 0
                 ? cfg_.m_inner
                 : std::max<std::uint64_t>(10'000, static_cast<std::uint64_t>(std::ceil(3 * n_bar)));

  const std::size_t reps = data_.patterns.size();
  current_log_h_.resize(reps);
  replicate_keys_.resize(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    current_log_h_[i] = log_h(data_.patterns[i], current_);
    if (!std::isfinite(current_log_h_[i]))
      throw DataError("dmh: data has zero likelihood at the initial state");
    replicate_keys_[i] = pattern_hash(data_.patterns[i]);
  }
  canonical_order_.resize(reps);
  std::iota(canonical_order_.begin(), canonical_order_.end(), 0);
  std::stable_sort(canonical_order_.begin(), canonical_order_.end(),
                   [&](std::size_t a, std::size_t b) {
                     return replicate_keys_[a] < replicate_keys_[b];
                   });
  step_sizes_ = cfg_.proposal_sd.empty() ? family_.default_step_sizes() : cfg_.proposal_sd;
  outer_rng_.seed(derive_seed(cfg_.seed, {0}));
}

DmhStepResult DmhSampler::step() {
  Proposal prop = propose(family_, state_, step_sizes_, outer_rng_);
  if (prop.out_of_support) {
    ++counter_;
    DmhStepResult r;
    r.out_of_support = true;
    r.candidate = std::move(prop.candidate);
    return r;
  }
  return evaluate(std::move(prop.candidate), prop.log_jacobian);
}

DmhStepResult DmhSampler::step_to(std::vector<double> candidate, double log_jacobian) {
  if (!family_.in_support(candidate)) {
    ++counter_;
    DmhStepResult r;
    r.out_of_support = true;
    r.candidate = std::move(candidate);
    return r;
  }
  return evaluate(std::move(candidate), log_jacobian);
}

DmhStepResult DmhSampler::evaluate(std::vector<double> candidate, double log_jacobian) {
  const std::uint64_t step_id = counter_++;
  DmhStepResult result;
  result.candidate = std::move(candidate);

  ModelParams cand;
  try {
    cand = family_.build(result.candidate);
  } catch (const NumericalError& e) {
    result.build_failed = true;
    if (cfg_.on_warning) cfg_.on_warning(std::string("rejected proposal: ") + e.what());
    return result;
  }

  const std::size_t reps = data_.patterns.size();
  std::vector<double> lh_x(reps), lh_y_cur(reps), lh_y_cand(reps);
  result.auxiliary = data_.patterns;

  // Replicates with identical content get distinct streams by their rank.
  std::vector<std::uint64_t> dup_rank(reps, 0);
  for (std::size_t k = 1; k < reps; ++k) {
    const auto a = canonical_order_[k - 1];
    const auto b = canonical_order_[k];
    if (replicate_keys_[a] == replicate_keys_[b]) dup_rank[b] = dup_rank[a] + 1;
  }

  BdConfig inner;
  inner.p_birth = cfg_.p_birth;
  inner.max_points = cfg_.inner_max_points;

  parallel_for(reps, cfg_.workers, [&](std::size_t i) {
    const PointPattern& x = data_.patterns[i];
    lh_x[i] = log_h(x, cand);
    if (lh_x[i] == kNegInf) {
      result.auxiliary[i] = x;
      lh_y_cur[i] = kNegInf;
      lh_y_cand[i] = 0.0;
      return;
    }
    Rng rng(derive_seed(cfg_.seed, {1, step_id, replicate_keys_[i], dup_rank[i]}));
    CachedPattern cache(x, cand);
    bd_advance(cache, inner, m_inner_, rng);
    result.auxiliary[i] = cache.pattern();
    lh_y_cur[i] = log_h(result.auxiliary[i], current_);
    lh_y_cand[i] = log_h(result.auxiliary[i], cand);
  });

  AcceptanceTerms& terms = result.terms;
  terms.log_prior_ratio = family_.log_prior(result.candidate) - family_.log_prior(state_);
  terms.log_jacobian = log_jacobian;
  terms.replicate_terms.resize(reps);
  bool blocked = false;
  for (std::size_t i = 0; i < reps; ++i) {
    if (lh_x[i] == kNegInf || lh_y_cur[i] == kNegInf || !std::isfinite(lh_y_cand[i])) {
      terms.replicate_terms[i] = kNegInf;
      blocked = true;
    } else {
      terms.replicate_terms[i] = lh_x[i] - current_log_h_[i] + lh_y_cur[i] - lh_y_cand[i];
    }
  }
  if (blocked) {
    terms.log_alpha = kNegInf;
  } else {
    double sum = terms.log_prior_ratio + terms.log_jacobian;
    for (std::size_t i : canonical_order_) sum += terms.replicate_terms[i];
    terms.log_alpha = sum;
  }

  const double u = uniform01(outer_rng_);
  if (terms.log_alpha >= 0.0 || std::log(u) < terms.log_alpha) {
    result.accepted = true;
    state_ = result.candidate;
    current_ = std::move(cand);
    current_log_h_ = std::move(lh_x);
  }
  return result;
}

PosteriorChain dmh_run(const ReplicateSet& data, const ParameterFamily& family,
                       const DmhConfig& cfg, std::optional<std::vector<double>> init) {
  std::vector<double> start = init ? *init : family.default_init(data);
  DmhSampler sampler(data, family, cfg, std::move(start));

  PosteriorChain chain;
  chain.names = family.names();

  // Burn-in: scale all step sizes towards a 0.3 acceptance rate in batches of 50.
  constexpr std::uint64_t kBatch = 50;
  std::uint64_t batch_accepts = 0;
  for (std::uint64_t t = 1; t <= cfg.burn_in; ++t) {
    const auto r = sampler.step();
    batch_accepts += r.accepted ? 1 : 0;
    if (cfg.adapt && t % kBatch == 0) {
      const double rate = static_cast<double>(batch_accepts) / kBatch;
      const double factor = std::clamp(std::exp(2.0 * (rate - 0.3)), 0.5, 2.0);
      auto sd = sampler.step_sizes();
      for (double& s : sd) s *= factor;
      sampler.set_step_sizes(std::move(sd));
      batch_accepts = 0;
    }
  }

  chain.samples.reserve(cfg.n_outer / cfg.thin);
  chain.aux_counts.reserve(cfg.n_outer);
  for (std::uint64_t t = 1; t <= cfg.n_outer; ++t) {
    const auto r = sampler.step();
    ++chain.n_steps;
    if (r.accepted) ++chain.accept_count;
    if (r.build_failed) ++chain.knot_failures;
    std::uint64_t aux = 0;
    for (const auto& y : r.auxiliary) aux += y.size();
    chain.aux_counts.push_back(aux);
    if (t % cfg.thin == 0) {
      chain.samples.push_back(sampler.state());
      chain.accepted.push_back(r.accepted);
    }
  }
  chain.final_step_sizes = sampler.step_sizes();
  return chain;
}

}  // namespace arpp
