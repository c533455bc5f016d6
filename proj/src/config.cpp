#include "arpp/config.hpp"

#include <cmath>
#include <set>

#include "arpp/errors.hpp"
#include "arpp/io.hpp"

namespace arpp {

namespace {

/// Reads one JSON object, rejecting keys that are never looked up.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key \"" + key + "\"");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(path_ + ": missing required key \"" + key + "\"");
    return j_.at(key);
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ConfigError(where(key) + ": expected a finite number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(where(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(where(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>()))
        throw ConfigError(where(key) + ": expected an array of finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

fs::path resolve_path(const std::string& p, const fs::path& base) {
  fs::path path(p);
  return fs::absolute(path.is_absolute() ? path : base / path).lexically_normal();
}

Window parse_window(const json& j) {
  Section s(j, "window");
  const std::string type = s.string("type", "");
  try {
    if (type == "disc") {
      const auto c = s.numbers("center");
      if (!c.empty() && c.size() != 2) throw ConfigError("window.center: expected [x, y]");
      const Point center = c.empty() ? Point{0.0, 0.0} : Point{c[0], c[1]};
      return Window::disc(center, s.number("radius"));
    }
    if (type == "rect")
      return Window::rect(s.number("x_min"), s.number("y_min"), s.number("x_max"),
                          s.number("y_max"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("window: ") + e.what());
  }
  throw ConfigError("window.type: expected \"disc\" or \"rect\"");
}

json window_json(const Window& w) {
  if (const auto* d = std::get_if<Window::Disc>(&w.shape()))
    return {{"type", "disc"}, {"center", {d->center.x, d->center.y}}, {"radius", d->radius}};
  const auto& r = std::get<Window::Rect>(w.shape());
  return {{"type", "rect"},
          {"x_min", r.x_min},
          {"y_min", r.y_min},
          {"x_max", r.x_max},
          {"y_max", r.y_max}};
}

UniformPrior parse_uniform(Section& s, const std::string& key) {
  const auto v = s.numbers(key);
  if (v.size() != 2 || !(v[0] < v[1]))
    throw ConfigError(s.where(key) + ": expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

}  // namespace

PriorSpec PriorOverrides::resolve(double hardcore_radius) const {
  PriorSpec p = PriorSpec::defaults(hardcore_radius);
  if (lambda) p.lambda = *lambda;
  if (theta1) p.theta1 = *theta1;
  if (theta2) p.theta2 = *theta2;
  if (theta3) p.theta3 = *theta3;
  if (k) p.k = *k;
  return p;
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  RunConfig cfg;
  Section top(doc, "config");

  cfg.window = parse_window(top.at("window"));

  if (top.has("replicates")) {
    const json& reps = top.at("replicates");
    if (!reps.is_array()) throw ConfigError("config.replicates: expected an array of paths");
    for (const auto& r : reps) {
      if (!r.is_string()) throw ConfigError("config.replicates: expected an array of paths");
      cfg.replicates.push_back(resolve_path(r.get<std::string>(), base_dir));
    }
  }

  if (top.has("hardcore_radius")) {
    const json& h = top.at("hardcore_radius");
    if (h.is_string() && h.get<std::string>() == "min-distance") {
      cfg.hardcore.kind = HardcoreMode::Kind::min_distance;
    } else if (h.is_number() && std::isfinite(h.get<double>()) && h.get<double>() >= 0.0) {
      cfg.hardcore.value = h.get<double>();
    } else {
      throw ConfigError("config.hardcore_radius: expected a number >= 0 or \"min-distance\"");
    }
  }

  cfg.r_max = top.number("r_max", cfg.r_max);
  if (!(cfg.r_max > 0.0)) throw ConfigError("config.r_max: must be positive");

  if (top.has("prior")) {
    Section p(top.at("prior"), "prior");
    if (p.has("lambda")) cfg.prior.lambda = parse_uniform(p, "lambda");
    if (p.has("theta1")) cfg.prior.theta1 = parse_uniform(p, "theta1");
    if (p.has("theta2")) cfg.prior.theta2 = parse_uniform(p, "theta2");
    if (p.has("theta3")) cfg.prior.theta3 = parse_uniform(p, "theta3");
    if (p.has("k")) {
      Section k(p.at("k"), "prior.k");
      cfg.prior.k = GammaPrior{k.number("shape"), k.number("rate")};
      if (!(cfg.prior.k->shape > 0.0 && cfg.prior.k->rate > 0.0))
        throw ConfigError("prior.k: shape and rate must be positive");
    }
  }

  if (top.has("dmh")) {
    Section d(top.at("dmh"), "dmh");
    auto& s = cfg.dmh;
    s.n_outer = d.count("n_outer", s.n_outer);
    s.m_inner = d.count("m_inner", s.m_inner);
    s.thin = d.count("thin", s.thin);
    s.burn_in = d.count("burn_in", s.burn_in);
    s.adapt = d.boolean("adapt", s.adapt);
    s.workers = d.count("workers", s.workers);
    s.proposal_sd = d.numbers("proposal_sd");
    s.init = d.numbers("init");
    if (s.thin == 0) throw ConfigError("dmh.thin: must be >= 1");
    for (double v : s.proposal_sd)
      if (!(v > 0.0)) throw ConfigError("dmh.proposal_sd: entries must be positive");
  }

  if (top.has("pcf")) {
    Section p(top.at("pcf"), "pcf");
    if (p.has("delta")) {
      cfg.pcf.delta = p.number("delta");
      if (!(*cfg.pcf.delta > 0.0)) throw ConfigError("pcf.delta: must be positive");
    }
    cfg.pcf.bootstrap = p.count("bootstrap", cfg.pcf.bootstrap);
    if (cfg.pcf.bootstrap == 0) throw ConfigError("pcf.bootstrap: must be >= 1");
    cfg.pcf.svg = p.boolean("svg", cfg.pcf.svg);
    if (p.has("grid")) {
      Section g(p.at("grid"), "pcf.grid");
      if (g.has("from")) cfg.pcf.grid.from = g.number("from");
      cfg.pcf.grid.to = g.number("to", cfg.pcf.grid.to);
      cfg.pcf.grid.count = g.count("count", cfg.pcf.grid.count);
      if (cfg.pcf.grid.count < 1) throw ConfigError("pcf.grid.count: must be >= 1");
      if (cfg.pcf.grid.from && !(*cfg.pcf.grid.from > 0.0 && *cfg.pcf.grid.from <= cfg.pcf.grid.to))
        throw ConfigError("pcf.grid: need 0 < from <= to");
    }
  }

  if (top.has("simulate")) {
    Section s(top.at("simulate"), "simulate");
    auto& sim = cfg.simulate;
    if (s.has("params")) {
      Section t(s.at("params"), "simulate.params");
      TrueParams tp;
      tp.lambda = t.number("lambda");
      tp.theta1 = t.number("theta1");
      tp.theta2 = t.number("theta2");
      tp.theta3 = t.number("theta3");
      tp.k = t.number("k");
      tp.hardcore_radius = t.number("hardcore_radius", 0.0);
      if (!(tp.lambda > 0.0)) throw ConfigError("simulate.params.lambda: must be positive");
      if (!(tp.k > 0.0)) throw ConfigError("simulate.params.k: must be positive");
      if (!(tp.hardcore_radius >= 0.0))
        throw ConfigError("simulate.params.hardcore_radius: must be >= 0");
      sim.params = tp;
    }
    sim.n_samples = s.count("n_samples", sim.n_samples);
    sim.burn_in = s.count("burn_in", sim.burn_in);
    sim.thin = s.count("thin", sim.thin);
    sim.p_birth = s.number("p_birth", sim.p_birth);
    if (s.has("init")) sim.init = resolve_path(s.string("init", ""), base_dir);
    sim.prefix = s.string("prefix", sim.prefix);
    if (sim.n_samples == 0) throw ConfigError("simulate.n_samples: must be >= 1");
    if (sim.thin == 0) throw ConfigError("simulate.thin: must be >= 1");
    if (!(sim.p_birth > 0.0 && sim.p_birth < 1.0))
      throw ConfigError("simulate.p_birth: must lie in (0, 1)");
    if (sim.prefix.empty() || sim.prefix.find('/') != std::string::npos)
      throw ConfigError("simulate.prefix: must be a plain file name stem");
  }

  if (top.has("gof")) {
    Section g(top.at("gof"), "gof");
    cfg.gof.n_sims = g.count("n_sims", cfg.gof.n_sims);
    cfg.gof.burn_in = g.count("burn_in", cfg.gof.burn_in);
    cfg.gof.svg = g.boolean("svg", cfg.gof.svg);
    if (cfg.gof.n_sims == 0) throw ConfigError("gof.n_sims: must be >= 1");
  }

  cfg.seed = top.count("seed", cfg.seed);
  cfg.out_dir = resolve_path(top.string("out_dir", "out"), base_dir);
  return cfg;
}

json RunConfig::to_json() const {
  json j;
  j["window"] = window_json(window);
  j["replicates"] = json::array();
  for (const auto& r : replicates) j["replicates"].push_back(r.string());
  if (hardcore.kind == HardcoreMode::Kind::min_distance)
    j["hardcore_radius"] = "min-distance";
  else
    j["hardcore_radius"] = hardcore.value;
  j["r_max"] = r_max;

  json p = json::object();
  auto uni = [](const UniformPrior& u) { return json::array({u.lo, u.hi}); };
  if (prior.lambda) p["lambda"] = uni(*prior.lambda);
  if (prior.theta1) p["theta1"] = uni(*prior.theta1);
  if (prior.theta2) p["theta2"] = uni(*prior.theta2);
  if (prior.theta3) p["theta3"] = uni(*prior.theta3);
  if (prior.k) p["k"] = {{"shape", prior.k->shape}, {"rate", prior.k->rate}};
  j["prior"] = p;

  j["dmh"] = {{"n_outer", dmh.n_outer},         {"m_inner", dmh.m_inner},
              {"thin", dmh.thin},               {"burn_in", dmh.burn_in},
              {"adapt", dmh.adapt},             {"workers", dmh.workers},
              {"proposal_sd", dmh.proposal_sd}, {"init", dmh.init}};

  json grid = {{"to", pcf.grid.to}, {"count", pcf.grid.count}};
  if (pcf.grid.from) grid["from"] = *pcf.grid.from;
  j["pcf"] = {{"bootstrap", pcf.bootstrap}, {"svg", pcf.svg}, {"grid", grid}};
  if (pcf.delta) j["pcf"]["delta"] = *pcf.delta;

  json sim = {{"n_samples", simulate.n_samples}, {"burn_in", simulate.burn_in},
              {"thin", simulate.thin},           {"p_birth", simulate.p_birth},
              {"prefix", simulate.prefix}};
  if (simulate.params) {
    const auto& t = *simulate.params;
    sim["params"] = {{"lambda", t.lambda}, {"theta1", t.theta1}, {"theta2", t.theta2},
                     {"theta3", t.theta3}, {"k", t.k},           {"hardcore_radius", t.hardcore_radius}};
  }
  if (simulate.init) sim["init"] = simulate.init->string();
  j["simulate"] = sim;

  j["gof"] = {{"n_sims", gof.n_sims}, {"burn_in", gof.burn_in}, {"svg", gof.svg}};
  j["seed"] = seed;
  j["out_dir"] = out_dir.string();
  return j;
}

RunConfig load_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  const fs::path base = fs::absolute(path).parent_path();
  if (doc.is_object() && doc.contains("command") && doc.contains("config"))
    return parse_config(doc.at("config"), base);
  return parse_config(doc, base);
}

}  // namespace arpp
