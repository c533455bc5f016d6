#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "arpp/bd_sampler.hpp"
#include "arpp/commands.hpp"
#include "arpp/dmh.hpp"
#include "arpp/errors.hpp"
#include "arpp/interaction.hpp"
#include "arpp/posterior.hpp"
#include "arpp/summaries.hpp"

namespace py = pybind11;
using namespace arpp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> to_points(const Array& xy) {
  if (xy.ndim() != 2 || (xy.shape(1) != 2 && xy.shape(0) != 0))
    throw std::invalid_argument("points must be an (n, 2) array");
  auto a = xy.unchecked<2>();
  std::vector<Point> out(static_cast<std::size_t>(xy.shape(0)));
  for (py::ssize_t i = 0; i < xy.shape(0); ++i) out[i] = {a(i, 0), a(i, 1)};
  return out;
}

Array to_array(const std::vector<Point>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = pts[i].x;
    a(i, 1) = pts[i].y;
  }
  return out;
}

std::vector<double> to_vector(const Array& v) {
  if (v.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return {v.data(), v.data() + v.size()};
}

Array vec_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PointPattern make_pattern(const Window& w, const Array& xy) {
  PointPattern p{w, to_points(xy)};
  require_inside(p);
  return p;
}

ReplicateSet make_replicates(const Window& w, const std::vector<Array>& patterns) {
  ReplicateSet r;
  for (const auto& xy : patterns) r.patterns.push_back(make_pattern(w, xy));
  r.validate();
  return r;
}

ModelParams ar_model(double lambda, double theta1, double theta2, double theta3, double k,
                     double hardcore_radius, double r_max) {
  ModelParams p;
  p.lambda = lambda;
  p.k = k;
  p.interaction = ARInteraction::create(theta1, theta2, theta3, hardcore_radius, r_max);
  p.validate();
  return p;
}

py::dict estimate_dict(const RadiusGrid& grid, const std::vector<double>& g,
                       const std::vector<double>& lo, const std::vector<double>& hi) {
  py::dict d;
  d["r"] = vec_array(grid.values());
  d["g_hat"] = vec_array(g);
  d["lo95"] = vec_array(lo);
  d["hi95"] = vec_array(hi);
  return d;
}

}  // namespace

PYBIND11_MODULE(_arpp, m) {
  m.doc() = "Attraction-repulsion Gibbs point processes";
  m.attr("__version__") = version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Window>(m, "Window")
      .def_static("disc", [](double cx, double cy, double r) { return Window::disc({cx, cy}, r); },
                  py::arg("cx"), py::arg("cy"), py::arg("radius"))
      .def_static("rect", &Window::rect, py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
                  py::arg("y_max"))
      .def_property_readonly("area", &Window::area)
      .def("contains", [](const Window& w, double x, double y) { return w.contains({x, y}); });

  m.def(
      "solve_knots",
      [](double theta1, double theta2, double theta3, double hardcore_radius) {
        const auto k = solve_knots(theta1, theta2, theta3, hardcore_radius);
        return py::make_tuple(k.r1, k.r2);
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("theta3"), py::arg("hardcore_radius"),
      "Knots (r1, r2) of the attraction-repulsion interaction.");

  m.def(
      "phi",
      [](const Array& r, double theta1, double theta2, double theta3, double hardcore_radius,
         double r_max) {
        const auto f = ARInteraction::create(theta1, theta2, theta3, hardcore_radius, r_max);
        Array out(r.request().shape);
        const double* in = r.data();
        double* o = out.mutable_data();
        for (py::ssize_t i = 0; i < r.size(); ++i) o[i] = f.phi(in[i]);
        return out;
      },
      py::arg("r"), py::arg("theta1"), py::arg("theta2"), py::arg("theta3"),
      py::arg("hardcore_radius") = 0.0, py::arg("r_max") = 100.0);

  m.def(
      "log_h",
      [](const Array& xy, const Window& w, double lambda, double theta1, double theta2,
         double theta3, double k, double hardcore_radius, double r_max) {
        return log_h(make_pattern(w, xy),
                     ar_model(lambda, theta1, theta2, theta3, k, hardcore_radius, r_max));
      },
      py::arg("points"), py::arg("window"), py::arg("lam"), py::arg("theta1"), py::arg("theta2"),
      py::arg("theta3"), py::arg("k"), py::arg("hardcore_radius") = 0.0, py::arg("r_max") = 100.0,
      "Unnormalized log density of a pattern.");

  m.def(
      "simulate",
      [](const Window& w, double lambda, double theta1, double theta2, double theta3, double k,
         double hardcore_radius, double r_max, std::size_t n_samples, std::uint64_t burn_in,
         std::uint64_t thin, std::uint64_t seed) {
        const auto model = ar_model(lambda, theta1, theta2, theta3, k, hardcore_radius, r_max);
        BdConfig cfg;
        cfg.burn_in = burn_in;
        cfg.thin = thin;
        cfg.seed = seed;
        std::vector<PointPattern> out;
        {
          py::gil_scoped_release release;
          out = bd_sample_patterns(w, model, cfg, n_samples);
        }
        py::list result;
        for (const auto& p : out) result.append(to_array(p.points));
        return result;
      },
      py::arg("window"), py::arg("lam"), py::arg("theta1"), py::arg("theta2"), py::arg("theta3"),
      py::arg("k"), py::arg("hardcore_radius") = 0.0, py::arg("r_max") = 100.0,
      py::arg("n_samples") = 1, py::arg("burn_in") = 100'000, py::arg("thin") = 1'000,
      py::arg("seed") = 0, "Birth-death forward simulation from the empty pattern.");

  m.def(
      "k_hat",
      [](const Array& xy, const Window& w, const Array& r, bool isotropic) {
        return vec_array(k_hat(make_pattern(w, xy), RadiusGrid(to_vector(r)),
                               isotropic ? EdgeCorrection::isotropic : EdgeCorrection::none));
      },
      py::arg("points"), py::arg("window"), py::arg("r"), py::arg("isotropic") = false);

  m.def("default_bandwidth", &default_bandwidth, py::arg("n_points"), py::arg("area"));

  m.def(
      "pcf",
      [](const std::vector<Array>& patterns, const Window& w, const Array& r,
         std::optional<double> delta, std::size_t bootstrap, std::uint64_t seed) {
        const auto reps = make_replicates(w, patterns);
        const double mean_n = static_cast<double>(reps.total_points()) /
                              static_cast<double>(reps.patterns.size());
        const double d = delta.value_or(default_bandwidth(mean_n, w.area()));
        const RadiusGrid grid(to_vector(r));
        Rng rng(seed);
        PcfEstimate est{grid, {}, {}, {}, 0, d};
        {
          py::gil_scoped_release release;
          est = loh_bootstrap(reps, grid, d, bootstrap, rng);
        }
        auto out = estimate_dict(grid, est.g_hat, est.lo95, est.hi95);
        out["delta"] = d;
        return out;
      },
      py::arg("patterns"), py::arg("window"), py::arg("r"), py::arg("delta") = py::none(),
      py::arg("bootstrap") = 999, py::arg("seed") = 0,
      "Pooled kernel PCF with Loh bootstrap 95% bands.");

  m.def(
      "fit",
      [](const std::vector<Array>& patterns, const Window& w, double hardcore_radius, double r_max,
         std::uint64_t n_outer, std::uint64_t m_inner, std::uint64_t burn_in, std::uint64_t thin,
         std::uint64_t seed, std::optional<std::vector<double>> init) {
        const auto reps = make_replicates(w, patterns);
        const AttractionRepulsionFamily family(PriorSpec::defaults(hardcore_radius),
                                               hardcore_radius, r_max);
        DmhConfig cfg;
        cfg.n_outer = n_outer;
        cfg.m_inner = m_inner;
        cfg.burn_in = burn_in;
        cfg.thin = thin;
        cfg.seed = seed;
        PosteriorChain chain;
        {
          py::gil_scoped_release release;
          chain = dmh_run(reps, family, cfg, init);
        }
        Array samples({static_cast<py::ssize_t>(chain.samples.size()),
                       static_cast<py::ssize_t>(chain.names.size())});
        auto a = samples.mutable_unchecked<2>();
        for (std::size_t i = 0; i < chain.samples.size(); ++i)
          for (std::size_t j = 0; j < chain.names.size(); ++j) a(i, j) = chain.samples[i][j];
        py::dict out;
        out["names"] = chain.names;
        out["samples"] = samples;
        out["accepted"] = std::vector<bool>(chain.accepted.begin(), chain.accepted.end());
        out["acceptance_rate"] = chain.acceptance_rate();
        out["step_sizes"] = chain.final_step_sizes;
        return out;
      },
      py::arg("patterns"), py::arg("window"), py::arg("hardcore_radius") = 0.0,
      py::arg("r_max") = 100.0, py::arg("n_outer") = 1000, py::arg("m_inner") = 0,
      py::arg("burn_in") = 0, py::arg("thin") = 1, py::arg("seed") = 0,
      py::arg("init") = py::none(),
      "Double Metropolis-Hastings fit with the default priors; returns the chain.");

  m.def(
      "hpd",
      [](const Array& s, double level) {
        const auto v = to_vector(s);
        const auto h = hpd(v, level);
        return py::make_tuple(h.lo, h.hi);
      },
      py::arg("samples"), py::arg("level") = 0.95);

  m.def(
      "batch_means_mcse", [](const Array& s) { return batch_means_mcse(to_vector(s)); },
      py::arg("samples"));

  m.def(
      "run",
      [](const std::string& command, const std::string& config_path,
         std::optional<std::string> chain) {
        const auto cfg = load_config(config_path);
        CommandResult res;
        {
          py::gil_scoped_release release;
          if (command == "simulate")
            res = cmd_simulate(cfg);
          else if (command == "fit")
            res = cmd_fit(cfg);
          else if (command == "pcf")
            res = cmd_pcf(cfg);
          else if (command == "gof" && chain)
            res = cmd_gof(cfg, *chain);
          else
            throw ConfigError("unknown command or missing chain: " + command);
        }
        std::vector<std::string> out;
        for (const auto& p : res.outputs) out.push_back(p.string());
        return out;
      },
      py::arg("command"), py::arg("config"), py::arg("chain") = py::none(),
      "Runs a CLI command from a config file and returns the written paths.");
}
