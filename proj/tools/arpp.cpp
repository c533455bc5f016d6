#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "arpp/commands.hpp"
#include "arpp/config.hpp"
#include "arpp/errors.hpp"
#include "arpp/io.hpp"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNumerical = 4 };

/// Chain path recorded in a gof manifest, if `config_path` is one.
std::optional<std::string> manifest_chain(const std::string& config_path) {
  try {
    const auto doc = nlohmann::json::parse(arpp::read_text(config_path));
    if (doc.is_object() && doc.value("command", "") == "gof" && doc.contains("chain_file"))
      return doc.at("chain_file").get<std::string>();
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attraction-repulsion Gibbs point processes: simulate, fit, pcf, gof"};
  app.set_version_flag("--version", arpp::version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> chain_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run config (JSON) or a run manifest")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out-dir", out_dir, "Override the output directory");
  };
  auto* simulate = app.add_subcommand("simulate", "Forward-simulate patterns at fixed parameters");
  auto* fit = app.add_subcommand("fit", "Double Metropolis-Hastings posterior sampling");
  auto* pcf = app.add_subcommand("pcf", "Pair correlation function with bootstrap bands");
  auto* gof = app.add_subcommand("gof", "Posterior-predictive PCF bands");
  for (auto* sub : {simulate, fit, pcf, gof}) add_common(sub);
  gof->add_option("--chain", chain_path, "Chain CSV written by fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    arpp::RunConfig cfg = arpp::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = arpp::fs::absolute(*out_dir).lexically_normal();

    arpp::CommandResult result;
    if (simulate->parsed()) {
      result = arpp::cmd_simulate(cfg);
    } else if (fit->parsed()) {
      result = arpp::cmd_fit(cfg);
    } else if (pcf->parsed()) {
      result = arpp::cmd_pcf(cfg);
    } else {
      if (!chain_path) chain_path = manifest_chain(config_path);
      if (!chain_path) throw arpp::ConfigError("gof: --chain is required");
      result = arpp::cmd_gof(cfg, *chain_path);
    }
    for (const auto& p : result.outputs) std::cout << p.string() << "\n";
    return kOk;
  } catch (const arpp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const arpp::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const arpp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
