#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kerrlearn/config.hpp"
#include "kerrlearn/errors.hpp"
#include "kerrlearn/runners.hpp"
#include "kerrlearn/version.hpp"

namespace {

struct CommandArgs {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
};

void add_command(CLI::App& app, const std::string& name,
                 const std::string& description, CommandArgs& args,
                 std::function<void(const kerr::ExperimentConfig&)> runner,
                 std::function<void(const kerr::ExperimentConfig&)>& selected) {
  CLI::App* cmd = app.add_subcommand(name, description);
  cmd->add_option("--config", args.config_path, "path to a key=value config file");
  cmd->add_option("--set", args.overrides,
                  "override one config entry, key=value (repeatable)");
  cmd->callback([&selected, runner]() { selected = runner; });
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const kerr::ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const kerr::DimensionMismatch*>(&e))
    return "dimension_mismatch";
  if (dynamic_cast<const kerr::QuadratureUnderResolved*>(&e))
    return "quadrature_under_resolved";
  if (dynamic_cast<const kerr::ResourceLimit*>(&e)) return "resource_limit";
  if (dynamic_cast<const kerr::NonConvergence*>(&e)) return "non_convergence";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const std::logic_error*>(&e)) return "logic_error";
  return "runtime_error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven Kerr-mode kernel experiments"};
  app.set_version_flag("--version", std::string(kerr::kVersion));
  app.require_subcommand(1);

  CommandArgs args;
  std::function<void(const kerr::ExperimentConfig&)> selected;

  add_command(app, "sample", "draw the dataset and write it as CSV", args,
              kerr::run_sample, selected);
  add_command(app, "gram", "kernel matrices across the Kerr sweep", args,
              kerr::run_gram, selected);
  add_command(app, "spectrum", "kernel spectra across the Kerr sweep", args,
              kerr::run_spectrum, selected);
  add_command(app, "fig1", "spectrum statistics, exact and first order", args,
              kerr::run_fig1, selected);
  add_command(app, "fig2", "first-order vs exact kernel error report", args,
              kerr::run_fig2, selected);
  add_command(app, "fig3", "gradient-descent residual traces", args,
              kerr::run_fig3, selected);
  add_command(app, "fig4", "kernel-regression generalization error", args,
              kerr::run_fig4, selected);
  add_command(app, "product-check", "product-kernel bound and crosscheck",
              args, kerr::run_product_check, selected);

  CLI11_PARSE(app, argc, argv);

  try {
    const kerr::ExperimentConfig config =
        kerr::load_config(args.config_path, args.overrides);
    selected(config);
  } catch (const std::exception& e) {
    const nlohmann::json line{{"error", error_kind(e)}, {"message", e.what()}};
    std::cerr << line.dump() << std::endl;
    return 1;
  }
  return 0;
}
