#include <iostream>

#include <CLI11.hpp>

#include "dcgrid/cli_report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"DC microgrid secondary-control lab"};
  app.set_version_flag("--version", std::string(dcgrid::cli::kToolVersion));
  app.require_subcommand(1);

  dcgrid::cli::CommandOptions opts;
  std::string config;
  std::string out_dir = ".";
  std::string mode;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "INI configuration file (defaults built in)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--mode", mode, "voltage-loop plant mode")->check(CLI::IsMember({"as-written", "closed-inner"}));
  };
  for (const char* name : {"tune", "simulate", "compare", "rootlocus"}) {
    add_common(app.add_subcommand(name));
  }
  auto* bode = app.add_subcommand("bode");
  add_common(bode);
  bode->add_option("--plant", opts.plant, "power | voltage | unity | power-loop | voltage-loop");
  bode->add_option("--converter", opts.converter, "converter index (1 or 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  opts.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) {
    opts.config_path = config;
  }
  opts.out_dir = out_dir;
  if (!mode.empty()) {
    opts.mode = mode;
  }
  return dcgrid::cli::run_command(opts, std::cout, std::cerr);
}
