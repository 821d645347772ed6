#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "latids/experiment.hpp"

namespace {

void add_common_flags(CLI::App* cmd, latids::ExperimentConfig& config) {
  cmd->add_option("--model", config.model, "model: periodic | percolation | visible")
      ->required();
  cmd->add_option("--d", config.d, "lattice dimension");
  cmd->add_option("--period", config.period, "period of the periodic colouring");
  cmd->add_option("--p-closed", config.p_closed, "closed-site probability (percolation)");
  cmd->add_option_function<std::uint64_t>(
         "--seed", [&config](std::uint64_t s) { config.seed = s; },
         "random-field seed (percolation)")
      ->type_name("UINT");
  cmd->add_option("--potential-open", config.potential_open, "on-site value at open sites");
  cmd->add_option("--range", config.range, "hopping range R");
  cmd->add_option("--diag", config.diagonal, "constant on-site term of the hopping part");
  cmd->add_option("--grid-j", config.grid_j, "cube sides j (repeatable)");
  cmd->add_option("--side", config.grid_j, "alias for a single cube side j");
  cmd->add_option("--grid-M", config.grid_m, "pattern sides M (repeatable)");
  cmd->add_option("--M", config.grid_m, "alias for a single pattern side M");
  cmd->add_option("--out", config.out_dir, "output directory");
  cmd->add_option("--threshold", config.threshold, "minimum jump size to report");
  cmd->add_option("--eps", config.eps, "eigenfunction probe tolerance");
  cmd->add_option("--nu-ref", config.nu_ref, "frequency reference: closed-form | largest-j");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume and pattern-based spectral distribution experiments "
               "for finite-range lattice operators"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "config file; keys for a subcommand live in its [section]");

  latids::ExperimentConfig config;
  app.add_option("--schema-version", config.schema_version, "config schema version");
  int rc = 0;
  auto dispatch = [&](int (*fn)(const latids::ExperimentConfig&)) {
    return [&rc, &config, fn]() { rc = fn(config); };
  };

  add_common_flags(app.add_subcommand("freq", "pattern frequency tables"), config);
  add_common_flags(app.add_subcommand("ids", "spectral distribution curves and certificates"),
                   config);
  add_common_flags(app.add_subcommand("bounds", "bound-versus-measured tables"), config);
  add_common_flags(app.add_subcommand("jumps", "jump report with eigenfunction probes"), config);
  add_common_flags(app.add_subcommand("converge", "finite-volume versus pattern sweeps"), config);

  app.get_subcommand("freq")->callback(dispatch(latids::cmd_freq));
  app.get_subcommand("ids")->callback(dispatch(latids::cmd_ids));
  app.get_subcommand("bounds")->callback(dispatch(latids::cmd_bounds));
  app.get_subcommand("jumps")->callback(dispatch(latids::cmd_jumps));
  app.get_subcommand("converge")->callback(dispatch(latids::cmd_converge));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const latids::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return rc;
}
