#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latids/colouring.hpp"
#include "latids/ids.hpp"
#include "latids/operator.hpp"

namespace latids {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reproducible experiment description. Flags and config files both populate
/// this; every run is a pure function of it.
struct ExperimentConfig {
  int schema_version = 1;
  std::string model;  // periodic | percolation | visible
  int d = 1;
  std::int64_t period = 1;             // periodic model
  double p_closed = -1.0;              // percolation model
  std::optional<std::uint64_t> seed;   // percolation model (mandatory there)
  double potential_open = 0.0;         // on-site value at open sites
  std::int64_t range = 1;              // hopping range R
  double diagonal = 0.0;               // constant on-site term of the hopping part
  std::vector<std::int64_t> grid_j;    // cube sides for the volume sequence
  std::vector<std::int64_t> grid_m;    // pattern sides
  std::string out_dir = "out";
  double threshold = 0.05;             // jump-report threshold
  double eps = 1e-8;                   // eigenfunction probe tolerance
  std::string nu_ref;                  // "", "closed-form" or "largest-j"

  /// Throws ConfigError on violations common to all commands.
  void validate() const;
  /// Resolved reference mode ("closed-form" for periodic unless overridden).
  std::string nu_ref_mode() const;
};

struct Model {
  Colouring colouring;
  OperatorSpec spec;
};

Model build_model(const ExperimentConfig& config);

/// Reference frequencies at pattern side M: closed-form for periodic models,
/// otherwise the empirical table on the largest grid cube.
FrequencyReference build_reference(const ExperimentConfig& config, const Model& model,
                                   std::int64_t side_m);

/// Exit codes: 0 ok, 2 certificate violation. Config problems throw
/// ConfigError (exit 1 in the driver); numerical failures propagate
/// std::runtime_error (exit 3).
int cmd_freq(const ExperimentConfig& config);
int cmd_ids(const ExperimentConfig& config);
int cmd_bounds(const ExperimentConfig& config);
int cmd_jumps(const ExperimentConfig& config);
int cmd_converge(const ExperimentConfig& config);

}  // namespace latids
