#include "latids/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "latids/detail/format.hpp"
#include "latids/detail/parallel.hpp"
#include "latids/spectral.hpp"

namespace latids {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using detail::fmt17;

void ExperimentConfig::validate() const {
  if (schema_version != 1) throw ConfigError("config: unsupported schema_version");
  if (model != "periodic" && model != "percolation" && model != "visible")
    throw ConfigError("config: model must be periodic, percolation or visible");
  if (d < 1 || d > kMaxDim) throw ConfigError("config: d out of range");
  if (range < 0) throw ConfigError("config: range must be >= 0");
  if (grid_j.empty()) throw ConfigError("config: at least one cube side j required");
  if (grid_m.empty()) throw ConfigError("config: at least one pattern side M required");
  for (auto j : grid_j)
    if (j < 1) throw ConfigError("config: cube sides must be >= 1");
  for (auto m : grid_m)
    if (m < 1) throw ConfigError("config: pattern sides must be >= 1");
  const auto j_min = *std::min_element(grid_j.begin(), grid_j.end());
  for (auto m : grid_m)
    if (m > j_min) throw ConfigError("config: every grid cell needs j >= M");
  if (model == "periodic" && period < 1) throw ConfigError("config: period must be >= 1");
  if (model == "percolation") {
    if (!seed) throw ConfigError("config: percolation requires a seed");
    if (p_closed < 0.0 || p_closed > 1.0)
      throw ConfigError("config: p-closed must lie in [0, 1]");
  }
  if (!nu_ref.empty() && nu_ref != "closed-form" && nu_ref != "largest-j")
    throw ConfigError("config: nu-ref must be closed-form or largest-j");
  if (nu_ref == "closed-form" && model != "periodic")
    throw ConfigError("config: closed-form frequencies exist only for the periodic model");
  if (threshold <= 0.0) throw ConfigError("config: threshold must be positive");
  if (eps <= 0.0) throw ConfigError("config: eps must be positive");
}

std::string ExperimentConfig::nu_ref_mode() const {
  if (!nu_ref.empty()) return nu_ref;
  return model == "periodic" ? "closed-form" : "largest-j";
}

Model build_model(const ExperimentConfig& config) {
  config.validate();
  if (config.model == "periodic") {
    Colouring colouring = config.period == 1 ? make_trivial(config.d)
                                             : make_periodic_coordinates(config.d, config.period);
    return {std::move(colouring), spec_nn_hopping(config.d, config.diagonal)};
  }
  if (config.model == "percolation") {
    Alphabet alphabet({{"open", config.potential_open},
                       {"closed", std::numeric_limits<double>::infinity()}});
    Colouring colouring = make_percolation(config.d, alphabet,
                                           {1.0 - config.p_closed, config.p_closed}, *config.seed);
    OperatorSpec hop = spec_nn_hopping(config.d, config.diagonal);
    auto payload_of = [alphabet](int token) { return alphabet.token(token).payload; };
    return {std::move(colouring), spec_anderson_percolation(hop, payload_of)};
  }
  return {make_visible(config.d), spec_visible_laplacian(config.d)};
}

FrequencyReference build_reference(const ExperimentConfig& config, const Model& model,
                                   std::int64_t side_m) {
  if (config.nu_ref_mode() == "closed-form")
    return closed_form_periodic_reference(model.colouring, config.period, side_m);
  const auto j_max = *std::max_element(config.grid_j.begin(), config.grid_j.end());
  return reference_from_table(empirical_frequencies(
      model.colouring, side_m, Region::box(Box::cube(config.d, j_max))));
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

json model_header(const ExperimentConfig& config, const Model& model) {
  json j;
  j["schema_version"] = config.schema_version;
  j["model"] = config.model;
  j["descriptor"] = model.spec.descriptor + " on " + model.colouring.descriptor();
  j["d"] = config.d;
  j["R"] = overall_range(model.spec);
  j["dimH"] = model.spec.dim_h;
  if (config.seed) j["seed"] = *config.seed;
  if (config.model == "periodic") j["period"] = config.period;
  if (config.model == "percolation") j["p_closed"] = config.p_closed;
  return j;
}

struct GridCell {
  std::int64_t j = 0;
  std::int64_t m = 0;
  double delta = 0.0;
  BoundTerms ergodic_bound;
  double sup_dist = 0.0;
  BoundTerms ids_bound;
  bool ergodic_ok = false;
  bool ids_ok = false;
};

struct GridRun {
  std::vector<std::int64_t> sides_j;
  std::vector<std::int64_t> sides_m;
  std::map<std::int64_t, IdsResult> fv;                  // per j
  std::map<std::int64_t, CountingFunction> pattern;      // per M
  std::map<std::int64_t, FrequencyReference> reference;  // per M
  std::vector<GridCell> cells;                           // row-major over (j, m)
};

// Evaluates the whole (j, M) experiment grid: finite-volume curves once per
// j, pattern approximants once per M, and per-cell distances with both error
// bounds. Cells are independent pure computations and run on a worker pool.
GridRun run_grid(const ExperimentConfig& config, const Model& model) {
  GridRun run;
  run.sides_j = config.grid_j;
  run.sides_m = config.grid_m;
  std::sort(run.sides_j.begin(), run.sides_j.end());
  std::sort(run.sides_m.begin(), run.sides_m.end());

  const std::int64_t r = overall_range(model.spec);
  for (auto m : run.sides_m)
    if (m <= 2 * r)
      throw ConfigError("config: pattern side M=" + std::to_string(m) +
                        " needs M > 2R for a non-empty interior core");

  for (auto m : run.sides_m) run.reference.emplace(m, build_reference(config, model, m));

  std::vector<IdsResult> fv_slots(run.sides_j.size());
  detail::parallel_for(run.sides_j.size(), [&](std::size_t i) {
    fv_slots[i] = finite_volume_ids(model.spec, model.colouring,
                                    Region::box(Box::cube(config.d, run.sides_j[i])));
  });
  for (std::size_t i = 0; i < run.sides_j.size(); ++i)
    run.fv.emplace(run.sides_j[i], std::move(fv_slots[i]));

  std::vector<CountingFunction> pattern_slots(run.sides_m.size());
  detail::parallel_for(run.sides_m.size(), [&](std::size_t i) {
    pattern_slots[i] = pattern_ids(model.spec, model.colouring, run.sides_m[i],
                                   run.reference.at(run.sides_m[i]));
  });
  for (std::size_t i = 0; i < run.sides_m.size(); ++i)
    run.pattern.emplace(run.sides_m[i], std::move(pattern_slots[i]));

  const ErgodicFunction<StepFunctionOps> shell = core_counting_function(model.spec, model.colouring);
  std::vector<CountingFunction> shell_values(run.sides_j.size());
  detail::parallel_for(run.sides_j.size(), [&](std::size_t i) {
    shell_values[i] = shell.evaluate(Region::box(Box::cube(config.d, run.sides_j[i])));
  });

  run.cells.resize(run.sides_j.size() * run.sides_m.size());
  detail::parallel_for(run.cells.size(), [&](std::size_t idx) {
    const std::size_t ji = idx / run.sides_m.size();
    const std::int64_t j = run.sides_j[ji];
    const std::int64_t m = run.sides_m[idx % run.sides_m.size()];
    const Region q = Region::box(Box::cube(config.d, j));
    const FrequencyReference& ref = run.reference.at(m);

    GridCell cell;
    cell.j = j;
    cell.m = m;
    const auto report =
        ergodic_average(shell, model.colouring, q, m, ref, &shell_values[ji]);
    cell.delta = report.delta;
    cell.ergodic_bound = report.bound;
    cell.ergodic_ok = report.certificate_ok;
    cell.sup_dist = sup_distance(run.fv.at(j).ids, run.pattern.at(m));
    cell.ids_bound = ids_bound_terms(model.spec, model.colouring, q, m, ref);
    cell.ids_ok = cell.sup_dist <= cell.ids_bound.total();
    run.cells[idx] = cell;
  });
  return run;
}

json cell_json(const GridCell& cell) {
  json c;
  c["j"] = cell.j;
  c["M"] = cell.m;
  c["delta"] = cell.delta;
  c["bound_terms"] = {cell.ergodic_bound.boundary, cell.ergodic_bound.van_hove,
                      cell.ergodic_bound.deviation};
  c["sup_distance"] = cell.sup_dist;
  c["ids_bound_terms"] = {cell.ids_bound.boundary, cell.ids_bound.deviation, cell.ids_bound.van_hove};
  c["ids_bound"] = cell.ids_bound.total();
  c["certificates"] = {{"ergodic", cell.ergodic_ok ? "pass" : "fail"},
                       {"ids_bound", cell.ids_ok ? "pass" : "fail"}};
  return c;
}

}  // namespace

int cmd_freq(const ExperimentConfig& config) {
  const Model model = build_model(config);
  fs::create_directories(config.out_dir);

  for (auto j : config.grid_j)
    for (auto m : config.grid_m) {
      const Region q = Region::box(Box::cube(config.d, j));
      const FrequencyTable table = empirical_frequencies(model.colouring, m, q);
      const std::string stem = "freq_j" + std::to_string(j) + "_M" + std::to_string(m);

      auto csv = open_out(fs::path(config.out_dir) / (stem + ".csv"));
      csv << "pattern_hex,count,volume,frequency\n";
      for (const auto& [pattern, stats] : table.sorted())
        csv << pattern.hex() << ',' << stats.count << ',' << table.region_volume << ','
            << fmt17(Rational(stats.count, table.region_volume).value()) << '\n';

      json doc = model_header(config, model);
      doc["command"] = "freq";
      doc["M"] = m;
      doc["side_j"] = j;
      doc["volume"] = table.region_volume;
      doc["positions"] = table.positions;
      json entries = json::array();
      for (const auto& [pattern, stats] : table.sorted())
        entries.push_back({{"pattern_hex", pattern.hex()},
                           {"count", stats.count},
                           {"frequency", Rational(stats.count, table.region_volume).value()}});
      doc["entries"] = std::move(entries);
      open_out(fs::path(config.out_dir) / (stem + ".json")) << doc.dump(2) << '\n';
    }
  return 0;
}

int cmd_ids(const ExperimentConfig& config) {
  const Model model = build_model(config);
  const GridRun run = run_grid(config, model);
  fs::create_directories(config.out_dir);

  for (const auto& [j, result] : run.fv) {
    auto csv = open_out(fs::path(config.out_dir) / ("ids_j" + std::to_string(j) + ".csv"));
    result.ids.write_csv(csv);
  }
  for (const auto& [m, curve] : run.pattern) {
    auto csv =
        open_out(fs::path(config.out_dir) / ("pattern_ids_M" + std::to_string(m) + ".csv"));
    curve.write_csv(csv);
  }

  bool all_ok = true;
  json doc = model_header(config, model);
  doc["command"] = "ids";
  doc["nu_ref"] = config.nu_ref_mode();
  json grid = json::array();
  for (const auto& cell : run.cells) {
    grid.push_back(cell_json(cell));
    all_ok = all_ok && cell.ergodic_ok && cell.ids_ok;
  }
  doc["grid"] = std::move(grid);

  // Pattern-side certificate against the best available reference curve,
  // with the reference's own error bound reported alongside.
  const std::int64_t j_ref = run.sides_j.back();
  json pattern_bounds = json::array();
  for (const auto& [m, curve] : run.pattern) {
    const double n2 = pattern_error_bound(model.spec, config.d, m);
    const double slack =
        ids_bound_terms(model.spec, model.colouring, Region::box(Box::cube(config.d, j_ref)), m,
                        run.reference.at(m))
            .total();
    const double dist = sup_distance(run.fv.at(j_ref).ids, curve);
    const bool ok = dist <= n2 + slack;
    all_ok = all_ok && ok;
    pattern_bounds.push_back({{"M", m},
                              {"distance_to_reference", dist},
                              {"n2_bound", n2},
                              {"reference_slack", slack},
                              {"certificate", ok ? "pass" : "fail"}});
  }
  doc["pattern_bounds"] = std::move(pattern_bounds);
  doc["ids_curve_csv_path"] = "ids_j" + std::to_string(j_ref) + ".csv";
  open_out(fs::path(config.out_dir) / "report.json") << doc.dump(2) << '\n';
  return all_ok ? 0 : 2;
}

int cmd_bounds(const ExperimentConfig& config) {
  const Model model = build_model(config);
  const GridRun run = run_grid(config, model);
  fs::create_directories(config.out_dir);

  bool all_ok = true;
  auto csv = open_out(fs::path(config.out_dir) / "bounds.csv");
  csv << "j,M,delta,avg_boundary,avg_van_hove,avg_deviation,avg_total,sup_distance,"
         "ids_boundary,ids_deviation,ids_van_hove,ids_total,ergodic_ok,ids_ok\n";
  for (const auto& cell : run.cells) {
    csv << cell.j << ',' << cell.m << ',' << fmt17(cell.delta) << ','
        << fmt17(cell.ergodic_bound.boundary) << ',' << fmt17(cell.ergodic_bound.van_hove) << ','
        << fmt17(cell.ergodic_bound.deviation) << ',' << fmt17(cell.ergodic_bound.total()) << ','
        << fmt17(cell.sup_dist) << ',' << fmt17(cell.ids_bound.boundary) << ','
        << fmt17(cell.ids_bound.deviation) << ',' << fmt17(cell.ids_bound.van_hove) << ','
        << fmt17(cell.ids_bound.total()) << ',' << (cell.ergodic_ok ? 1 : 0) << ','
        << (cell.ids_ok ? 1 : 0) << '\n';
    all_ok = all_ok && cell.ergodic_ok && cell.ids_ok;
  }

  json doc = model_header(config, model);
  doc["command"] = "bounds";
  doc["nu_ref"] = config.nu_ref_mode();
  json grid = json::array();
  for (const auto& cell : run.cells) grid.push_back(cell_json(cell));
  doc["grid"] = std::move(grid);
  if (config.model == "periodic") {
    json closed = json::array();
    for (const auto& cell : run.cells) {
      const PeriodicBounds pb = periodic_bounds(config.d, overall_range(model.spec),
                                                model.spec.dim_h, cell.j, cell.m);
      closed.push_back(
          {{"j", cell.j}, {"M", cell.m}, {"full", pb.full}, {"pattern", pb.pattern}});
    }
    doc["closed_form_bounds"] = std::move(closed);
  }
  open_out(fs::path(config.out_dir) / "bounds.json") << doc.dump(2) << '\n';
  return all_ok ? 0 : 2;
}

int cmd_jumps(const ExperimentConfig& config) {
  const Model model = build_model(config);
  fs::create_directories(config.out_dir);
  const std::int64_t r = overall_range(model.spec);

  auto csv = open_out(fs::path(config.out_dir) / "jumps.csv");
  csv << "j,location,size,probe_ran,found,residual\n";
  json doc = model_header(config, model);
  doc["command"] = "jumps";
  doc["threshold"] = config.threshold;
  json rows = json::array();

  for (auto j : config.grid_j) {
    const Region q = Region::box(Box::cube(config.d, j));
    const IdsResult fv = finite_volume_ids(model.spec, model.colouring, q);
    double scale = 1.0;
    for (double b : fv.ids.breakpoints()) scale = std::max(scale, std::abs(b));
    const auto found_jumps = jumps(fv.ids, config.threshold, 1e-9 * scale);

    for (const auto& jump : found_jumps) {
      const bool probe_ran = j > 2 * r;
      bool found = false;
      double residual = -1.0;
      if (probe_ran) {
        const auto probe = find_compact_eigenfunction(model.spec, model.colouring,
                                                      jump.location, q, config.eps);
        found = probe.has_value();
        if (probe) residual = probe->residual;
      }
      csv << j << ',' << fmt17(jump.location) << ',' << fmt17(jump.size) << ','
          << (probe_ran ? 1 : 0) << ',' << (found ? 1 : 0) << ',' << fmt17(residual) << '\n';
      rows.push_back({{"j", j},
                      {"location", jump.location},
                      {"size", jump.size},
                      {"probe_ran", probe_ran},
                      {"found", found},
                      {"residual", residual}});
    }
  }
  doc["jumps"] = std::move(rows);
  open_out(fs::path(config.out_dir) / "jumps.json") << doc.dump(2) << '\n';
  return 0;
}

int cmd_converge(const ExperimentConfig& config) {
  const Model model = build_model(config);
  fs::create_directories(config.out_dir);
  const ErgodicFunction<StepFunctionOps> shell =
      core_counting_function(model.spec, model.colouring);

  std::map<std::int64_t, FrequencyReference> reference;
  for (auto m : config.grid_m) reference.emplace(m, build_reference(config, model, m));

  struct Row {
    std::int64_t j, m;
    double delta;
    BoundTerms bound;
    bool ok;
  };
  std::vector<Row> rows(config.grid_j.size() * config.grid_m.size());
  detail::parallel_for(rows.size(), [&](std::size_t idx) {
    const std::int64_t j = config.grid_j[idx / config.grid_m.size()];
    const std::int64_t m = config.grid_m[idx % config.grid_m.size()];
    const auto report = ergodic_average(shell, model.colouring,
                                        Region::box(Box::cube(config.d, j)), m,
                                        reference.at(m));
    rows[idx] = {j, m, report.delta, report.bound, report.certificate_ok};
  });

  bool all_ok = true;
  auto csv = open_out(fs::path(config.out_dir) / "converge.csv");
  csv << "j,M,delta,boundary,van_hove,deviation,total,certificate\n";
  for (const auto& row : rows) {
    csv << row.j << ',' << row.m << ',' << fmt17(row.delta) << ',' << fmt17(row.bound.boundary)
        << ',' << fmt17(row.bound.van_hove) << ',' << fmt17(row.bound.deviation) << ','
        << fmt17(row.bound.total()) << ',' << (row.ok ? 1 : 0) << '\n';
    all_ok = all_ok && row.ok;
  }

  json doc = model_header(config, model);
  doc["command"] = "converge";
  doc["nu_ref"] = config.nu_ref_mode();
  json grid = json::array();
  for (const auto& row : rows)
    grid.push_back({{"j", row.j},
                    {"M", row.m},
                    {"delta", row.delta},
                    {"bound_terms", {row.bound.boundary, row.bound.van_hove, row.bound.deviation}},
                    {"certificate", row.ok ? "pass" : "fail"}});
  doc["grid"] = std::move(grid);
  open_out(fs::path(config.out_dir) / "converge.json") << doc.dump(2) << '\n';
  return all_ok ? 0 : 2;
}

}  // namespace latids
