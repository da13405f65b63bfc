#include "perc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "perc/bounds.hpp"
#include "perc/couplings.hpp"
#include "perc/explore.hpp"
#include "perc/io.hpp"
#include "perc/union_find.hpp"

namespace perc {
namespace cli {

namespace {

constexpr uint64_t kDefaultSeed = 12345;

uint64_t default_seed() {
  if (const char* env = std::getenv("PERC_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<uint64_t>(v);
  }
  return kDefaultSeed;
}

void write_output(const std::string& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload << "\n";
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
  f << payload << "\n";
  out << "wrote " << out_path << "\n";
}

bounds::BoundResult bound_with_method(const ModelSpec& family, int d, const std::string& method) {
  using bounds::BoundResult;
  if (method.empty() || method == "best") return bounds::best_bound(family, d);
  if (method == "registry") return bounds::registry_bound(family, d);
  if (method == "thm1") {
    if (family.kind != Kind::bond || family.oriented())
      throw std::invalid_argument("thm1 applies to the non-oriented bond family");
    return bounds::theorem1_bound(d);
  }
  if (method == "thm2.1" || method == "thm3.1" || method == "thm4.1")
    return bounds::folded_even_bound(d, bounds::registry_constant(family, 2));
  if (method == "thm3.2") {
    if (family != site_model(family.d))
      throw std::invalid_argument("thm3.2 applies to the non-oriented site family");
    return bounds::folded_div3_site_bound(d);
  }
  if (method == "thm2.2") {
    if (family.kind != Kind::bond || !family.oriented())
      throw std::invalid_argument("thm2.2 applies to the oriented bond family");
    return bounds::oriented_bond_highdim_bound(d);
  }
  if (method == "thm2.3" || method == "thm3.3" || method == "thm4.2") {
    BoundResult base = d - 1 == 2 ? bounds::registry_bound(family, 2)
                                  : bounds::best_bound(family, d - 1);
    double alpha = (family.kind == Kind::site && !family.oriented())
                       ? (2.0 * (d - 1)) / (2.0 * (d - 1) - 1.0)
                       : static_cast<double>(d) / (d - 1);
    return bounds::crossover_bound(base, alpha);
  }
  throw std::invalid_argument("unknown method: " + method);
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw std::invalid_argument("empty p grid");
  return grid;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"percolation upper-bound toolkit"};
  app.require_subcommand(1);

  // --- bounds ---------------------------------------------------------
  auto* cmd_bounds = app.add_subcommand("bounds", "compute an upper bound for one model");
  std::string family_name_arg = "bond", method_arg, out_path;
  int dim = 3;
  cmd_bounds->add_option("--family", family_name_arg, "bond | oriented-bond | site | oriented-site");
  cmd_bounds->add_option("--d", dim, "dimension")->required();
  cmd_bounds->add_option("--method", method_arg, "method override (thm1, thm2.1, ..., registry)");
  cmd_bounds->add_option("--out", out_path, "write JSON here instead of stdout");

  // --- table ----------------------------------------------------------
  auto* cmd_table = app.add_subcommand("table", "tabulate the four families over a dimension range");
  int dmin = 3, dmax = 9;
  std::string table_format = "csv";
  std::string table_out;
  cmd_table->add_option("--dmin", dmin, "first dimension (>= 3)");
  cmd_table->add_option("--dmax", dmax, "last dimension (<= 64)");
  cmd_table->add_option("--format", table_format, "csv | json");
  cmd_table->add_option("--out", table_out, "output file");

  // --- simulate -------------------------------------------------------
  auto* cmd_sim = app.add_subcommand("simulate", "finite-box Monte Carlo");
  std::string sim_mode = "survival", sim_family = "bond", sim_format = "json", sim_out, sim_grid;
  int sim_d = 3, sim_L = 20, sim_steps = 0;
  double sim_p = 0.5, sim_pmin = 0.0, sim_pmax = 1.0;
  int64_t sim_replicas = 1000;
  uint64_t sim_seed = default_seed();
  cmd_sim->add_option("--mode", sim_mode, "survival | sweep");
  cmd_sim->add_option("--family", sim_family, "model family");
  cmd_sim->add_option("--d", sim_d, "dimension");
  cmd_sim->add_option("--p", sim_p, "open probability (survival)");
  cmd_sim->add_option("--p-grid", sim_grid, "comma-separated p values (sweep)");
  cmd_sim->add_option("--p-min", sim_pmin, "sweep grid start");
  cmd_sim->add_option("--p-max", sim_pmax, "sweep grid end");
  cmd_sim->add_option("--p-steps", sim_steps, "sweep grid point count");
  cmd_sim->add_option("--L", sim_L, "box radius");
  cmd_sim->add_option("--replicas", sim_replicas, "replica count");
  cmd_sim->add_option("--seed", sim_seed, "master seed (env PERC_SEED)");
  cmd_sim->add_option("--format", sim_format, "json | csv");
  cmd_sim->add_option("--out", sim_out, "output file");

  // --- couple ---------------------------------------------------------
  auto* cmd_couple = app.add_subcommand("couple", "run a coupling and validate it");
  std::string couple_kind = "triangular", couple_trace, couple_out;
  int couple_d = 3, couple_k = 1;
  double couple_p = 0.5, couple_p1 = 0.5, couple_p2 = 0.5, couple_p3 = 0.5;
  bool couple_oriented = false;
  int64_t couple_replicas = 2000, couple_trace_replicas = 1, couple_cal_samples = 100000;
  int64_t couple_step_cap = 1000;
  uint64_t couple_seed = default_seed();
  std::string couple_grid = "2,5,10,25,50";
  cmd_couple->add_option("--kind", couple_kind, "triangular | edge-split | vertex-split | fold");
  cmd_couple->add_option("--d", couple_d, "source dimension");
  cmd_couple->add_option("--k", couple_k, "fold target dimension");
  cmd_couple->add_option("--p", couple_p, "parameter (edge-split / vertex-split / fold)");
  cmd_couple->add_option("--p1", couple_p1, "triangular parameter, direction (1,0)");
  cmd_couple->add_option("--p2", couple_p2, "triangular parameter, direction (0,1)");
  cmd_couple->add_option("--p3", couple_p3, "triangular parameter, direction (1,1)");
  cmd_couple->add_flag("--oriented", couple_oriented, "oriented fold variant");
  cmd_couple->add_option("--replicas", couple_replicas, "validation replicas per side");
  cmd_couple->add_option("--step-cap", couple_step_cap, "resolutions per replica");
  cmd_couple->add_option("--seed", couple_seed, "master seed (env PERC_SEED)");
  cmd_couple->add_option("--trace", couple_trace, "write JSON-lines step traces here");
  cmd_couple->add_option("--trace-replicas", couple_trace_replicas, "replicas to trace");
  cmd_couple->add_option("--calibration-samples", couple_cal_samples, "event calibration sample count");
  cmd_couple->add_option("--size-grid", couple_grid, "tail thresholds for the distributional test");
  cmd_couple->add_option("--out", couple_out, "write the validation report here");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  app.parse(argv);

  if (cmd_bounds->parsed()) {
    if (dim < 2) throw std::invalid_argument("bounds: d must be >= 2");
    ModelSpec family = parse_family(family_name_arg, dim);
    if (method_arg.empty() && dim < 3) throw std::invalid_argument("bounds: d must be >= 3");
    bounds::BoundResult r = bound_with_method(family, dim, method_arg);
    write_output(io::bound_result_json(r), out_path, out);
    return 0;
  }

  if (cmd_table->parsed()) {
    if (dmin < 3 || dmax < dmin || dmax > 64)
      throw std::invalid_argument("table: need 3 <= dmin <= dmax <= 64");
    auto rows = bounds::generate_table(dmin, dmax);
    if (table_format == "csv") write_output(io::table_csv(rows), table_out, out);
    else if (table_format == "json") write_output(io::table_json(rows), table_out, out);
    else throw std::invalid_argument("table: unknown format " + table_format);
    return 0;
  }

  if (cmd_sim->parsed()) {
    ModelSpec model = parse_family(sim_family, sim_d);
    if (sim_mode == "survival") {
      mc::SurvivalEstimate est = mc::survival_proxy(model, sim_p, sim_L, sim_replicas, sim_seed);
      std::string payload = sim_format == "csv" ? io::survival_csv(est)
                                                : io::survival_json(model, est, sim_seed);
      write_output(payload, sim_out, out);
      err << "survival " << family_name(model) << " d=" << model.d << " p=" << sim_p
          << " estimate=" << est.estimate << " [" << est.ci_low << "," << est.ci_high << "]\n";
      return 0;
    }
    if (sim_mode == "sweep") {
      std::vector<double> grid;
      if (!sim_grid.empty()) grid = parse_grid(sim_grid);
      else {
        if (sim_steps < 2) throw std::invalid_argument("sweep: need --p-grid or --p-steps >= 2");
        for (int i = 0; i < sim_steps; ++i)
          grid.push_back(sim_pmin + (sim_pmax - sim_pmin) * i / (sim_steps - 1));
      }
      mc::SweepCurve curve = mc::union_find_sweep(model, sim_L, grid, sim_replicas, sim_seed);
      std::string payload = sim_format == "csv" ? io::sweep_csv(curve)
                                                : io::sweep_json(model, curve, sim_seed);
      write_output(payload, sim_out, out);
      return 0;
    }
    throw std::invalid_argument("simulate: unknown mode " + sim_mode);
  }

  if (cmd_couple->parsed()) {
    couplings::CouplingParams params;
    params.kind = couplings::parse_coupling_kind(couple_kind);
    params.d = couple_d;
    params.k = couple_k;
    params.p = couple_p;
    params.p1 = couple_p1;
    params.p2 = couple_p2;
    params.p3 = couple_p3;
    params.orientation = couple_oriented ? Orientation::oriented : Orientation::non_oriented;

    // step traces
    if (!couple_trace.empty()) {
      std::ofstream tf(couple_trace, std::ios::binary);
      if (!tf) throw std::invalid_argument("cannot open trace file: " + couple_trace);
      couplings::CouplingOptions topts;
      topts.step_cap = couple_step_cap;
      topts.keep_log = true;
      topts.compute_image_cluster = true;
      for (int64_t r = 0; r < couple_trace_replicas; ++r) {
        couplings::CouplingTrace trace;
        switch (params.kind) {
          case couplings::CouplingKindId::triangular:
            trace = couplings::run_triangular_coupling(params.p1, params.p2, params.p3, topts,
                                                       couple_seed, static_cast<uint64_t>(r));
            break;
          case couplings::CouplingKindId::edge_split:
            trace = couplings::run_oriented_edge_split_coupling(params.d, params.p, topts,
                                                                couple_seed, static_cast<uint64_t>(r));
            break;
          case couplings::CouplingKindId::vertex_split:
            trace = couplings::run_site_vertex_split_coupling(params.d, params.p, topts,
                                                              couple_seed, static_cast<uint64_t>(r));
            break;
          case couplings::CouplingKindId::fold:
            trace = couplings::run_dimension_fold_coupling(params.d, params.k, params.p,
                                                           params.orientation, topts, couple_seed,
                                                           static_cast<uint64_t>(r));
            break;
        }
        for (const auto& rec : trace.log) tf << io::step_record_jsonl(rec) << "\n";
      }
    }

    // validation
    std::vector<int64_t> size_grid;
    for (double v : parse_grid(couple_grid)) size_grid.push_back(static_cast<int64_t>(v));
    couplings::DominationReport report = couplings::validate_domination(
        params, couple_replicas, size_grid, couple_step_cap, couple_seed);
    std::vector<couplings::CalibrationResult> calibrations;
    if (params.kind != couplings::CouplingKindId::triangular)
      calibrations.push_back(couplings::calibrate_event(params, couple_cal_samples, couple_seed));
    std::string payload = io::domination_report_json(params, report, calibrations, couple_seed);
    write_output(payload, couple_out, out);
    bool cal_ok = true;
    for (const auto& c : calibrations) cal_ok = cal_ok && c.pass;
    return (report.pass && cal_ok) ? 0 : 3;
  }

  err << "no subcommand\n";
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const CLI::CallForHelp&) {
    out << "usage: perc <bounds|table|simulate|couple> [options]\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cli
}  // namespace perc
