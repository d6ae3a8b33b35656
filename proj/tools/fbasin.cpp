#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbasin/cli.hpp"
#include "fbasin/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Normal forms, order bounds and basins of attracting polynomial automorphism sequences"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string grid;
  int q = 0, p = 0, j_max = 0, threads = 0;
  std::uint64_t seed = 0;
  bool pgm = false;

  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  auto* q_opt = app.add_option("--q", q, "Order of agreement q");
  auto* p_opt = app.add_option("--p", p, "Degree p (defaults to the minimal p with r^p < s)");
  auto* jmax_opt = app.add_option("--jmax", j_max, "Iteration limit for basin, psi and verify");
  auto* grid_opt = app.add_option("--grid", grid, "Grid resolution WxH");
  auto* threads_opt = app.add_option("--threads", threads, "OpenMP thread count");
  auto* seed_opt = app.add_option("--seed", seed, "Perturbation seed override");
  app.add_flag("--pgm", pgm, "Also write basin.pgm");

  for (const auto& [name, help] : {std::pair{"normal-form", "Normal form report (normal_form.json)"},
                                   std::pair{"q-bound", "Order bounds report (q_bound.json)"},
                                   std::pair{"verify", "Hypothesis checks (verify.json)"},
                                   std::pair{"psi", "Convergence table (psi.csv, psi_summary.json)"},
                                   std::pair{"basin", "Grid classification (basin.csv, basin.pgm)"}})
    app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    fbasin::RunFlags flags;
    if (q_opt->count()) flags.q = q;
    if (p_opt->count()) flags.p = p;
    if (jmax_opt->count()) flags.j_max = j_max;
    if (grid_opt->count()) flags.grid = fbasin::parse_grid_size(grid);
    if (threads_opt->count()) flags.threads = threads;
    if (seed_opt->count()) flags.seed = seed;
    if (out_opt->count()) flags.out_dir = out_dir;
    flags.pgm = pgm;

    const auto written = fbasin::run(subcommand, fbasin::parse_scenario(scenario_path), flags);
    fbasin::Json done = {{"status", "ok"}, {"subcommand", subcommand}, {"files", fbasin::Json::array()}};
    for (const auto& path : written) done["files"].push_back(path.string());
    std::cout << done.dump() << '\n';
  } catch (const fbasin::Error& e) {
    std::cerr << fbasin::error_json(fbasin::to_string(e.kind()), e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << fbasin::error_json("internal", e.what()) << '\n';
    return 1;
  }
  return 0;
}
