#include <iostream>

#include <CLI11.hpp>

#include "got/commands.hpp"
#include "got/io.hpp"

namespace {

void add_data_flags(CLI::App* cmd, got::CommandOptions& o) {
  cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)")->required();
  cmd->add_option("--alpha-bound", o.alpha_bound, "Coefficient box half-width");
  cmd->add_option("--grid-size", o.grid_size, "Wasserstein quantile grid size");
  cmd->add_option("--seed", o.seed, "Seed for grid subsampling");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--output-dir", o.output_dir, "Directory for output files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic optimal transport regression"};
  app.set_version_flag("--version", std::string(got::library_version));
  app.require_subcommand(1);

  got::CommandOptions fit_opts, predict_opts, loo_opts;
  got::SimulateOptions sim_opts;
  got::LifetableOptions life_opts;
  got::GhcndOptions ghcnd_opts;

  auto* fit = app.add_subcommand("fit", "Fit a model and write model.json");
  add_data_flags(fit, fit_opts);

  auto* predict = app.add_subcommand("predict", "Predict responses for the manifest's predictors");
  add_data_flags(predict, predict_opts);
  predict->add_option("--model", predict_opts.model, "Fitted model document")->required();

  auto* loo = app.add_subcommand("loo", "Leave-one-out prediction errors");
  add_data_flags(loo, loo_opts);
  loo->add_option("--method", loo_opts.method, "got, nw or both")
      ->check(CLI::IsMember({"got", "nw", "both"}));
  loo->add_option("--tau", loo_opts.tau, "Fixed kernel bandwidth for nw (default: median heuristic)");
  loo->add_option("--nw-predictor", loo_opts.nw_predictor, "Predictor (1-based) used by nw");

  auto* sim = app.add_subcommand("simulate", "Run a simulation experiment");
  sim->add_option("--scenario", sim_opts.scenario, "theorem1, theorem2, dominance or recovery")
      ->check(CLI::IsMember({"theorem1", "theorem2", "dominance", "recovery"}));
  sim->add_option("--space", sim_opts.space, "wasserstein, euclidean, sphere or spd")
      ->check(CLI::IsMember({"wasserstein", "euclidean", "sphere", "spd"}));
  sim->add_option("--replications", sim_opts.replications, "Number of replications");
  sim->add_option("--n", sim_opts.n, "Sample size (theorem2: the larger size)");
  sim->add_option("--sigma", sim_opts.sigma, "Perturbation amplitude");
  sim->add_option("--alpha-bound", sim_opts.alpha_bound, "Coefficient box half-width");
  sim->add_option("--seed", sim_opts.seed, "Master seed");
  sim->add_option("--threads", sim_opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--output-dir", sim_opts.output_dir, "Directory for output files");

  auto* life = app.add_subcommand("convert-lifetable", "HMD period lifetables to quantile rows");
  life->add_option("inputs", life_opts.inputs, "Lifetable files, one per country")->required();
  life->add_option("--year", life_opts.year, "Calendar year to extract")->required();
  life->add_option("--grid-size", life_opts.grid_size, "Quantile grid size");
  life->add_option("--max-age", life_opts.max_age, "Upper end of the open age interval");
  life->add_option("--output", life_opts.output, "Output CSV")->required();

  auto* ghcnd = app.add_subcommand("convert-ghcnd", "GHCN-Daily exports to 2-D density rows");
  ghcnd->add_option("inputs", ghcnd_opts.inputs, "CSV exports")->required();
  ghcnd->add_option("--year", ghcnd_opts.year, "Calendar year to extract")->required();
  ghcnd->add_option("--nx", ghcnd_opts.nx, "Grid cells along TMIN");
  ghcnd->add_option("--ny", ghcnd_opts.ny, "Grid cells along TMAX");
  ghcnd->add_option("--bounds", ghcnd_opts.bounds, "tmin_lo tmin_hi tmax_lo tmax_hi");
  ghcnd->add_option("--first-month", ghcnd_opts.first_month, "First month (inclusive)");
  ghcnd->add_option("--last-month", ghcnd_opts.last_month, "Last month (inclusive)");
  ghcnd->add_option("--scale", ghcnd_opts.scale, "Multiplier for raw readings");
  ghcnd->add_option("--output", ghcnd_opts.output, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(got::ExitCode::usage);
  }

  try {
    if (*fit) got::cmd_fit(fit_opts, std::cout);
    else if (*predict) got::cmd_predict(predict_opts, std::cout);
    else if (*loo) got::cmd_loo(loo_opts, std::cout);
    else if (*sim) got::cmd_simulate(sim_opts, std::cout);
    else if (*life) got::cmd_convert_lifetable(life_opts, std::cout);
    else if (*ghcnd) got::cmd_convert_ghcnd(ghcnd_opts, std::cout);
  } catch (const got::Error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
