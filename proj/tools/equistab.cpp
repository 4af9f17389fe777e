// equistab: energy-method stability certificates from the command line.
//
//   equistab list-systems [--export DIR]
//   equistab validate --system NAME|PATH [--json PATH]
//   equistab analyze  --system NAME|PATH --equilibrium NAME [--pivot all|N]
//                     [--method arnold|ec|or|all] [--lambda L ...] [--no-probe]
//                     [probe flags] [--json PATH]
//   equistab probe    --system NAME|PATH --equilibrium NAME [probe flags] [--json PATH]
//
// Exit codes: 0 stable certificate, 2 indecisive, 3 inconsistent verdicts,
// 1 error. EQUISTAB_SEED provides the default --seed.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "equistab/registry.hpp"
#include "equistab/report.hpp"

namespace {

using equistab::app::CommandResult;

struct ProbeFlags {
  std::uint64_t seed = 0;
  double step = 1e-2;
  double horizon = 50.0;
  double delta = 1e-2;
  double epsilon = 0.3;
  std::size_t samples = 200;

  equistab::dynamics::ProbeSettings settings() const {
    equistab::dynamics::ProbeSettings s;
    s.seed = seed;
    s.integrator.step = step;
    s.integrator.horizon = horizon;
    s.delta = delta;
    s.epsilon = epsilon;
    s.samples = samples;
    return s;
  }
};

void add_probe_flags(CLI::App* cmd, ProbeFlags& f) {
  cmd->add_option("--seed", f.seed, "Probe RNG seed (default: $EQUISTAB_SEED or 0)");
  cmd->add_option("--step", f.step, "RK4 step size")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "Integration horizon T")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", f.delta, "Perturbation radius")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", f.epsilon, "Escape radius")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", f.samples, "Number of sampled initial conditions");
}

int emit(const CommandResult& result, const std::string& json_path) {
  std::cout << equistab::app::render_text(result.report);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) {
      std::cerr << "error: cannot write " << json_path << "\n";
      return equistab::app::kExitError;
    }
    out << result.report.dump(2) << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-method stability certificates for ODE equilibria"};
  app.require_subcommand(1);

  std::string system;
  std::string equilibrium;
  std::string json_path;
  std::string pivot = "all";
  std::string method = "all";
  std::vector<double> lambdas;
  bool no_probe = false;
  std::string export_dir;
  ProbeFlags probe_flags;
  if (const char* env = std::getenv("EQUISTAB_SEED")) {
    try {
      probe_flags.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: EQUISTAB_SEED is not an unsigned integer: " << env << "\n";
      return equistab::app::kExitError;
    }
  }

  auto* list_cmd = app.add_subcommand("list-systems", "List built-in systems");
  list_cmd->add_option("--export", export_dir, "Write each built-in system as DIR/<name>.json");
  list_cmd->add_option("--json", json_path, "Write the report as JSON");

  auto* validate_cmd = app.add_subcommand("validate", "Check constants of motion and equilibria of a system");
  validate_cmd->add_option("--system", system, "Built-in name or system JSON file")->required();
  validate_cmd->add_option("--json", json_path, "Write the report as JSON");

  auto* analyze_cmd = app.add_subcommand("analyze", "Run the energy methods at an equilibrium");
  analyze_cmd->add_option("--system", system, "Built-in name or system JSON file")->required();
  analyze_cmd->add_option("--equilibrium", equilibrium, "Equilibrium name")->required();
  analyze_cmd->add_option("--pivot", pivot, "Pivot constant index (1-based) or 'all'");
  analyze_cmd->add_option("--method", method, "arnold, ec, or, or all")
      ->check(CLI::IsMember({"arnold", "ec", "or", "all"}));
  analyze_cmd->add_option("--lambda", lambdas, "Override the multipliers (needs --pivot)");
  analyze_cmd->add_flag("--no-probe", no_probe, "Skip the trajectory probe");
  analyze_cmd->add_option("--json", json_path, "Write the report as JSON");
  add_probe_flags(analyze_cmd, probe_flags);

  auto* probe_cmd = app.add_subcommand("probe", "Sample trajectories near an equilibrium");
  probe_cmd->add_option("--system", system, "Built-in name or system JSON file")->required();
  probe_cmd->add_option("--equilibrium", equilibrium, "Equilibrium name")->required();
  probe_cmd->add_option("--json", json_path, "Write the report as JSON");
  add_probe_flags(probe_cmd, probe_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : equistab::app::kExitError;
  }

  try {
    if (list_cmd->parsed()) {
      if (!export_dir.empty()) {
        std::filesystem::create_directories(export_dir);
        for (const auto& name : equistab::app::builtin_system_names()) {
          const auto path = std::filesystem::path(export_dir) / (name + ".json");
          equistab::app::save_system(*equistab::app::find_builtin(name), path);
        }
      }
      return emit(equistab::app::list_systems(), json_path);
    }

    if (validate_cmd->parsed()) {
      const auto def = equistab::app::find_builtin(system) ? *equistab::app::find_builtin(system)
                                                           : equistab::app::read_system(system);
      return emit(equistab::app::validate(def), json_path);
    }

    const auto def = equistab::app::resolve_system(system);

    if (analyze_cmd->parsed()) {
      equistab::app::AnalyzeOptions opts;
      opts.equilibrium = equilibrium;
      if (pivot != "all") {
        std::size_t pos = 0;
        const unsigned long p = std::stoul(pivot, &pos);
        if (pos != pivot.size() || p == 0) throw std::invalid_argument("--pivot must be 'all' or a positive integer");
        opts.pivot = p;
      }
      if (method != "all") opts.methods = {*equistab::app::parse_method(method)};
      if (!lambdas.empty()) opts.multiplier_override = lambdas;
      opts.run_probe = !no_probe;
      opts.probe = probe_flags.settings();
      return emit(equistab::app::analyze(def, opts), json_path);
    }

    if (probe_cmd->parsed()) {
      return emit(equistab::app::probe(def, equilibrium, probe_flags.settings()), json_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return equistab::app::kExitError;
  }
  return equistab::app::kExitError;
}
