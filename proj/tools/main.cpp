#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "report.hpp"

namespace {

void add_common(CLI::App* cmd, psa::cli::RunConfig& config, std::vector<std::string>& params) {
  cmd->add_option("--function", config.function_id, "Function id: one, log, recip, log_over_t, power, power_log, exp2");
  cmd->add_option("--param", params, "Family parameter, m=<v> or k=<v>; repeatable");
  cmd->add_option("--grid", config.grid_spec, "Grid a:b:gN (geometric) or a,b,c (explicit)");
  cmd->add_option("--c", config.c, "Exponent constant of the pnt model");
  cmd->add_option("--c1", config.c1, "Constant of the crude product bound");
  cmd->add_option("--c2", config.c2, "Constant of the rh product bound");
  cmd->add_option("--epsilon", config.epsilon, "Exponent slack of the rh product bound");
  cmd->add_option("--theta", config.theta, "Exponent on log n in the pnt model");
  cmd->add_option("--abel-tol", config.abel_tol, "Relative tolerance of the Abel identity check");
  cmd->add_option("--parts-tol", config.parts_tol, "Relative tolerance of the integration-by-parts check");
  cmd->add_option("--format", config.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, psa::cli::Format>{{"csv", psa::cli::Format::csv}, {"json", psa::cli::Format::json}}));
  cmd->add_option("--out", config.out_path, "Write output to this path instead of stdout");
  cmd->add_option("--jobs", config.jobs, "Worker threads for independent grid rows")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sums of functions over primes: exact values, asymptotic estimates and convergence conditions"};
  app.require_subcommand(1);

  psa::cli::RunConfig config;
  std::vector<std::string> params;
  for (const auto* name : {"table", "conditions", "product-bound", "verify"}) {
    const char* help = "";
    if (std::string_view(name) == "table") help = "Exact sums against crude, pnt and rh estimates over a grid";
    if (std::string_view(name) == "conditions") help = "Sufficient and necessary convergence conditions";
    if (std::string_view(name) == "product-bound") help = "log of the prime product against its upper bounds";
    if (std::string_view(name) == "verify") help = "Abel and integration-by-parts identity checks";
    add_common(app.add_subcommand(name, help), config, params);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : psa::cli::kExitUsage;
  }

  try {
    config.command = app.get_subcommands().front()->get_name();
    for (const auto& p : params) {
      const auto [name, value] = psa::cli::parse_param(p);
      (name == "m" ? config.m : config.k) = value;
    }
    if (!config.grid_spec.empty()) config.grid = psa::cli::parse_grid(config.grid_spec);

    const auto output = psa::cli::run(config);
    if (config.out_path.empty()) {
      std::fwrite(output.text.data(), 1, output.text.size(), stdout);
    } else {
      std::ofstream out(config.out_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "error: cannot write " << config.out_path << "\n";
        return psa::cli::kExitResource;
      }
      out << output.text;
    }
    return output.exit_code;
  } catch (const psa::cli::RunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
}
