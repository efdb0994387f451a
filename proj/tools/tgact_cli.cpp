// tgact: run verification commands against a JSON workspace.

#include "tgact/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Affine tangent-group actions: verification runner"};
  std::string command, config, field = "real", json_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
  bool quiet = false;

  app.add_option("command", command, "validate | hom | classify | kgroup | adjoint-check | monad-check | "
                                     "manifold-verify | all")
      ->required();
  app.add_option("config", config, "workspace JSON document")->required();
  app.add_option("--seed", seed, "base seed (overrides the config)");
  app.add_option("--samples", samples, "sample count for sampled checks")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "matrix tolerance")->check(CLI::PositiveNumber);
  app.add_option("--field", field, "scalar field")->check(CLI::IsMember({"real", "complex"}));
  app.add_option("--json", json_path, "write the JSON report to this path");
  app.add_flag("--quiet", quiet, "print failures and the summary line only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : tgact::exit_config;
  }

  tgact::RunOptions opts;
  opts.field = field;
  opts.load.seed = seed;
  opts.load.samples = samples;
  opts.load.tolerance = tol;

  auto result = tgact::run_file(command, config, opts);
  std::cout << result.report.summary(quiet);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) {
      std::cerr << "cannot write report to " << json_path << "\n";
      return tgact::exit_config;
    }
    out << result.report.to_json().dump(2) << "\n";
  }
  return result.exit_code;
}
