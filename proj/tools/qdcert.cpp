//
// qdcert: run a certification scenario and print the report.
// Exit status: 0 all checks passed, 1 some check failed, 2 the run errored.
//

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "quasidiag/report.hpp"
#include "quasidiag/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "quantitative certificates for finite-dimensional approximations of "
      "compact group translations and isometric actions"};
  std::string scenario_path;
  std::string format = "human";
  std::string out_path;
  int max_dim_override = 0;

  app.add_option("-s,--scenario", scenario_path, "scenario file to run")->required();
  app.add_option("-f,--format", format, "report format")
      ->check(CLI::IsMember({"human", "json", "csv"}));
  app.add_option("-o,--out", out_path, "write the report to this file instead of stdout");
  app.add_option("--max-dim", max_dim_override,
                 "override the scenario's matrix dimension cap");

  CLI11_PARSE(app, argc, argv);

  qd::Report rep;
  try {
    qd::Scenario sc = qd::load_scenario(scenario_path);
    if (max_dim_override > 0) sc.max_dim = max_dim_override;
    rep = qd::run(sc);
  } catch (const qd::Error& e) {
    rep.errors.push_back({e.code(), e.what()});
  } catch (const std::exception& e) {
    rep.errors.push_back({"internal", e.what()});
  }

  const std::string text = qd::emit(rep, format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  return qd::exit_code(rep);
}
