#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "corrwit/parallel.hpp"
#include "corrwit/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Correlation-based witnesses of non-Markovian qubit dynamics"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  int threads = 1;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run the scenario described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--output", output_dir, "Directory for the CSV output (default: current directory)");
  run->add_option("--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  run->add_flag("--verbose", verbose, "Print a summary to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  corrwit::set_default_threads(threads);
  try {
    const auto config = corrwit::load_config(config_path);
    std::filesystem::path out = config.output;
    if (!output_dir.empty()) {
      std::filesystem::create_directories(output_dir);
      out = std::filesystem::path(output_dir) / out;
    }
    if (verbose) std::cerr << "scenario " << config.scenario << " -> " << out.string() << "\n";

    const auto result = corrwit::run_scenario(config);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << out.string() << "\n";
      return 1;
    }
    f << result.csv;
    f.close();

    if (verbose) std::cerr << result.summary << "\n";
    if (result.consistency_violation) {
      std::cerr << "CONSISTENCY VIOLATION: " << result.summary << "\n";
      return 3;
    }
    return 0;
  } catch (const corrwit::Error& e) {
    const int code = corrwit::exit_code_for(e);
    std::cerr << (code == 3 ? "CONSISTENCY VIOLATION: " : "error: ") << corrwit::to_string(e.kind()) << ": "
              << e.what() << "\n";
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
