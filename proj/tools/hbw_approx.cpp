// Command-line front end: runs a method sweep over one or more images and
// writes a CSV/JSON report.
#include <iostream>

#include "hbw/error.hpp"
#include "hbw/experiment.hpp"

int main(int argc, char** argv) {
  std::optional<hbw::ExperimentConfig> config;
  try {
    config = hbw::parse_args(argc, argv, std::cout);
  } catch (const hbw::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n(run with --help for options)\n";
    return hbw::kExitUsage;
  }
  if (!config) return hbw::kExitSuccess;

  try {
    const auto rows = hbw::run_experiment(*config);
    if (!config->out) {
      if (config->format == hbw::ReportFormat::json) {
        hbw::write_json(std::cout, rows);
      } else {
        hbw::write_csv(std::cout, rows);
      }
    }
    for (const auto& row : rows)
      for (const auto& w : row.warnings) std::cerr << "warning: " << row.image << " " << row.method << ": " << w << '\n';
  } catch (const hbw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hbw::kExitData;
  }
  return hbw::kExitSuccess;
}
