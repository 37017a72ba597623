#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace shellhier::cli {

/// One two-column plot-data file.
struct Plot {
  std::string name;  ///< file name inside the output directory
  std::vector<double> x, y;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Report {
  nlohmann::json config_echo;  ///< null until the config is resolved
  nlohmann::json results = nlohmann::json::object();
  std::vector<Table> tables;  ///< first table goes to data.csv, later ones to data_<k>.csv
  std::vector<Plot> plots;
};

/// Writes config.resolved.json, report.json, the CSV tables and plot files.
/// Output bytes depend only on the report contents. Throws IoError.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir);

/// Full command line, argv[0] included. Returns the process exit code:
/// 0 success, 1 usage or validation error, 2 solver failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace shellhier::cli
