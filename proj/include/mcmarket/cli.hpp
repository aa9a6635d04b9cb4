#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcmarket/dynamics.hpp"

namespace mcmarket::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Runs one subcommand (calibrate, solve, classify, simulate, sweep).
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& content);

std::string trajectory_csv(const Trajectory& trajectory);
std::string path_summary_csv(const Trajectory& trajectory);
/// price,demand,supply on `points` prices from the cost floor to n*c at time t.
std::string curves_csv(const ModelParams& params, double t, int points = 201);
std::string sweep_csv(const std::string& name, const std::vector<SweepRow>& rows);

}  // namespace mcmarket::cli
