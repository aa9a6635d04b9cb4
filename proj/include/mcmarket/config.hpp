#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mcmarket/dynamics.hpp"

namespace mcmarket {

/// INI-style run configuration:
///
///   # comment
///   [market]   v n c delta_c beta psi mu alpha r_m [F0 g0]
///   [anchors]  served0 price0
///   [dynamics] mode horizon dt t
///   [sweep]    vary = name=lo:hi:step
///   [io]       out fig2 fig3
///
/// Normalizations resolve in order: served0 + price0 anchor both; price0 with
/// g0 anchors F0 only; otherwise F0 and g0 must be given.
struct RunConfig {
  std::map<std::string, double> market;
  std::optional<double> served0;
  std::optional<double> price0;
  SlopeMode mode = SlopeMode::capacity;
  double horizon = 10.0;
  double dt = 0.01;
  double solve_t = 0.0;
  std::string vary;
  std::map<std::string, std::string> io;

  /// Throws DataError (with line numbers) for unreadable files, syntax errors and unknown keys.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");

  /// Applies one `key = value` under `section`; `line` is used in error messages.
  void set(const std::string& section, const std::string& key, const std::string& value,
           long line = -1);

  MarketConstants constants() const;
  ModelParams params() const;
  ScenarioConfig scenario() const;

  std::string io_path(const std::string& key) const;
};

/// Serializes a complete config that RunConfig::parse reads back unchanged.
std::string render_config(const RunConfig& config);

/// Parses "name=lo:hi:step" (a bare "name=value" is a single-point sweep).
SweepSpec parse_vary(const std::string& text);

}  // namespace mcmarket
