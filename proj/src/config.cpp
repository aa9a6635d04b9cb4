#include "mcmarket/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcmarket/error.hpp"

namespace mcmarket {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_number(const std::string& text, const std::string& what, long line) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw DataError("invalid number '" + text + "' for " + what, line);
  return value;
}

// Shortest text that reads back to the same double.
std::string exact(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

constexpr const char* kConstantKeys[] = {"v", "n", "c", "delta_c", "beta", "psi", "mu", "alpha", "r_m"};

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const auto body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw DataError(origin + ": unterminated section header", line);
      section = trim(body.substr(1, body.size() - 2));
      if (section != "market" && section != "anchors" && section != "dynamics" &&
          section != "sweep" && section != "io")
        throw DataError(origin + ": unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw DataError(origin + ": expected 'key = value'", line);
    if (section.empty()) throw DataError(origin + ": key outside of any section", line);
    cfg.set(section, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line);
  }
  return cfg;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value,
                    long line) {
  const auto where = section + "." + key;
  if (section == "market") {
    if (!is_param_name(key)) throw DataError("unknown market parameter '" + key + "'", line);
    market[key] = to_number(value, where, line);
  } else if (section == "anchors") {
    if (key == "served0") served0 = to_number(value, where, line);
    else if (key == "price0") price0 = to_number(value, where, line);
    else throw DataError("unknown anchors key '" + key + "'", line);
  } else if (section == "dynamics") {
    if (key == "mode") {
      const auto m = parse_slope_mode(value);
      if (!m) throw DataError("dynamics.mode must be 'capacity' or 'literal'", line);
      mode = *m;
    } else if (key == "horizon") {
      horizon = to_number(value, where, line);
    } else if (key == "dt") {
      dt = to_number(value, where, line);
    } else if (key == "t") {
      solve_t = to_number(value, where, line);
    } else {
      throw DataError("unknown dynamics key '" + key + "'", line);
    }
  } else if (section == "sweep") {
    if (key != "vary") throw DataError("unknown sweep key '" + key + "'", line);
    vary = value;
  } else if (section == "io") {
    if (key != "out" && key != "fig2" && key != "fig3")
      throw DataError("unknown io key '" + key + "'", line);
    io[key] = value;
  } else {
    throw DataError("unknown section '" + section + "'", line);
  }
}

MarketConstants RunConfig::constants() const {
  ModelParams p;
  for (const char* key : kConstantKeys) {
    const auto it = market.find(key);
    if (it == market.end()) throw DataError(std::string("config is missing market.") + key);
    set_param(p, key, it->second);
  }
  return p;
}

ModelParams RunConfig::params() const {
  const auto base = constants();
  if (price0 && served0) return anchored_params(base, {*served0, *price0});
  const auto g0 = market.find("g0");
  if (price0 && g0 != market.end()) return anchored_params_with_g0(base, g0->second, *price0);
  const auto F0 = market.find("F0");
  if (F0 == market.end() || g0 == market.end())
    throw DataError("config needs anchors (served0, price0), price0 with g0, or both F0 and g0");
  ModelParams p(base, F0->second, g0->second);
  p.validate();
  return p;
}

ScenarioConfig RunConfig::scenario() const {
  ScenarioConfig s;
  s.params = params();
  s.mode = mode;
  s.horizon = horizon;
  s.dt = dt;
  return s;
}

std::string RunConfig::io_path(const std::string& key) const {
  const auto it = io.find(key);
  return it == io.end() ? std::string{} : it->second;
}

std::string render_config(const RunConfig& config) {
  std::ostringstream out;
  out << "[market]\n";
  for (const auto& [key, value] : config.market) out << key << " = " << exact(value) << "\n";
  if (config.served0 || config.price0) {
    out << "\n[anchors]\n";
    if (config.served0) out << "served0 = " << exact(*config.served0) << "\n";
    if (config.price0) out << "price0 = " << exact(*config.price0) << "\n";
  }
  out << "\n[dynamics]\n"
      << "mode = " << to_string(config.mode) << "\n"
      << "horizon = " << exact(config.horizon) << "\n"
      << "dt = " << exact(config.dt) << "\n";
  if (config.solve_t != 0) out << "t = " << exact(config.solve_t) << "\n";
  if (!config.vary.empty()) out << "\n[sweep]\nvary = " << config.vary << "\n";
  if (!config.io.empty()) {
    out << "\n[io]\n";
    for (const auto& [key, value] : config.io) out << key << " = " << value << "\n";
  }
  return out.str();
}

SweepSpec parse_vary(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw DataError("--vary expects name=lo:hi:step, got '" + text + "'");
  SweepSpec spec;
  spec.name = trim(text.substr(0, eq));
  if (!is_param_name(spec.name)) throw DataError("--vary: unknown parameter '" + spec.name + "'");
  const auto range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  if (c1 == std::string::npos) {
    spec.lo = spec.hi = to_number(trim(range), "--vary", -1);
    spec.step = 0;
    return spec;
  }
  const auto c2 = range.find(':', c1 + 1);
  if (c2 == std::string::npos) throw DataError("--vary expects name=lo:hi:step");
  spec.lo = to_number(trim(range.substr(0, c1)), "--vary lo", -1);
  spec.hi = to_number(trim(range.substr(c1 + 1, c2 - c1 - 1)), "--vary hi", -1);
  spec.step = to_number(trim(range.substr(c2 + 1)), "--vary step", -1);
  return spec;
}

}  // namespace mcmarket
