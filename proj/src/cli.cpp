#include "mcmarket/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "mcmarket/calibration.hpp"
#include "mcmarket/config.hpp"
#include "mcmarket/error.hpp"

namespace mcmarket::cli {

namespace {

// Currency with 2 decimals, fractions with 4.
std::string money(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string frac(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// Shortest text that reads back to the same double.
std::string exact(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string require_path(const RunConfig& cfg, const std::string& key, const std::string& flag) {
  const auto from_config = cfg.io_path(key);
  if (from_config.empty()) throw UsageError(flag + " <path> is required (or io." + key + " in the config)");
  return from_config;
}

struct Overrides {
  double mu = 0;
  std::string mode;
  double horizon = 0;
  double dt = 0;
  double t = 0;
  std::string out;
  std::string fig2;
  std::string fig3;
  std::string vary;

  // Flags take precedence over the corresponding config entries.
  void apply(RunConfig& cfg, const CLI::App& active) const {
    auto given = [&active](const char* flag) {
      const auto* opt = active.get_option_no_throw(flag);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--mu")) cfg.market["mu"] = mu;
    if (!mode.empty()) {
      if (!parse_slope_mode(mode)) throw UsageError("--mode must be 'capacity' or 'literal'");
      cfg.mode = *parse_slope_mode(mode);
    }
    if (given("--horizon")) cfg.horizon = horizon;
    if (given("--dt")) cfg.dt = dt;
    if (given("--t")) cfg.solve_t = t;
    if (!out.empty()) cfg.io["out"] = out;
    if (!fig2.empty()) cfg.io["fig2"] = fig2;
    if (!fig3.empty()) cfg.io["fig3"] = fig3;
    if (!vary.empty()) cfg.vary = vary;
  }
};

int cmd_calibrate(const std::string& series_path, const std::string& sizes_path,
                  const std::string& out_path, std::ostream& out) {
  const auto series = load_series(series_path);
  const auto rates = estimate_rates(series);

  RunConfig cfg;
  const auto base = german_constants();
  for (const char* key : {"v", "n", "c", "delta_c", "beta", "mu"})
    cfg.market[key] = get_param(ModelParams(base, 0, 0), key);
  cfg.market["psi"] = rates.psi;
  cfg.market["alpha"] = rates.alpha;
  cfg.market["r_m"] = rates.r_m;
  cfg.price0 = german_anchors().price0;

  std::ostringstream summary;
  summary << "psi=" << frac(rates.psi) << " alpha=" << frac(rates.alpha)
          << " r_m=" << money(rates.r_m);
  if (!sizes_path.empty()) {
    const auto fit = fit_zipf(load_sizes(sizes_path));
    cfg.market["g0"] = fit.g0;
    summary << " g0=" << frac(fit.g0) << " zipf_residual=" << frac(fit.residual);
  } else {
    cfg.served0 = german_anchors().served0;
  }
  cfg.constants().validate();
  write_atomically(out_path, "# generated by mcmarket calibrate from " + series_path + "\n" +
                                 render_config(cfg));
  out << summary.str() << " -> " << out_path << "\n";
  return kOk;
}

void print_equilibrium(const EquilibriumResult& eq, std::ostream& out) {
  out << "price=" << money(eq.price) << "\n"
      << "regime=" << to_string(eq.regime) << "\n"
      << "served=" << money(eq.served) << "\n"
      << "required_share=" << frac(eq.required_share) << "\n"
      << "complement_share=" << frac(eq.complement_share) << "\n"
      << "marginal_size=" << money(eq.marginal_size) << "\n"
      << "price_slope=" << money(eq.price_slope) << "\n";
  if (eq.entry_rate) out << "entry_rate=" << frac(*eq.entry_rate) << "\n";
  if (eq.exit_rate) out << "exit_rate=" << frac(*eq.exit_rate) << "\n";
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const auto params = cfg.params();
  const auto eq = solve_equilibrium(DemandSide::closed_form(params), SupplySide::closed_form(params),
                                    cfg.solve_t, CurveMode::closed, cfg.mode);
  print_equilibrium(eq, out);
  if (const auto fig2 = cfg.io_path("fig2"); !fig2.empty()) {
    write_atomically(fig2, curves_csv(params, cfg.solve_t));
    out << "wrote " << fig2 << "\n";
  }
  return kOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const auto params = cfg.params();
  const auto demand = DemandSide::closed_form(params);
  const auto supply = SupplySide::closed_form(params);
  const auto eq = solve_equilibrium(demand, supply, cfg.solve_t, CurveMode::closed, cfg.mode);
  const auto label = classify_regime(demand, supply, cfg.solve_t, eq.price);
  out << "regime=" << to_string(label.tag) << "\n"
      << "margin=" << frac(label.margin) << "\n"
      << "entry_threshold_mu=" << frac(params.alpha - params.psi) << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto path = require_path(cfg, "out", "--out");
  const auto scenario = cfg.scenario();
  const auto trajectory = simulate(scenario);
  write_atomically(path, trajectory_csv(trajectory));
  if (const auto fig3 = cfg.io_path("fig3"); !fig3.empty()) write_atomically(fig3, path_summary_csv(trajectory));
  const auto summary = summarize(trajectory, scenario.params);
  out << "rows=" << trajectory.points.size() << " final_price=" << money(trajectory.points.back().price)
      << " drift_pct_per_year=" << frac(summary.price_drift_pct)
      << " share_gain_pp_per_year=" << frac(summary.share_gain_pp)
      << (trajectory.floor_reached ? " floor_reached" : "") << " -> " << path << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto path = require_path(cfg, "out", "--out");
  if (cfg.vary.empty()) throw UsageError("--vary name=lo:hi:step is required (or sweep.vary in the config)");
  const auto spec = parse_vary(cfg.vary);
  const auto rows = sweep(cfg.scenario(), spec);
  write_atomically(path, sweep_csv(spec.name, rows));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.summary ? 0 : 1;
  out << "points=" << rows.size() << " failed=" << failed << " -> " << path << "\n";
  return kOk;
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot move output into place at " + path.string());
  }
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string s =
      "t,price,price_slope,required_share,marginal_size,demand,supply,entry_rate,exit_rate,"
      "profit_frontier\n";
  for (const auto& p : trajectory.points) {
    s += frac(p.t) + "," + money(p.price) + "," + money(p.price_slope) + "," +
         frac(p.required_share) + "," + money(p.marginal_size) + "," + money(p.demand) + "," +
         money(p.supply) + "," + frac(p.entry_rate) + "," + frac(p.exit_rate) + "," +
         money(p.profit_frontier) + "\n";
  }
  return s;
}

std::string path_summary_csv(const Trajectory& trajectory) {
  std::string s = "t,price,required_share,exits\n";
  for (const auto& p : trajectory.points)
    s += frac(p.t) + "," + money(p.price) + "," + frac(p.required_share) + "," +
         frac(p.cumulative_exits) + "\n";
  return s;
}

std::string curves_csv(const ModelParams& params, double t, int points) {
  const DemandView demand(DemandSide::closed_form(params), t, CurveMode::closed);
  const SupplyView supply(SupplySide::closed_form(params), t, CurveMode::closed);
  const double lo = params.cost_floor();
  const double hi = params.local_cost();
  std::string s = "price,demand,supply\n";
  for (int k = 0; k < points; ++k) {
    const double p = k + 1 == points ? hi : lo + (hi - lo) * k / (points - 1);
    const double sup = k == 0 ? 0.0 : supply.at(p);
    s += money(p) + "," + money(demand.at(p)) + "," + money(sup) + "\n";
  }
  return s;
}

std::string sweep_csv(const std::string& name, const std::vector<SweepRow>& rows) {
  std::string s = name +
                  ",price_drift_pct,share_gain_pp,total_exits,initial_drift_pct,"
                  "initial_share_gain_pp,initial_share,initial_marginal_size,floor_reached,error\n";
  for (const auto& r : rows) {
    s += exact(r.value);
    if (r.summary) {
      const auto& m = *r.summary;
      s += "," + frac(m.price_drift_pct) + "," + frac(m.share_gain_pp) + "," + frac(m.total_exits) +
           "," + frac(m.initial_drift_pct) + "," + frac(m.initial_share_gain_pp) + "," +
           frac(m.initial_share) + "," + money(m.initial_marginal_size) + "," +
           (m.floor_reached ? "1" : "0") + ",";
    } else {
      s += ",,,,,,,,," + csv_quote(r.error);
    }
    s += "\n";
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Professional-services market simulator with labor displacement", "mcmarket"};
  app.require_subcommand(1);

  std::string config_path, series_path, sizes_path, calib_out;
  Overrides ov;

  auto* calibrate = app.add_subcommand("calibrate", "Estimate market rates from yearly records");
  calibrate->add_option("--series", series_path, "yearly records CSV")->required();
  calibrate->add_option("--sizes", sizes_path, "provider size histogram CSV");
  calibrate->add_option("--out", calib_out, "config file to write")->required();

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration")->required();
    sub->add_option("--mu", ov.mu, "provider growth rate (market.mu)");
  };

  auto* solve = app.add_subcommand("solve", "Clear the market at one time");
  add_config(solve);
  solve->add_option("--t", ov.t, "time in years (dynamics.t)");
  solve->add_option("--fig2", ov.fig2, "write demand/supply curves CSV (io.fig2)");
  solve->add_option("--mode", ov.mode, "slope mode: capacity|literal (dynamics.mode)");

  auto* classify = app.add_subcommand("classify", "Report the market regime");
  add_config(classify);

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the market path");
  add_config(simulate_cmd);
  simulate_cmd->add_option("--mode", ov.mode, "slope mode: capacity|literal (dynamics.mode)");
  simulate_cmd->add_option("--horizon", ov.horizon, "years (dynamics.horizon)");
  simulate_cmd->add_option("--dt", ov.dt, "step in years (dynamics.dt)");
  simulate_cmd->add_option("--out", ov.out, "trajectory CSV (io.out)");
  simulate_cmd->add_option("--fig3", ov.fig3, "price/share/exits CSV (io.fig3)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Simulate across a parameter grid");
  add_config(sweep_cmd);
  sweep_cmd->add_option("--vary", ov.vary, "name=lo:hi:step (sweep.vary)");
  sweep_cmd->add_option("--mode", ov.mode, "slope mode: capacity|literal (dynamics.mode)");
  sweep_cmd->add_option("--horizon", ov.horizon, "years (dynamics.horizon)");
  sweep_cmd->add_option("--dt", ov.dt, "step in years (dynamics.dt)");
  sweep_cmd->add_option("--out", ov.out, "sweep CSV (io.out)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  auto* active = app.get_subcommands().front();

  try {
    if (active == calibrate) return cmd_calibrate(series_path, sizes_path, calib_out, out);
    auto cfg = RunConfig::load(config_path);
    ov.apply(cfg, *active);  // flags win over file values
    if (active == solve) return cmd_solve(cfg, out);
    if (active == classify) return cmd_classify(cfg, out);
    if (active == simulate_cmd) return cmd_simulate(cfg, out);
    return cmd_sweep(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << active->help();
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace mcmarket::cli
