#include "mcmarket/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "mcmarket/error.hpp"

namespace mcmarket {

namespace {

// Mature-market price slope along a simulated path. The client inflow is
// taken per client in the market (threshold_flux / D) and applied to the
// served engagements S, so the step keeps the cleared flow balance even
// though the two stocks drift apart once t > 0.
double path_slope(const DemandSide& demand_side, const SupplySide& supply_side, SlopeMode mode,
                  double t, double price) {
  const DemandView demand(demand_side, t, CurveMode::closed);
  const SupplyView supply(supply_side, t, CurveMode::closed);
  const double inflow_rate = demand.threshold_flux(price) / demand.at(price);
  const double mu = supply.params().mu;
  return (inflow_rate - mu) * supply.at(price) / slope_coefficient(supply, price, mode);
}

class PathBuilder {
public:
  PathBuilder(const ModelParams& params, SlopeMode mode)
      : params_(params),
        demand_(DemandSide::closed_form(params)),
        supply_(SupplySide::closed_form(params)),
        mode_(mode) {}

  const DemandSide& demand() const { return demand_; }
  const SupplySide& supply() const { return supply_; }

  Regime regime_at(double t, double price) const {
    return classify_regime(demand_, supply_, t, price).tag;
  }

  double slope(double t, double price) const { return path_slope(demand_, supply_, mode_, t, price); }

  TrajectoryPoint point(double t, double price, Regime regime) const {
    const DemandView demand(demand_, t, CurveMode::closed);
    const SupplyView supply(supply_, t, CurveMode::closed);
    TrajectoryPoint pt;
    pt.t = t;
    pt.regime = regime;
    pt.price = price;
    if (regime == Regime::emerging) {
      pt.entry_rate = entry_rate(demand, supply);
    } else {
      pt.price_slope = slope(t, price);
      pt.exit_rate = exit_rate(supply, price, std::min(pt.price_slope, 0.0));
      if (pt.price_slope < 0 && params_.mu > 0)
        pt.profit_frontier = profitability_threshold_size(pt.price_slope, params_);
    }
    pt.required_share = std::clamp(
        (params_.local_cost() - price) / (params_.n * params_.delta_c), 0.0, 1.0);
    pt.marginal_size = min_viable_size(price, params_);
    pt.demand = demand.at(price);
    pt.supply = supply.at(price);
    return pt;
  }

private:
  ModelParams params_;
  DemandSide demand_;
  SupplySide supply_;
  SlopeMode mode_;
};

}  // namespace

void ScenarioConfig::validate() const {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (!(dt > 0) || !(dt <= horizon)) throw DomainError("dt must lie in (0, horizon]");
  resolved_params().validate();
}

ModelParams ScenarioConfig::resolved_params() const {
  if (!anchors) return params;
  return anchored_params(params, *anchors);
}

Trajectory simulate(const ScenarioConfig& config) {
  config.validate();
  const ModelParams params = config.resolved_params();
  const PathBuilder path(params, config.mode);
  const double floor = params.cost_floor();
  const double pinned = emerging_price(params);

  Trajectory out;
  out.initial = solve_equilibrium(path.demand(), path.supply(), 0.0, CurveMode::closed, config.mode);

  double price = out.initial.price;
  Regime regime = path.regime_at(0.0, price);
  if (regime == Regime::emerging) price = pinned;

  const auto steps = static_cast<std::size_t>(std::ceil(config.horizon / config.dt - 1e-9));
  out.points.reserve(steps + 1);
  out.points.push_back(path.point(0.0, price, regime));

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = config.dt * static_cast<double>(i);
    const double t_next =
        i + 1 == steps ? config.horizon : config.dt * static_cast<double>(i + 1);
    const double h = t_next - t;

    double next = pinned;
    if (regime == Regime::mature) {
      try {
        next = rk4_step([&path](double s, double p) { return path.slope(s, p); }, t, price, h);
      } catch (const DomainError&) {
        // A stage probed a price at or below the cost floor.
        out.floor_reached = true;
        break;
      }
      if (!(next > floor)) {
        out.floor_reached = true;
        break;
      }
    }

    regime = path.regime_at(t_next, next);
    price = regime == Regime::emerging ? pinned : next;
    auto pt = path.point(t_next, price, regime);
    const auto& prev = out.points.back();
    pt.cumulative_exits = prev.cumulative_exits + 0.5 * (prev.exit_rate + pt.exit_rate) * h;
    out.points.push_back(pt);
  }
  return out;
}

TrajectorySummary summarize(const Trajectory& trajectory, const ModelParams& params) {
  if (trajectory.points.empty()) throw DomainError("summarize: empty trajectory");
  const auto& first = trajectory.points.front();
  const auto& last = trajectory.points.back();
  TrajectorySummary s;
  const double span = last.t - first.t;
  if (span > 0) {
    s.price_drift_pct = (std::pow(last.price / first.price, 1.0 / span) - 1.0) * 100.0;
    s.share_gain_pp = (last.required_share - first.required_share) / span * 100.0;
  }
  s.total_exits = last.cumulative_exits;
  s.initial_drift_pct = first.price_slope / first.price * 100.0;
  s.initial_share_gain_pp = -first.price_slope / (params.n * params.delta_c) * 100.0;
  s.initial_share = first.required_share;
  s.initial_marginal_size = first.marginal_size;
  s.floor_reached = trajectory.floor_reached;
  return s;
}

std::vector<double> SweepSpec::values() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step))
    throw DomainError("sweep range must be finite");
  if (hi < lo) throw DomainError("sweep range requires lo <= hi");
  if (hi == lo) return {lo};
  if (!(step > 0)) throw DomainError("sweep step must be positive");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    // lo + k * step drifts in the last bits; snap to 12 significant digits so
    // decimal grids (0.045:0.06:0.0025) hit their decimal values exactly.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", lo + step * static_cast<double>(k));
    out[k] = std::strtod(buf, nullptr);
  }
  return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const SweepSpec& spec, unsigned threads) {
  if (!is_param_name(spec.name)) throw DomainError("sweep: unknown parameter '" + spec.name + "'");
  if (base.anchors && (spec.name == "F0" || spec.name == "g0"))
    throw DomainError("sweep: " + spec.name + " is pinned by the anchor conditions");
  const auto values = spec.values();

  std::vector<SweepRow> rows(values.size());
  auto evaluate = [&](std::size_t k) {
    SweepRow row{values[k], std::nullopt, {}};
    try {
      ScenarioConfig cfg = base;
      set_param(cfg.params, spec.name, values[k]);
      const auto trajectory = simulate(cfg);
      row.summary = summarize(trajectory, cfg.resolved_params());
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows[k] = std::move(row);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) evaluate(k);
  };
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();
  return rows;
}

}  // namespace mcmarket
