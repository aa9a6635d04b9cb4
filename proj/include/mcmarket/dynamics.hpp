#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcmarket/calibration.hpp"
#include "mcmarket/equilibrium.hpp"

namespace mcmarket {

struct TrajectoryPoint {
  double t = 0;
  double price = 0;
  double price_slope = 0;
  double required_share = 0;
  double marginal_size = 0;
  double demand = 0;  // D(t, price)
  double supply = 0;  // S(t, price)
  double entry_rate = 0;
  double exit_rate = 0;
  double profit_frontier = 0;
  double cumulative_exits = 0;
  Regime regime = Regime::mature;
};

struct ScenarioConfig {
  ModelParams params;
  SlopeMode mode = SlopeMode::capacity;
  double horizon = 10.0;
  double dt = 0.01;
  /// When present, F0 and g0 in `params` are replaced by the anchored values.
  std::optional<AnchorConditions> anchors;

  void validate() const;
  /// params with anchors applied.
  ModelParams resolved_params() const;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  EquilibriumResult initial;
  /// The path stopped because the next price would reach the full-offshore cost floor.
  bool floor_reached = false;
};

/// Market path from the t = 0 equilibrium. Emerging steps hold the price at the
/// smallest provider's cost and record entry; mature steps integrate the price
/// decline with RK4 and record exits. The regime is re-evaluated every step.
Trajectory simulate(const ScenarioConfig& config);

struct TrajectorySummary {
  double price_drift_pct = 0;      // geometric mean annual price change over the path, %/year
  double share_gain_pp = 0;        // mean annual required-share gain, percentage points/year
  double total_exits = 0;
  double initial_drift_pct = 0;    // price_slope / price at t = 0, %/year
  double initial_share_gain_pp = 0;  // -price_slope / (n delta_c) at t = 0, pp/year
  double initial_share = 0;
  double initial_marginal_size = 0;
  bool floor_reached = false;
};

TrajectorySummary summarize(const Trajectory& trajectory, const ModelParams& params);

struct SweepSpec {
  std::string name;  // a ModelParams field
  double lo;
  double hi;
  double step;

  /// Grid values lo, lo + step, ... up to hi (inclusive within 1e-9 steps).
  std::vector<double> values() const;
};

struct SweepRow {
  double value;
  std::optional<TrajectorySummary> summary;
  std::string error;  // set when this point failed
};

/// One simulate per grid value, evaluated on up to `threads` workers (0 = hardware
/// concurrency). Rows come back in grid order regardless of scheduling.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const SweepSpec& spec, unsigned threads = 0);

}  // namespace mcmarket
