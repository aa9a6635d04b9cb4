#include "mcmarket/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mcmarket/error.hpp"

namespace mcmarket {

namespace {

constexpr double kTieTolerance = 1e-12;

// D - S with the supply limit S -> 0 at the cost floor.
double clearing_residual(const DemandView& demand, const SupplyView& supply, double price) {
  const double floor = supply.params().cost_floor();
  return demand.at(price) - (price <= floor ? 0.0 : supply.at(price));
}

}  // namespace

std::string_view to_string(Regime r) { return r == Regime::emerging ? "emerging" : "mature"; }

std::string_view to_string(SlopeMode m) { return m == SlopeMode::capacity ? "capacity" : "literal"; }

std::optional<SlopeMode> parse_slope_mode(std::string_view text) {
  if (text == "capacity" || text == "capacity-balance") return SlopeMode::capacity;
  if (text == "literal" || text == "prop2-literal") return SlopeMode::literal;
  return std::nullopt;
}

ClearedPrice clear_market(const std::function<double(double)>& demand,
                          const std::function<double(double)>& supply, double lo, double hi,
                          double tol_abs) {
  const auto residual = [&](double p) { return demand(p) - supply(p); };
  const double price = find_root(residual, lo, hi, tol_abs);
  return {price, demand(price)};
}

RegimeLabel classify_regime(const DemandView& demand, const SupplyView& supply, double p_test) {
  const double mu = supply.params().mu;
  const double inflow = demand.threshold_flux(p_test);
  const double outflow = mu * demand.at(p_test);
  const double margin =
      outflow == 0 ? std::numeric_limits<double>::infinity() : inflow / outflow - 1.0;
  const bool emerging = inflow >= outflow * (1.0 - kTieTolerance);
  return {emerging ? Regime::emerging : Regime::mature, margin};
}

RegimeLabel classify_regime(const DemandSide& demand, const SupplySide& supply, double t,
                            double p_test, CurveMode mode) {
  return classify_regime(DemandView(demand, t, mode), SupplyView(supply, t, mode), p_test);
}

double entry_rate(const DemandView& demand, const SupplyView& supply) {
  const double p_star = emerging_price(supply.params());
  if (classify_regime(demand, supply, p_star).tag != Regime::emerging)
    throw RegimeError("entry_rate: market is mature, providers exit rather than enter");
  const double rate = demand.threshold_flux(p_star) - supply.params().mu * demand.at(p_star);
  return std::max(rate, 0.0);
}

double entry_rate(const DemandSide& demand, const SupplySide& supply, double t) {
  return entry_rate(DemandView(demand, t, CurveMode::closed), SupplyView(supply, t, CurveMode::closed));
}

double exit_rate(const SupplyView& supply, double price, double price_slope) {
  if (price_slope > 0)
    throw DomainError("exit_rate: rising prices contradict a mature market");
  const auto& p = supply.params();
  const double e_min = min_viable_size(price, p);
  return supply.density(e_min) * -price_slope / (p.n * p.beta * p.delta_c);
}

double exit_rate(const SupplySide& supply, double t, double price, double price_slope) {
  return exit_rate(SupplyView(supply, t, CurveMode::closed), price, price_slope);
}

double slope_coefficient(const SupplyView& supply, double price, SlopeMode mode) {
  const auto& p = supply.params();
  double coefficient = 0;
  if (mode == SlopeMode::capacity) {
    coefficient = supply.price_derivative(price);
  } else {
    coefficient = supply.density(min_viable_size(price, p)) / (p.n * p.beta * p.delta_c);
  }
  if (!(coefficient != 0) || !std::isfinite(coefficient))
    throw SingularSlopeError("price slope coefficient is zero or non-finite at price " +
                             std::to_string(price));
  return coefficient;
}

double price_slope(const DemandView& demand, const SupplyView& supply, double price,
                   SlopeMode mode) {
  const double imbalance = demand.threshold_flux(price) - supply.params().mu * supply.at(price);
  return imbalance / slope_coefficient(supply, price, mode);
}

double price_slope(const DemandSide& demand, const SupplySide& supply, double t, double price,
                   SlopeMode mode) {
  return price_slope(DemandView(demand, t, CurveMode::closed),
                     SupplyView(supply, t, CurveMode::closed), price, mode);
}

EquilibriumResult solve_equilibrium(const DemandSide& demand_side, const SupplySide& supply_side,
                                    double t, CurveMode mode, SlopeMode slope_mode,
                                    double tol_abs) {
  const DemandView demand(demand_side, t, mode);
  const SupplyView supply(supply_side, t, mode);
  const auto& p = supply_side.params();
  const double floor = p.cost_floor();
  const double ceiling = p.local_cost();
  auto residual = [&](double price) { return clearing_residual(demand, supply, price); };

  // Grow the upper end by doubling from v * r_m until the residual turns
  // non-positive or the local-cost ceiling is reached.
  Bracket bracket{floor, ceiling, residual(floor), 0.0};
  double probe = p.v * p.r_m;
  while (probe <= floor) probe *= 2;
  for (;;) {
    probe = std::min(probe, ceiling);
    const double r = residual(probe);
    if (r <= 0) {
      bracket.hi = probe;
      bracket.f_hi = r;
      break;
    }
    bracket.lo = probe;
    bracket.f_lo = r;
    if (probe == ceiling) {
      throw NoEquilibriumError("market cannot clear below n*c: D-S = " + std::to_string(r) +
                                   " at " + std::to_string(ceiling) + ", D-S = " +
                                   std::to_string(residual(floor)) + " at the cost floor",
                               floor, ceiling, residual(floor), r);
    }
    probe *= 2;
  }
  if (bracket.lo == bracket.hi) bracket.lo = floor;

  EquilibriumResult out;
  out.t = t;
  out.price = find_root(residual, bracket, tol_abs);
  if (!(out.price > floor))
    throw NoEquilibriumError("market clears at the cost floor: no provider is viable", floor,
                             bracket.hi, bracket.f_lo, bracket.f_hi);
  out.served = demand.at(out.price);
  out.supply = supply.at(out.price);
  out.marginal_size = min_viable_size(out.price, p);
  out.required_share = required_offshore_share(out.price, p);
  out.complement_share = 1.0 - out.required_share;

  const auto label = classify_regime(demand, supply, out.price);
  out.regime = label.tag;
  out.regime_margin = label.margin;
  if (out.regime == Regime::emerging) {
    out.entry_rate = entry_rate(demand, supply);
    out.price_slope = 0.0;
  } else {
    out.price_slope = price_slope(demand, supply, out.price, slope_mode);
    out.exit_rate = exit_rate(supply, out.price, std::min(out.price_slope, 0.0));
  }
  return out;
}

}  // namespace mcmarket
