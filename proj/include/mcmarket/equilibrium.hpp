#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "mcmarket/market_curves.hpp"

namespace mcmarket {

enum class Regime { emerging, mature };

std::string_view to_string(Regime r);

/// How the mature-market price slope converts a flow imbalance into a price change.
///  literal:  divide by g(t, e_min) / (n beta delta_c), a firm-count density.
///  capacity: divide by dS/dp, the engagement capacity the marginal price move releases.
enum class SlopeMode { capacity, literal };

std::string_view to_string(SlopeMode m);
/// Accepts "capacity", "capacity-balance", "literal", "prop2-literal".
std::optional<SlopeMode> parse_slope_mode(std::string_view text);

struct RegimeLabel {
  Regime tag;
  /// threshold_flux / (mu * D) - 1; +inf when mu = 0. Non-negative means emerging.
  double margin;
};

struct EquilibriumResult {
  double t = 0;
  double price = 0;
  Regime regime = Regime::mature;
  double regime_margin = 0;
  double served = 0;          // D(t, price)
  double supply = 0;          // S(t, price), equal to served within root tolerance
  double marginal_size = 0;   // e_min at price
  double required_share = 0;  // (n c - price) / (n delta_c)
  double complement_share = 0;  // 1 - required_share
  std::optional<double> entry_rate;  // emerging only
  std::optional<double> exit_rate;   // mature only
  double price_slope = 0;
};

struct ClearedPrice {
  double price;
  double served;
};

/// Crossing of a decreasing demand and a non-decreasing supply curve on [lo, hi].
ClearedPrice clear_market(const std::function<double(double)>& demand,
                          const std::function<double(double)>& supply, double lo, double hi,
                          double tol_abs = kDefaultPriceTolerance);

/// Emerging iff psi (p/v) f(t, p/v) >= mu D(t, p); relative ties within 1e-12 count as emerging.
RegimeLabel classify_regime(const DemandView& demand, const SupplyView& supply, double p_test);
RegimeLabel classify_regime(const DemandSide& demand, const SupplySide& supply, double t,
                            double p_test, CurveMode mode = CurveMode::closed);

/// Entry of smallest providers at the emerging price n (c - phi(n) delta_c).
/// Throws RegimeError when the market is mature at that price.
double entry_rate(const DemandView& demand, const SupplyView& supply);
double entry_rate(const DemandSide& demand, const SupplySide& supply, double t);

/// Providers dropping below the viability threshold per year: g(t, e_min) |dP/dt| / (n beta delta_c).
double exit_rate(const SupplyView& supply, double price, double price_slope);
double exit_rate(const SupplySide& supply, double t, double price, double price_slope);

/// Signed dP/dt that balances threshold_flux against mu S at the given price.
double price_slope(const DemandView& demand, const SupplyView& supply, double price,
                   SlopeMode mode = SlopeMode::capacity);
double price_slope(const DemandSide& demand, const SupplySide& supply, double t, double price,
                   SlopeMode mode = SlopeMode::capacity);

/// Slope divisor for the given mode at `price`; throws SingularSlopeError when zero.
double slope_coefficient(const SupplyView& supply, double price, SlopeMode mode);

/// Clears D(t, p) = S(t, p) on (n(c - dc), n c], then classifies and fills flows.
EquilibriumResult solve_equilibrium(const DemandSide& demand, const SupplySide& supply, double t,
                                    CurveMode mode = CurveMode::closed,
                                    SlopeMode slope_mode = SlopeMode::capacity,
                                    double tol_abs = kDefaultPriceTolerance);

}  // namespace mcmarket
