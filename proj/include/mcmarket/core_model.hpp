#pragma once

#include <string>
#include <string_view>

namespace mcmarket {

/// Market constants that are observed or estimated directly. The two
/// density normalizations (F0, g0) are kept apart because they are pinned
/// by anchor conditions rather than measured.
struct MarketConstants {
  double v = 0.025;         // client benefit, fraction of client revenue
  double n = 1.0;           // workers per engagement
  double c = 50000.0;       // local labor cost per worker-year
  double delta_c = 25000.0; // savings per fully displaced worker-year
  double beta = 0.0002;     // displaceable share per employee of provider size
  double psi = 0.036;       // client revenue growth rate
  double mu = 0.05;         // provider workforce growth rate
  double alpha = 0.073;     // client birth rate
  double r_m = 1.3e6;       // entrant client revenue

  /// Throws DomainError naming the first violated constraint.
  void validate() const;
};

struct ModelParams : MarketConstants {
  double F0 = 0.0;  // demand density normalization
  double g0 = 0.0;  // Zipf supply normalization

  ModelParams() = default;
  ModelParams(const MarketConstants& base, double demand_norm, double supply_norm)
      : MarketConstants(base), F0(demand_norm), g0(supply_norm) {}

  void validate() const;

  double cost_floor() const { return n * (c - delta_c); }
  double local_cost() const { return n * c; }
};

/// Names accepted by get_param/set_param: the ModelParams field names.
bool is_param_name(std::string_view name);
double get_param(const ModelParams& p, std::string_view name);
void set_param(ModelParams& p, std::string_view name, double value);

/// Provider size domain: from the minimum team n to the size 1/beta at
/// which every displaceable activity is already displaced.
struct ProviderBounds {
  double e_min_domain;
  double e_max_domain;

  static ProviderBounds of(const MarketConstants& p) { return {p.n, 1.0 / p.beta}; }
  bool contains(double e) const { return e >= e_min_domain && e <= e_max_domain; }
};

/// Share of a provider's labor that can be displaced: min(beta*e, 1).
double offshore_fraction(double e, const MarketConstants& p);

/// Cost of one engagement for a provider of size e: n*(c - phi(e)*delta_c).
double engagement_cost(double e, const MarketConstants& p);

/// Smallest provider that breaks even at price p, clamped below at n.
/// Throws DomainError when p is at or below the full-offshore cost floor.
double min_viable_size(double price, const MarketConstants& p);

/// Offshore share the marginal provider needs at price p, (n*c - p)/(n*delta_c).
double required_offshore_share(double price, const MarketConstants& p);

/// Provider size above which displacement savings outpace a price decline
/// of the given slope. Zero for non-declining prices.
double profitability_threshold_size(double price_slope, const MarketConstants& p);

/// Price at which the smallest admissible provider (e = n) just breaks even.
/// This is the price level pinned by an emerging market.
double emerging_price(const MarketConstants& p);

}  // namespace mcmarket
