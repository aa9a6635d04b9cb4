#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "mcmarket/core_model.hpp"
#include "mcmarket/numerics.hpp"

namespace mcmarket {

/// closed: power-law / Zipf closed forms. numeric: trapezoidal quadrature of
/// a sampled t = 0 density, carried to time t along characteristics.
enum class CurveMode { closed, numeric };

/// Client side of the market. Client revenue density at time t is
///   f(t, r) = alpha * F0 * exp(alpha t) * (r / r_m)^(-alpha/psi),  r >= r_m,
/// the stationary-shape solution of r' = psi r with entrants arriving at r_m
/// at rate h(t) = alpha * F0 * exp(alpha t).
class DemandSide {
public:
  /// Closed form only; numeric mode is unavailable.
  static DemandSide closed_form(const ModelParams& params);

  /// Attaches a t = 0 density grid on [r_m, r_cap] for numeric mode.
  static DemandSide with_grid(const ModelParams& params, DensityGrid initial);

  /// Samples the closed-form t = 0 density on a log grid. The cap is chosen so
  /// the neglected tail holds at most `tail_tolerance` of the mass (never
  /// below 1e3 * r_m) and the spacing keeps trapezoid bias near 1e-7.
  static DemandSide with_default_grid(const ModelParams& params, double tail_tolerance = 1e-10);

  const ModelParams& params() const { return params_; }
  const std::optional<DensityGrid>& initial_grid() const { return grid_; }

  /// Boundary inflow at r_m: new client firms per unit revenue per year.
  double entrant_inflow(double t) const;

private:
  DemandSide(const ModelParams& params, std::optional<DensityGrid> grid);
  ModelParams params_;
  std::optional<DensityGrid> grid_;
};

/// Provider side. Zipf initial sizes g(0, e) = g0 / e on [n, 1/beta], growing
/// at rate mu with new providers entering at size n.
class SupplySide {
public:
  static constexpr std::size_t kDefaultGridPoints = 4096;

  static SupplySide closed_form(const ModelParams& params);
  static SupplySide with_grid(const ModelParams& params, DensityGrid initial);
  static SupplySide with_default_grid(const ModelParams& params,
                                      std::size_t points = kDefaultGridPoints);

  const ModelParams& params() const { return params_; }
  const std::optional<DensityGrid>& initial_grid() const { return grid_; }

  /// Boundary inflow at e = n: the density of smallest providers at time t.
  double entrant_inflow(double t) const;

private:
  SupplySide(const ModelParams& params, std::optional<DensityGrid> grid);
  ModelParams params_;
  std::optional<DensityGrid> grid_;
};

/// Demand side frozen at one time and mode. Numeric views evolve the grid
/// once on construction so repeated price queries stay cheap.
class DemandView {
public:
  DemandView(const DemandSide& side, double t, CurveMode mode);

  const ModelParams& params() const { return params_; }
  double t() const { return t_; }
  CurveMode mode() const { return mode_; }

  /// f(t, r); DomainError for r < r_m.
  double density(double r) const;
  /// Total client population (every client demands below price v * r_m).
  double population() const;
  /// D(t, p): clients whose benefit v * r is at least p.
  double at(double price) const;
  /// psi * (p/v) * f(t, p/v): clients crossing the affordability threshold per year.
  double threshold_flux(double price) const;

private:
  ModelParams params_;
  double t_;
  CurveMode mode_;
  std::optional<DensityGrid> grid_;
};

class SupplyView {
public:
  SupplyView(const SupplySide& side, double t, CurveMode mode);

  const ModelParams& params() const { return params_; }
  double t() const { return t_; }
  CurveMode mode() const { return mode_; }

  /// g(t, e); DomainError outside [n, 1/beta].
  double density(double e) const;
  /// S(t, p): engagements that providers viable at price p can serve.
  double at(double price) const;
  /// dS/dp = e_min * g(t, e_min) / (n^2 * beta * delta_c).
  double price_derivative(double price) const;

private:
  ModelParams params_;
  double t_;
  CurveMode mode_;
  std::optional<DensityGrid> grid_;
};

double demand_density(const DemandSide& side, double t, double r);
double demand_at(const DemandSide& side, double t, double price, CurveMode mode = CurveMode::closed);
double supply_density(const SupplySide& side, double t, double e);
double supply_at(const SupplySide& side, double t, double price, CurveMode mode = CurveMode::closed);

struct EvolvedDensity {
  DensityGrid grid;
  /// Mass of the input density that was carried past the axis cap.
  double truncated_mass;
};

/// Geometric advection x' = rate * x solved by characteristics on the input
/// axis: density is constant along x0 * exp(rate t); points whose
/// characteristic starts before the lower bound take inflow(t - ln(x/x_lo)/rate).
EvolvedDensity evolve_density(const DensityGrid& grid, double rate, double t,
                              const std::function<double(double)>& inflow);

}  // namespace mcmarket
