#include "mcmarket/market_curves.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mcmarket/error.hpp"

namespace mcmarket {

namespace {

void require_time(double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

// Value of the grid at x for transport: exact node hits are returned as-is,
// otherwise power-law (log-log) interpolation between positive neighbours and
// linear interpolation when a neighbour is zero.
double transport_sample(const DensityGrid& grid, double x) {
  const auto axis = grid.axis();
  const auto values = grid.values();
  auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it != axis.end() && std::abs(*it / x - 1.0) <= 1e-12) return values[it - axis.begin()];
  if (it != axis.begin() && std::abs(*(it - 1) / x - 1.0) <= 1e-12)
    return values[it - axis.begin() - 1];
  if (it == axis.begin() || it == axis.end())
    throw DomainError("transport_sample: point outside the grid");
  const auto hi = static_cast<std::size_t>(it - axis.begin());
  const auto lo = hi - 1;
  const double y0 = values[lo];
  const double y1 = values[hi];
  if (y0 > 0 && y1 > 0) {
    const double w = std::log(x / axis[lo]) / std::log(axis[hi] / axis[lo]);
    return y0 * std::pow(y1 / y0, w);
  }
  const double w = (x - axis[lo]) / (axis[hi] - axis[lo]);
  return y0 + w * (y1 - y0);
}

double tail_exponent(const ModelParams& p) { return 1.0 - p.alpha / p.psi; }

// Closed-form client population: the full tail integral from r_m.
double closed_population(const ModelParams& p, double t) {
  return p.F0 * p.alpha * std::exp(p.alpha * t) * (p.psi / (p.alpha - p.psi)) * p.r_m;
}

void require_price(double price) {
  if (!std::isfinite(price)) throw DomainError("price must be finite");
  if (price < 0) throw DomainError("price must be >= 0");
}

void require_supply_price(double price, const ModelParams& p) {
  if (!std::isfinite(price)) throw DomainError("price must be finite");
  if (!(price > p.cost_floor()))
    throw DomainError("below cost floor: price " + std::to_string(price) + " <= " +
                      std::to_string(p.cost_floor()));
  if (price > p.local_cost())
    throw DomainError("price above the local-cost ceiling n*c");
}

}  // namespace

// ---------------------------------------------------------------- sides

DemandSide::DemandSide(const ModelParams& params, std::optional<DensityGrid> grid)
    : params_(params), grid_(std::move(grid)) {
  params_.validate();
  if (grid_ && std::abs(grid_->lower_bound() / params_.r_m - 1.0) > 1e-12)
    throw DomainError("demand grid must start at r_m");
  if (grid_ && grid_->upper_bound() < 1e3 * params_.r_m * (1 - 1e-12))
    throw DomainError("demand grid must extend to at least 1e3 * r_m");
}

DemandSide DemandSide::closed_form(const ModelParams& params) { return {params, std::nullopt}; }

DemandSide DemandSide::with_grid(const ModelParams& params, DensityGrid initial) {
  return {params, std::move(initial)};
}

DemandSide DemandSide::with_default_grid(const ModelParams& params, double tail_tolerance) {
  params.validate();
  if (!(tail_tolerance > 0 && tail_tolerance < 1))
    throw DomainError("tail tolerance must lie in (0, 1)");
  const double a = params.alpha / params.psi;
  // Tail beyond cap holds (cap/r_m)^(1-a) of the mass.
  const double log_ratio = std::max(std::log(1e3), std::log(tail_tolerance) / (1.0 - a));
  // Trapezoid bias on a power law is about h^2 a(a+1)/12 for log step h.
  const double h = std::sqrt(1.2e-6 / (a * (a + 1.0)));
  const auto points =
      std::max<std::size_t>(512, static_cast<std::size_t>(std::ceil(log_ratio / h)) + 1);
  const double cap = params.r_m * std::exp(log_ratio);
  const ModelParams p = params;
  auto grid = DensityGrid::sample(params.r_m, cap, points, [&p](double r) {
    return p.alpha * p.F0 * std::pow(r / p.r_m, -p.alpha / p.psi);
  });
  return {params, std::move(grid)};
}

double DemandSide::entrant_inflow(double t) const {
  return params_.alpha * params_.F0 * std::exp(params_.alpha * t);
}

SupplySide::SupplySide(const ModelParams& params, std::optional<DensityGrid> grid)
    : params_(params), grid_(std::move(grid)) {
  params_.validate();
  const auto bounds = ProviderBounds::of(params_);
  if (grid_ && (std::abs(grid_->lower_bound() / bounds.e_min_domain - 1.0) > 1e-12 ||
                std::abs(grid_->upper_bound() / bounds.e_max_domain - 1.0) > 1e-12))
    throw DomainError("supply grid must span [n, 1/beta]");
}

SupplySide SupplySide::closed_form(const ModelParams& params) { return {params, std::nullopt}; }

SupplySide SupplySide::with_grid(const ModelParams& params, DensityGrid initial) {
  return {params, std::move(initial)};
}

SupplySide SupplySide::with_default_grid(const ModelParams& params, std::size_t points) {
  params.validate();
  const auto bounds = ProviderBounds::of(params);
  if (!(bounds.e_max_domain > bounds.e_min_domain))
    throw DomainError("supply grid needs n < 1/beta");
  const double g0 = params.g0;
  auto grid = DensityGrid::sample(bounds.e_min_domain, bounds.e_max_domain, points,
                                  [g0](double e) { return g0 / e; });
  return {params, std::move(grid)};
}

double SupplySide::entrant_inflow(double t) const {
  return params_.g0 * std::exp(params_.mu * t) / params_.n;
}

// ---------------------------------------------------------------- views

DemandView::DemandView(const DemandSide& side, double t, CurveMode mode)
    : params_(side.params()), t_(t), mode_(mode) {
  require_time(t);
  if (mode == CurveMode::numeric) {
    if (!side.initial_grid()) throw DomainError("numeric demand requires a density grid");
    if (t == 0) {
      grid_ = side.initial_grid();
    } else {
      grid_ = evolve_density(*side.initial_grid(), params_.psi, t,
                             [&side](double s) { return side.entrant_inflow(s); })
                  .grid;
    }
  }
}

double DemandView::density(double r) const {
  if (!(r >= params_.r_m)) throw DomainError("demand density: revenue below r_m");
  if (mode_ == CurveMode::numeric) {
    if (r > grid_->upper_bound()) return 0.0;
    return grid_->interpolate(r);
  }
  return params_.alpha * params_.F0 * std::exp(params_.alpha * t_) *
         std::pow(r / params_.r_m, -params_.alpha / params_.psi);
}

double DemandView::population() const {
  if (mode_ == CurveMode::numeric) return integrate_tail(*grid_, grid_->lower_bound());
  return closed_population(params_, t_);
}

double DemandView::at(double price) const {
  require_price(price);
  const double threshold = price / params_.v;
  if (threshold <= params_.r_m) return population();
  if (mode_ == CurveMode::numeric) {
    if (threshold >= grid_->upper_bound()) return 0.0;
    return integrate_tail(*grid_, threshold);
  }
  return closed_population(params_, t_) * std::pow(threshold / params_.r_m, tail_exponent(params_));
}

double DemandView::threshold_flux(double price) const {
  require_price(price);
  const double threshold = price / params_.v;
  if (threshold < params_.r_m) return 0.0;
  return params_.psi * threshold * density(threshold);
}

SupplyView::SupplyView(const SupplySide& side, double t, CurveMode mode)
    : params_(side.params()), t_(t), mode_(mode) {
  require_time(t);
  if (mode == CurveMode::numeric) {
    if (!side.initial_grid()) throw DomainError("numeric supply requires a density grid");
    if (t == 0 || params_.mu == 0) {
      grid_ = side.initial_grid();
    } else {
      grid_ = evolve_density(*side.initial_grid(), params_.mu, t,
                             [&side](double s) { return side.entrant_inflow(s); })
                  .grid;
    }
  }
}

double SupplyView::density(double e) const {
  if (!ProviderBounds::of(params_).contains(e))
    throw DomainError("supply density: provider size outside [n, 1/beta]");
  if (mode_ == CurveMode::numeric) return grid_->interpolate(e);
  return params_.g0 * std::exp(params_.mu * t_) / e;
}

double SupplyView::at(double price) const {
  require_supply_price(price, params_);
  if (mode_ == CurveMode::numeric) {
    const double e_min = min_viable_size(price, params_);
    return integrate_tail(*grid_, e_min, TailWeight::identity) / params_.n;
  }
  const auto& p = params_;
  return std::exp(p.mu * t_) * p.g0 / (p.n * p.beta) *
         (1.0 + (price - p.n * p.c) / (p.n * p.delta_c));
}

double SupplyView::price_derivative(double price) const {
  require_supply_price(price, params_);
  const auto& p = params_;
  const double e_min = min_viable_size(price, p);
  return e_min * density(e_min) / (p.n * p.n * p.beta * p.delta_c);
}

double demand_density(const DemandSide& side, double t, double r) {
  return DemandView(side, t, CurveMode::closed).density(r);
}

double demand_at(const DemandSide& side, double t, double price, CurveMode mode) {
  return DemandView(side, t, mode).at(price);
}

double supply_density(const SupplySide& side, double t, double e) {
  return SupplyView(side, t, CurveMode::closed).density(e);
}

double supply_at(const SupplySide& side, double t, double price, CurveMode mode) {
  return SupplyView(side, t, mode).at(price);
}

// ---------------------------------------------------------------- transport

EvolvedDensity evolve_density(const DensityGrid& grid, double rate, double t,
                              const std::function<double(double)>& inflow) {
  if (!(rate > 0) || !std::isfinite(rate)) throw DomainError("evolve_density: rate must be > 0");
  require_time(t);
  if (t == 0) return {grid, 0.0};

  const double shift = std::exp(-rate * t);
  const double lower = grid.lower_bound();
  const auto axis = grid.axis();
  std::vector<double> values(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double origin = axis[i] * shift;
    if (origin >= lower * (1 - 1e-12)) {
      values[i] = transport_sample(grid, std::max(origin, lower));
    } else {
      values[i] = inflow(t - std::log(axis[i] / lower) / rate);
    }
  }
  const double exit_from = std::max(lower, grid.upper_bound() * shift);
  const double truncated = integrate_tail(grid, exit_from);
  return {DensityGrid(std::vector<double>(axis.begin(), axis.end()), std::move(values)), truncated};
}

}  // namespace mcmarket
