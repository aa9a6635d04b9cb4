#include "mcmarket/core_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "mcmarket/error.hpp"

namespace mcmarket {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("invalid model parameters: ") + what);
}

bool finite_all(const ModelParams& p) {
  for (double x : {p.v, p.n, p.c, p.delta_c, p.beta, p.psi, p.mu, p.alpha, p.r_m, p.F0, p.g0})
    if (!std::isfinite(x)) return false;
  return true;
}

using Field = double ModelParams::*;

constexpr std::array<std::pair<std::string_view, Field>, 11> kFields{{
    {"v", &ModelParams::v},
    {"n", &ModelParams::n},
    {"c", &ModelParams::c},
    {"delta_c", &ModelParams::delta_c},
    {"beta", &ModelParams::beta},
    {"psi", &ModelParams::psi},
    {"mu", &ModelParams::mu},
    {"alpha", &ModelParams::alpha},
    {"r_m", &ModelParams::r_m},
    {"F0", &ModelParams::F0},
    {"g0", &ModelParams::g0},
}};

Field field_of(std::string_view name) {
  for (const auto& [key, field] : kFields)
    if (key == name) return field;
  throw DomainError("unknown model parameter '" + std::string(name) + "'");
}

}  // namespace

void MarketConstants::validate() const {
  require(std::isfinite(v) && std::isfinite(n) && std::isfinite(c) && std::isfinite(delta_c) &&
              std::isfinite(beta) && std::isfinite(psi) && std::isfinite(mu) &&
              std::isfinite(alpha) && std::isfinite(r_m),
          "all constants must be finite");
  require(v > 0, "v > 0");
  require(n >= 1, "n >= 1");
  require(c > 0, "c > 0");
  require(delta_c > 0 && delta_c <= c, "0 < delta_c <= c");
  require(beta > 0, "beta > 0");
  require(beta * n <= 1, "beta * n <= 1");
  require(r_m > 0, "r_m > 0");
  require(psi > 0, "psi > 0");
  require(mu >= 0, "mu >= 0");
  require(alpha > psi, "alpha > psi (client demand tail must converge)");
}

void ModelParams::validate() const {
  require(finite_all(*this), "all parameters must be finite");
  MarketConstants::validate();
  require(F0 > 0, "F0 > 0");
  require(g0 > 0, "g0 > 0");
}

bool is_param_name(std::string_view name) {
  return std::any_of(kFields.begin(), kFields.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

double get_param(const ModelParams& p, std::string_view name) { return p.*field_of(name); }

void set_param(ModelParams& p, std::string_view name, double value) { p.*field_of(name) = value; }

double offshore_fraction(double e, const MarketConstants& p) {
  if (!(e >= 0)) throw DomainError("offshore_fraction: provider size must be >= 0");
  return std::min(p.beta * e, 1.0);
}

double engagement_cost(double e, const MarketConstants& p) {
  return p.n * (p.c - offshore_fraction(e, p) * p.delta_c);
}

double min_viable_size(double price, const MarketConstants& p) {
  const double floor = p.n * (p.c - p.delta_c);
  if (!(price > floor))
    throw DomainError("min_viable_size: price " + std::to_string(price) +
                      " is at or below the cost floor " + std::to_string(floor));
  return std::max((p.n * p.c - price) / (p.n * p.beta * p.delta_c), p.n);
}

double required_offshore_share(double price, const MarketConstants& p) {
  const double floor = p.n * (p.c - p.delta_c);
  const double ceiling = p.n * p.c;
  if (!(price >= floor && price <= ceiling))
    throw DomainError("required_offshore_share: price outside [n(c-dc), n*c]");
  return (ceiling - price) / (p.n * p.delta_c);
}

double profitability_threshold_size(double price_slope, const MarketConstants& p) {
  if (!std::isfinite(price_slope))
    throw DomainError("profitability_threshold_size: slope must be finite");
  if (price_slope >= 0) return 0.0;
  if (p.mu == 0)
    throw NoFrontierError("no provider outruns the price decline: provider growth rate is zero");
  return -price_slope / (p.beta * p.mu * p.n * p.delta_c);
}

double emerging_price(const MarketConstants& p) { return engagement_cost(p.n, p); }

}  // namespace mcmarket
