#include <doctest.h>

#include <cmath>
#include <random>

#include "mcmarket/calibration.hpp"
#include "mcmarket/error.hpp"
#include "mcmarket/market_curves.hpp"
#include "oracles.hpp"

using namespace mcmarket;

namespace {

ModelParams german_params() { return anchored_params(german_constants(), german_anchors()); }

// F0 from the anchor 7500 @ 37000 computed with scipy quadrature of the raw density.
constexpr double kGermanF0 = 0.09280620976863875;

}  // namespace

TEST_CASE("anchored German normalizations") {
  const auto p = german_params();
  CHECK(p.F0 == doctest::Approx(kGermanF0).epsilon(1e-12));
  CHECK(p.g0 == doctest::Approx(3.125).epsilon(1e-12));
}

TEST_CASE("demand_density") {
  const auto side = DemandSide::closed_form(german_params());
  CHECK(demand_density(side, 0, 1.3e6) == doctest::Approx(0.073 * kGermanF0).epsilon(1e-12));
  CHECK(demand_density(side, 0, 1.3e6) == doctest::Approx(6.7748533131106285e-3).epsilon(1e-12));
  CHECK(demand_density(side, 0, 1.48e6) == doctest::Approx(5.208333333333332e-3).epsilon(1e-12));
  CHECK(demand_density(side, 7, 2e6) / demand_density(side, 0, 2e6) ==
        doctest::Approx(std::exp(0.073 * 7)).epsilon(1e-12));
  CHECK(demand_density(side, 0, 2e6) < demand_density(side, 0, 1.9e6));
  CHECK_THROWS_AS(demand_density(side, 0, 1e6), DomainError);
  CHECK_THROWS_AS(demand_density(side, -1, 2e6), DomainError);
}

TEST_CASE("demand_at") {
  const auto params = german_params();
  const auto side = DemandSide::with_default_grid(params);
  CHECK(demand_at(side, 0, 37000) == doctest::Approx(7500).epsilon(1e-12));
  // Oracle: Simpson in log-revenue of the raw power law.
  const double pop = oracle::power_tail(0.073 * params.F0, 1.3e6, 0.073 / 0.036, 1.3e6);
  CHECK(pop == doctest::Approx(8569.273920366953).epsilon(1e-9));
  CHECK(demand_at(side, 0, 0.025 * 1.3e6) == doctest::Approx(pop).epsilon(1e-10));
  CHECK(demand_at(side, 0, 1000) == doctest::Approx(pop).epsilon(1e-10));  // everyone demands
  CHECK(demand_at(side, 0, 0) == doctest::Approx(pop).epsilon(1e-10));
  CHECK_THROWS_AS(demand_at(side, 0, -1), DomainError);
  CHECK_THROWS_AS(demand_at(side, 0, NAN), DomainError);

  for (double p = 32500; p <= 97500; p += 2500) {
    const double closed = demand_at(side, 0, p, CurveMode::closed);
    CHECK(demand_at(side, 0, p, CurveMode::numeric) == doctest::Approx(closed).epsilon(1e-6));
    CHECK(oracle::power_tail(0.073 * params.F0, 1.3e6, 0.073 / 0.036, p / 0.025) ==
          doctest::Approx(closed).epsilon(1e-9));
  }
  // Numeric mode at t > 0 goes through characteristics.
  CHECK(demand_at(side, 3, 40000, CurveMode::numeric) ==
        doctest::Approx(demand_at(side, 3, 40000)).epsilon(1e-6));
  CHECK_THROWS_AS(demand_at(DemandSide::closed_form(params), 0, 40000, CurveMode::numeric),
                  DomainError);
}

TEST_CASE("supply_density and supply_at") {
  const auto params = german_params();
  const auto side = SupplySide::with_default_grid(params);
  CHECK(supply_density(side, 0, 1) == doctest::Approx(3.125));
  CHECK(supply_density(side, 0, 2600) == doctest::Approx(1.201923076923077e-3).epsilon(1e-12));
  CHECK(supply_density(side, 4, 100) / supply_density(side, 0, 100) ==
        doctest::Approx(std::exp(0.05 * 4)).epsilon(1e-12));
  CHECK_THROWS_AS(supply_density(side, 0, 0.5), DomainError);
  CHECK_THROWS_AS(supply_density(side, 0, 5001), DomainError);

  CHECK(supply_at(side, 0, 37000) == doctest::Approx(7500).epsilon(1e-12));
  CHECK(supply_at(side, 0, 37000, CurveMode::numeric) == doctest::Approx(7500).epsilon(1e-9));
  CHECK(supply_at(side, 0, 25000 + 1e-9) == doctest::Approx(0).epsilon(1e-9));
  CHECK(supply_at(side, 6, 40000) == doctest::Approx(std::exp(0.3) * supply_at(side, 0, 40000)));
  CHECK(supply_at(side, 6, 40000, CurveMode::numeric) ==
        doctest::Approx(supply_at(side, 6, 40000)).epsilon(1e-6));
  CHECK_THROWS_AS(supply_at(side, 0, 25000), DomainError);
  CHECK_THROWS_AS(supply_at(side, 0, 10000), DomainError);
}

TEST_CASE("evolve_density") {
  const auto params = german_params();
  SUBCASE("identity at t = 0") {
    const auto grid = DensityGrid::sample(1, 100, 64, [](double x) { return 1 / x; });
    const auto out = evolve_density(grid, 0.1, 0, [](double) { return 0.0; });
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out.grid.values()[i] == grid.values()[i]);
    CHECK(out.truncated_mass == 0);
  }
  SUBCASE("point mass rides one characteristic") {
    // Axis with log step 0.01; rate * t = 0.05 shifts by exactly five nodes.
    std::vector<double> axis(200);
    for (int i = 0; i < 200; ++i) axis[i] = std::exp(0.01 * i);
    std::vector<double> values(200, 0.0);
    values[40] = 2.5;
    const DensityGrid grid(axis, values);
    const auto out = evolve_density(grid, 0.05, 1.0, [](double) { return 0.0; });
    for (int i = 0; i < 200; ++i) CHECK(out.grid.values()[i] == (i == 45 ? 2.5 : 0.0));
  }
  SUBCASE("demand density matches the closed form") {
    const auto side = DemandSide::with_default_grid(params);
    const double t = 5;
    const auto out = evolve_density(*side.initial_grid(), params.psi, t,
                                    [&](double s) { return side.entrant_inflow(s); });
    const auto axis = out.grid.axis();
    for (std::size_t i = 0; i < axis.size(); i += 97) {
      CHECK(out.grid.values()[i] ==
            doctest::Approx(demand_density(side, t, axis[i])).epsilon(1e-9));
    }
    CHECK(out.truncated_mass > 0);
    CHECK(out.truncated_mass < 1e-9 * demand_at(side, 0, 0));
  }
  SUBCASE("errors") {
    const auto grid = DensityGrid::sample(1, 100, 64, [](double x) { return 1 / x; });
    CHECK_THROWS_AS(evolve_density(grid, 0, 1, [](double) { return 0.0; }), DomainError);
    CHECK_THROWS_AS(evolve_density(grid, 0.1, -1, [](double) { return 0.0; }), DomainError);
  }
}

TEST_CASE("emerging-condition ratio is constant under the closed forms") {
  const auto params = german_params();
  const auto side = DemandSide::closed_form(params);
  for (double t : {0.0, 2.0, 9.5}) {
    const DemandView view(side, t, CurveMode::closed);
    for (double p = 33000; p < 200000; p *= 1.37) {
      CHECK(view.threshold_flux(p) / view.at(p) == doctest::Approx(params.alpha - params.psi).epsilon(1e-12));
    }
  }
}

TEST_CASE("curve monotonicity over random parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 300; ++draw) {
    const auto params = oracle::random_params(rng);
    const DemandView demand(DemandSide::closed_form(params), u(rng) * 10, CurveMode::closed);
    const SupplyView supply(SupplySide::closed_form(params), u(rng) * 10, CurveMode::closed);
    const double base = params.v * params.r_m;
    double prev = demand.at(base);
    for (int k = 1; k <= 20; ++k) {
      const double d = demand.at(base * (1 + 0.2 * k));
      CHECK(d < prev);
      prev = d;
    }
    const double floor = params.cost_floor();
    const double span = params.local_cost() - floor;
    double prev_s = 0;
    for (int k = 1; k <= 20; ++k) {
      const double s = supply.at(std::min(floor + span * k / 20.0, params.local_cost()));
      CHECK(s >= prev_s);
      prev_s = s;
    }
  }
}
