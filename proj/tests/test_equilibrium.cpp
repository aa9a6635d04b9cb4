#include <doctest.h>

#include <cmath>

#include "mcmarket/calibration.hpp"
#include "mcmarket/equilibrium.hpp"
#include "mcmarket/error.hpp"

using namespace mcmarket;

namespace {

ModelParams german_with_mu(double mu) {
  auto k = german_constants();
  k.mu = mu;
  return anchored_params(k, german_anchors());
}

}  // namespace

TEST_CASE("German equilibrium at t = 0") {
  const auto p = german_with_mu(0.05);
  const auto eq = solve_equilibrium(DemandSide::closed_form(p), SupplySide::closed_form(p), 0);
  CHECK(eq.price == doctest::Approx(37000).epsilon(1e-10));
  CHECK(std::abs(eq.price - 37000) <= 1e-6);
  CHECK(eq.served == doctest::Approx(7500).epsilon(1e-9));
  CHECK(eq.supply == doctest::Approx(7500).epsilon(1e-9));
  CHECK(eq.marginal_size == doctest::Approx(2600).epsilon(1e-9));
  CHECK(eq.required_share == doctest::Approx(0.52).epsilon(1e-9));
  CHECK(eq.complement_share == doctest::Approx(0.48).epsilon(1e-9));
  CHECK(eq.regime == Regime::mature);
  CHECK(eq.exit_rate.has_value());
  CHECK_FALSE(eq.entry_rate.has_value());
  // Finite-difference oracle for the capacity slope: (flux - mu S) / (dS/dp) = -156.
  CHECK(eq.price_slope == doctest::Approx(-156).epsilon(1e-6));
}

TEST_CASE("numeric curves clear at the same price") {
  const auto p = german_with_mu(0.05);
  const auto closed = solve_equilibrium(DemandSide::closed_form(p), SupplySide::closed_form(p), 0);
  const auto numeric = solve_equilibrium(DemandSide::with_default_grid(p),
                                         SupplySide::with_default_grid(p), 0, CurveMode::numeric);
  CHECK(numeric.price == doctest::Approx(closed.price).epsilon(1e-6));
}

TEST_CASE("equal growth keeps the price fixed") {
  auto k = german_constants();
  const auto base = anchored_params(k, german_anchors());
  // alpha = mu: both curves scale by the same exp(alpha t).
  auto p = base;
  p.mu = p.alpha;
  const auto demand = DemandSide::closed_form(p);
  const auto supply = SupplySide::closed_form(p);
  const double p0 = solve_equilibrium(demand, supply, 0).price;
  for (double t : {1.0, 5.0, 20.0})
    CHECK(solve_equilibrium(demand, supply, t).price == doctest::Approx(p0).epsilon(1e-9));
}

TEST_CASE("clear_market on synthetic linear curves") {
  const auto cleared = clear_market([](double p) { return 100 - p; }, [](double p) { return p; }, 0, 100);
  CHECK(cleared.price == doctest::Approx(50).epsilon(1e-9));
  CHECK(cleared.served == doctest::Approx(50).epsilon(1e-9));
}

TEST_CASE("market cannot clear") {
  // Supply too small everywhere: demand exceeds capacity even at n*c.
  auto k = german_constants();
  ModelParams p(k, 1.0, 1e-6);
  try {
    solve_equilibrium(DemandSide::closed_form(p), SupplySide::closed_form(p), 0);
    FAIL("expected NoEquilibriumError");
  } catch (const NoEquilibriumError& e) {
    CHECK(e.f_hi() > 0);
    CHECK(e.hi() == 50000);
  }
}

TEST_CASE("classify_regime") {
  auto check = [](double mu) {
    const auto p = german_with_mu(mu);
    return classify_regime(DemandSide::closed_form(p), SupplySide::closed_form(p), 0, 37000);
  };
  CHECK(check(0.07).tag == Regime::mature);
  CHECK(check(0.03).tag == Regime::emerging);
  CHECK(check(0.073 - 0.036).tag == Regime::emerging);  // tie
  CHECK(check(0.03).margin == doctest::Approx(0.037 / 0.03 - 1).epsilon(1e-12));
  CHECK(check(0.0).margin == INFINITY);

  // Label depends only on (alpha, psi, mu): sweep a decade of prices and times.
  for (double mu : {0.02, 0.0369, 0.0371, 0.06}) {
    const auto p = german_with_mu(mu);
    const auto d = DemandSide::closed_form(p);
    const auto s = SupplySide::closed_form(p);
    const auto expected = classify_regime(d, s, 0, 37000).tag;
    for (double price = 33000; price < 330000; price *= 1.25)
      for (double t : {0.0, 3.0, 8.0}) CHECK(classify_regime(d, s, t, price).tag == expected);
  }
}

TEST_CASE("entry_rate") {
  SUBCASE("mature market has no entry") {
    const auto p = german_with_mu(0.05);
    CHECK_THROWS_AS(entry_rate(DemandSide::closed_form(p), SupplySide::closed_form(p), 0), RegimeError);
  }
  SUBCASE("mu = 0 gives (alpha - psi) D at the pinned price") {
    const auto p = german_with_mu(0.0);
    const auto demand = DemandSide::closed_form(p);
    const double p_star = emerging_price(p);
    CHECK(p_star == doctest::Approx(49995));
    const double rate = entry_rate(demand, SupplySide::closed_form(p), 2);
    CHECK(rate == doctest::Approx(0.037 * demand_at(demand, 2, p_star)).epsilon(1e-12));
    // Cross-check via a time finite difference: dD/dt = alpha D, inflow share (alpha - psi)/alpha.
    const double h = 1e-5;
    const double dDdt = (demand_at(demand, 2 + h, p_star) - demand_at(demand, 2 - h, p_star)) / (2 * h);
    CHECK(rate == doctest::Approx(dDdt * (p.alpha - p.psi) / p.alpha).epsilon(1e-7));
  }
  SUBCASE("balanced growth gives zero entry") {
    const auto p = german_with_mu(0.073 - 0.036);
    CHECK(entry_rate(DemandSide::closed_form(p), SupplySide::closed_form(p), 0) ==
          doctest::Approx(0).epsilon(1e-12));
  }
}

TEST_CASE("exit_rate") {
  const auto p = german_with_mu(0.05);
  const auto supply = SupplySide::closed_form(p);
  CHECK(exit_rate(supply, 0, 37000, -185) == doctest::Approx(0.04447115384615385).epsilon(1e-12));
  CHECK(exit_rate(supply, 0, 37000, 0) == 0);
  CHECK(exit_rate(supply, 0, 37000, -370) == doctest::Approx(2 * exit_rate(supply, 0, 37000, -185)));
  CHECK_THROWS_AS(exit_rate(supply, 0, 37000, 5), DomainError);

  // Oracle: providers whose size sits in [e_min(P(dt)), e_min(P(0))] of the density grid.
  const double slope = -185;
  const double dt = 1e-4;
  const double e_now = min_viable_size(37000, p);
  const double e_next = min_viable_size(37000 + slope * dt, p);
  const auto grid = DensityGrid::sample(1, 5000, 200001, [&](double e) { return p.g0 / e; });
  const double crossed = integrate_tail(grid, e_now) - integrate_tail(grid, e_next);
  CHECK(crossed / dt == doctest::Approx(exit_rate(supply, 0, 37000, slope)).epsilon(1e-3));
}

TEST_CASE("price_slope modes") {
  const auto p = german_with_mu(0.05);
  const auto d = DemandSide::closed_form(p);
  const auto s = SupplySide::closed_form(p);
  CHECK(price_slope(d, s, 0, 37000, SlopeMode::capacity) == doctest::Approx(-156).epsilon(1e-9));
  CHECK(price_slope(d, s, 0, 37000, SlopeMode::literal) == doctest::Approx(-405600).epsilon(1e-9));
  CHECK(price_slope(d, s, 0, 37000) / 37000 * 100 == doctest::Approx(-0.4216).epsilon(1e-3));

  const auto balanced = german_with_mu(0.073 - 0.036);
  CHECK(price_slope(DemandSide::closed_form(balanced), SupplySide::closed_form(balanced), 0, 37000) ==
        doctest::Approx(0).epsilon(1e-9));

  // Identity dP/dt = (alpha - psi - mu)(P - floor) wherever D = S.
  for (double mu : {0.04, 0.05, 0.07}) {
    const auto q = german_with_mu(mu);
    const auto eq = solve_equilibrium(DemandSide::closed_form(q), SupplySide::closed_form(q), 0,
                                      CurveMode::closed, SlopeMode::capacity, 1e-9);
    CHECK(eq.price_slope ==
          doctest::Approx((q.alpha - q.psi - mu) * (eq.price - q.cost_floor())).epsilon(1e-9));
  }
  CHECK(parse_slope_mode("prop2-literal") == SlopeMode::literal);
  CHECK(parse_slope_mode("capacity-balance") == SlopeMode::capacity);
  CHECK_FALSE(parse_slope_mode("other").has_value());
}
