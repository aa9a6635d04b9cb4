#pragma once

// Test-only reference computations. Nothing here calls into the library's
// curve, quadrature or stepping code, so the checks stay independent.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mcmarket/calibration.hpp"

namespace oracle {

/// Composite Simpson rule on [a, b] with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Tail integral of a power law c * (x / x0)^(-k) from `from` to infinity via
/// u = ln x substitution and Simpson on a long but finite u-range.
inline double power_tail(double coeff, double x0, double k, double from) {
  auto g = [&](double u) {
    const double x = std::exp(u);
    return coeff * std::pow(x / x0, -k) * x;
  };
  const double u0 = std::log(from);
  // Integrand decays like exp((1-k)u); 60/(k-1) e-folds leave < e^-60 of the mass.
  const double u1 = u0 + 60.0 / (k - 1.0);
  return simpson(g, u0, u1, 200000);
}

/// Smallest e on a uniform grid with n(c - min(beta e, 1) dc) <= price.
inline double scan_min_viable(double price, double n, double c, double dc, double beta,
                              double step = 1e-3) {
  for (double e = 0;; e += step) {
    if (n * (c - std::min(beta * e, 1.0) * dc) <= price + 1e-9) return std::max(e, n);
    if (e > 10.0 / beta) return NAN;
  }
}

/// Classical RK4 on y' = f(t, y), written out independently of the library.
inline double rk4(const std::function<double(double, double)>& f, double y, double t0, double t1,
                  int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const double a = f(t, y);
    const double b = f(t + h / 2, y + h / 2 * a);
    const double c = f(t + h / 2, y + h / 2 * b);
    const double d = f(t + h, y + h * c);
    y += h / 6 * (a + 2 * b + 2 * c + d);
    t += h;
  }
  return y;
}

/// Yearly records generated forward from known rates: incumbents grow
/// revenue by psi, births are alpha * firm_count, entrants bring r_m each.
inline mcmarket::CalibrationSeries synthetic_series(double psi, double alpha, double r_m, int years,
                                                    double firms0 = 50000, double revenue0 = 3e11) {
  mcmarket::CalibrationSeries s;
  double firms = firms0;
  double revenue = revenue0;
  for (int y = 0; y < years; ++y) {
    double births = 0;
    if (y > 0) {
      // births_y / firm_count_y = alpha with firm_count_y = firms_prev + births_y
      births = alpha * firms / (1.0 - alpha);
      firms += births;
      revenue = revenue * (1.0 + psi) + births * r_m;
    } else {
      births = alpha * firms;
    }
    s.years.push_back({2010 + y, firms, revenue, births, r_m});
  }
  return s;
}

/// Draws ModelParams satisfying every invariant, with alpha/psi in [1.5, 4].
inline mcmarket::ModelParams random_params(std::mt19937_64& rng) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  mcmarket::ModelParams p;
  p.v = uni(0.005, 0.1);
  p.n = std::floor(uni(1, 6));
  p.c = uni(2e4, 1.5e5);
  p.delta_c = p.c * uni(0.1, 0.9);
  p.beta = uni(1e-5, 1e-3) / p.n;
  p.psi = uni(0.01, 0.08);
  p.alpha = p.psi * uni(1.5, 4.0);
  p.mu = uni(0.0, 0.15);
  p.r_m = uni(1e5, 1e7);
  p.F0 = uni(0.01, 10.0);
  p.g0 = uni(0.5, 50.0);
  return p;
}

}  // namespace oracle
