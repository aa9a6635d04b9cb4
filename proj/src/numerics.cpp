#include "mcmarket/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcmarket/error.hpp"

namespace mcmarket {

DensityGrid::DensityGrid(std::vector<double> axis, std::vector<double> values)
    : axis_(std::move(axis)), values_(std::move(values)) {
  if (axis_.size() != values_.size())
    throw DomainError("DensityGrid: axis and values differ in length");
  if (axis_.size() < kMinPoints)
    throw DomainError("DensityGrid: at least " + std::to_string(kMinPoints) + " points required");
  for (std::size_t i = 0; i < axis_.size(); ++i) {
    if (!std::isfinite(axis_[i])) throw DomainError("DensityGrid: non-finite axis value");
    if (i > 0 && !(axis_[i] > axis_[i - 1]))
      throw DomainError("DensityGrid: axis must be strictly increasing");
    if (!(values_[i] >= 0) || !std::isfinite(values_[i]))
      throw DomainError("DensityGrid: density values must be finite and non-negative");
  }
}

DensityGrid DensityGrid::sample(double lo, double hi, std::size_t points,
                                const std::function<double(double)>& density) {
  auto axis = log_spaced(lo, hi, points);
  std::vector<double> values(axis.size());
  std::transform(axis.begin(), axis.end(), values.begin(), density);
  return DensityGrid(std::move(axis), std::move(values));
}

double DensityGrid::interpolate(double x) const {
  if (!(x >= lower_bound() && x <= upper_bound()))
    throw DomainError("DensityGrid::interpolate: point outside the grid");
  const auto it = std::upper_bound(axis_.begin(), axis_.end(), x);
  if (it == axis_.end()) return values_.back();
  const auto hi = static_cast<std::size_t>(it - axis_.begin());
  const auto lo = hi - 1;
  const double w = (x - axis_[lo]) / (axis_[hi] - axis_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0 && hi > lo) || count < 2)
    throw DomainError("log_spaced: need 0 < lo < hi and at least two points");
  std::vector<double> out(count);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(log_lo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double integrate_tail(const DensityGrid& grid, double from, TailWeight weight) {
  if (!(from >= grid.lower_bound() && from <= grid.upper_bound()))
    throw DomainError("integrate_tail: lower limit outside the grid domain");
  const auto axis = grid.axis();
  const auto values = grid.values();
  auto integrand = [&](double x, double y) { return weight == TailWeight::identity ? x * y : y; };

  const auto first = static_cast<std::size_t>(
      std::upper_bound(axis.begin(), axis.end(), from) - axis.begin());
  if (first == axis.size()) return 0.0;

  double total = 0.0;
  double x_prev = from;
  double y_prev = integrand(from, grid.interpolate(from));
  for (std::size_t i = first; i < axis.size(); ++i) {
    const double y = integrand(axis[i], values[i]);
    total += 0.5 * (y + y_prev) * (axis[i] - x_prev);
    x_prev = axis[i];
    y_prev = y;
  }
  return total;
}

double find_root(const std::function<double(double)>& residual, Bracket b, double tol_abs) {
  if (!(b.lo < b.hi)) throw DomainError("find_root: bracket requires lo < hi");
  if (!(tol_abs > 0)) throw DomainError("find_root: tolerance must be positive");
  if (!(b.f_lo * b.f_hi <= 0))
    throw NoEquilibriumError("no equilibrium in bracket [" + std::to_string(b.lo) + ", " +
                                 std::to_string(b.hi) + "]: residuals " +
                                 std::to_string(b.f_lo) + " and " + std::to_string(b.f_hi),
                             b.lo, b.hi, b.f_lo, b.f_hi);
  if (b.f_lo == 0) return b.lo;
  if (b.f_hi == 0) return b.hi;

  while (b.hi - b.lo > tol_abs) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;  // bracket at floating-point resolution
    const double f_mid = residual(mid);
    if (f_mid == 0) return mid;
    if ((f_mid < 0) == (b.f_lo < 0)) {
      b.lo = mid;
      b.f_lo = f_mid;
    } else {
      b.hi = mid;
      b.f_hi = f_mid;
    }
  }
  return 0.5 * (b.lo + b.hi);
}

double find_root(const std::function<double(double)>& residual, double lo, double hi,
                 double tol_abs) {
  return find_root(residual, Bracket{lo, hi, residual(lo), residual(hi)}, tol_abs);
}

double rk4_step(const SlopeFn& slope, double t, double y, double dt) {
  auto stage = [&](double ts, double ys) {
    const double k = slope(ts, ys);
    if (!std::isfinite(k))
      throw NonFiniteSlopeError("non-finite slope at t=" + std::to_string(ts) +
                                    ", value=" + std::to_string(ys),
                                ts, ys);
    return k;
  };
  const double k1 = stage(t, y);
  const double k2 = stage(t + 0.5 * dt, y + 0.5 * dt * k1);
  const double k3 = stage(t + 0.5 * dt, y + 0.5 * dt * k2);
  const double k4 = stage(t + dt, y + dt * k3);
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<PathPoint> step_path(const SlopeFn& slope, double t0, double value0, double dt,
                                 std::size_t steps) {
  if (!(dt > 0)) throw DomainError("step_path: dt must be positive");
  if (steps < 1) throw DomainError("step_path: at least one step required");
  std::vector<PathPoint> path;
  path.reserve(steps + 1);
  path.push_back({t0, value0});
  double y = value0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + dt * static_cast<double>(i);
    y = rk4_step(slope, t, y, dt);
    path.push_back({t0 + dt * static_cast<double>(i + 1), y});
  }
  return path;
}

}  // namespace mcmarket
