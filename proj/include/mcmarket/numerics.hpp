#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mcmarket {

/// Sampled non-negative density on a strictly increasing axis.
/// Immutable after construction, so grids can be shared across threads.
class DensityGrid {
public:
  static constexpr std::size_t kMinPoints = 16;

  /// Throws DomainError unless the axis is strictly increasing, every value
  /// is finite and >= 0, and there are at least kMinPoints samples.
  DensityGrid(std::vector<double> axis, std::vector<double> values);

  /// Samples `density` on a log-spaced axis over [lo, hi].
  static DensityGrid sample(double lo, double hi, std::size_t points,
                            const std::function<double(double)>& density);

  std::span<const double> axis() const { return axis_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return axis_.size(); }
  double lower_bound() const { return axis_.front(); }
  double upper_bound() const { return axis_.back(); }

  /// Linear interpolation; x must lie inside [lower_bound, upper_bound].
  double interpolate(double x) const;

private:
  std::vector<double> axis_;
  std::vector<double> values_;
};

/// `count` points from lo to hi with a constant ratio; endpoints are exact.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

enum class TailWeight { none, identity };

/// Trapezoidal integral of the grid from `from` to the upper bound, with the
/// integrand optionally multiplied by the axis value. The partial first
/// panel uses the linearly interpolated value at `from`.
double integrate_tail(const DensityGrid& grid, double from, TailWeight weight = TailWeight::none);

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

inline constexpr double kDefaultPriceTolerance = 1e-6;

/// Bisection on a bracket with a sign change, until hi - lo <= tol_abs.
/// Returns the final midpoint. Throws NoEquilibriumError without a sign change.
double find_root(const std::function<double(double)>& residual, Bracket bracket,
                 double tol_abs = kDefaultPriceTolerance);

/// Convenience overload that evaluates the residual at both ends first.
double find_root(const std::function<double(double)>& residual, double lo, double hi,
                 double tol_abs = kDefaultPriceTolerance);

using SlopeFn = std::function<double(double t, double value)>;

struct PathPoint {
  double t;
  double value;
};

/// One classical fourth-order Runge-Kutta step. Throws NonFiniteSlopeError
/// naming the stage input if any stage slope is not finite.
double rk4_step(const SlopeFn& slope, double t, double value, double dt);

/// `steps` RK4 steps from (t0, value0); returns steps + 1 points including the start.
std::vector<PathPoint> step_path(const SlopeFn& slope, double t0, double value0, double dt,
                                 std::size_t steps);

}  // namespace mcmarket
