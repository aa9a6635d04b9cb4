#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mcmarket/core_model.hpp"

namespace mcmarket {

struct YearRecord {
  int year;
  double firm_count;
  double total_revenue;
  double births;
  double entrant_revenue_mean;
  long line = -1;  // source line, -1 when built in memory
};

struct SizeBucket {
  double size;
  double provider_count;
  long line = -1;
};

struct CalibrationSeries {
  std::vector<YearRecord> years;
  std::vector<SizeBucket> sizes;  // optional provider histogram

  /// Consecutive years, positive counts and revenues, non-negative births.
  void validate() const;
};

struct RateEstimates {
  double psi;
  double alpha;
  double r_m;
};

/// Rates as geometric means over the records:
///   alpha from births / firm_count within each year,
///   psi   from incumbent revenue (total - births * entrant mean) over the prior year's total,
///   r_m   from the entrant revenue means.
/// Requires at least three records.
RateEstimates estimate_rates(const CalibrationSeries& series);

struct ZipfFit {
  double g0;
  double residual;  // RMS of log(count) - log(g0 / size)
};

/// Least-squares fit of log(count) = log(g0) - log(size); at least four buckets.
ZipfFit fit_zipf(std::span<const SizeBucket> histogram);

struct AnchorConditions {
  double served0;  // clients served at t = 0
  double price0;   // cleared price at t = 0
};

struct Normalizations {
  double F0;
  double g0;
};

/// F0 and g0 such that both closed-form curves pass through (price0, served0) at t = 0.
Normalizations anchor_normalizations(const MarketConstants& constants, const AnchorConditions& anchors);

/// Constants plus anchored normalizations, validated.
ModelParams anchored_params(const MarketConstants& constants, const AnchorConditions& anchors);

/// Keeps a known g0 and pins F0 so demand clears supply at price0.
ModelParams anchored_params_with_g0(const MarketConstants& constants, double g0, double price0);

/// Benefit factor from the overhead share of revenue and the cut in overhead a service delivers.
double derive_v(double sga_share, double savings_rate);

CalibrationSeries load_series(const std::filesystem::path& path);
std::vector<SizeBucket> load_sizes(const std::filesystem::path& path);

/// Constants of the German transportation consulting case; pair with german_anchors().
MarketConstants german_constants();
AnchorConditions german_anchors();

}  // namespace mcmarket
