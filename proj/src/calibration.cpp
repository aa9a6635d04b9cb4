#include "mcmarket/calibration.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mcmarket/equilibrium.hpp"
#include "mcmarket/error.hpp"
#include "mcmarket/market_curves.hpp"

namespace mcmarket {

namespace {

constexpr std::size_t kMinYears = 3;
constexpr std::size_t kMinBuckets = 4;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(',');
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

double parse_number(std::string_view text, std::string_view column, long line) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value))
    throw DataError("malformed value '" + std::string(text) + "' in column " + std::string(column),
                    line);
  return value;
}

// Reads a headed CSV and returns, per data row, the values of `columns` in order.
struct CsvRow {
  long line;
  std::vector<double> values;
};

std::vector<CsvRow> read_columns(const std::filesystem::path& path,
                                 const std::vector<std::string_view>& columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string text;
  long line_no = 0;
  std::vector<std::size_t> index;
  std::size_t header_width = 0;
  std::vector<CsvRow> rows;
  while (std::getline(in, text)) {
    ++line_no;
    const auto stripped = trim(text);
    if (stripped.empty()) continue;
    const auto cells = split_commas(stripped);
    if (index.empty()) {
      std::map<std::string_view, std::size_t, std::less<>> position;
      for (std::size_t i = 0; i < cells.size(); ++i) position.emplace(cells[i], i);
      for (auto column : columns) {
        const auto it = position.find(column);
        if (it == position.end())
          throw DataError(path.string() + ": missing required column '" + std::string(column) + "'",
                          line_no);
        index.push_back(it->second);
      }
      header_width = cells.size();
      continue;
    }
    if (cells.size() != header_width)
      throw DataError(path.string() + ": expected " + std::to_string(header_width) + " fields, got " +
                          std::to_string(cells.size()),
                      line_no);
    CsvRow row{line_no, {}};
    for (std::size_t k = 0; k < columns.size(); ++k)
      row.values.push_back(parse_number(cells[index[k]], columns[k], line_no));
    rows.push_back(std::move(row));
  }
  if (index.empty()) throw DataError(path.string() + ": empty file, header expected");
  return rows;
}

double unit_demand(const MarketConstants& constants, double price) {
  const ModelParams unit(constants, 1.0, 1.0);
  return demand_at(DemandSide::closed_form(unit), 0.0, price);
}

double unit_supply(const MarketConstants& constants, double price) {
  const ModelParams unit(constants, 1.0, 1.0);
  return supply_at(SupplySide::closed_form(unit), 0.0, price);
}

}  // namespace

void CalibrationSeries::validate() const {
  if (years.size() < kMinYears)
    throw DataError("insufficient records: " + std::to_string(years.size()) +
                    " yearly rows, at least " + std::to_string(kMinYears) + " required");
  for (std::size_t i = 0; i < years.size(); ++i) {
    const auto& y = years[i];
    const auto where = "year " + std::to_string(y.year) + ": ";
    if (!(y.firm_count > 0)) throw DataError(where + "firm_count must be positive", y.line);
    if (!(y.total_revenue > 0)) throw DataError(where + "total_revenue must be positive", y.line);
    if (!(y.births >= 0)) throw DataError(where + "births must be non-negative", y.line);
    if (!(y.entrant_revenue_mean > 0))
      throw DataError(where + "entrant_revenue_mean must be positive", y.line);
    if (i > 0 && y.year != years[i - 1].year + 1)
      throw DataError(where + "years must be consecutive", y.line);
  }
  for (const auto& b : sizes) {
    if (!(b.size > 0)) throw DataError("size bucket must be positive", b.line);
    if (!(b.provider_count > 0)) throw DataError("provider_count must be positive", b.line);
  }
}

RateEstimates estimate_rates(const CalibrationSeries& series) {
  series.validate();
  const auto& ys = series.years;

  double log_birth = 0;
  double log_entrant = 0;
  for (const auto& y : ys) {
    log_birth += std::log1p(y.births / y.firm_count);
    log_entrant += std::log(y.entrant_revenue_mean);
  }

  double log_growth = 0;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const double incumbent = ys[i].total_revenue - ys[i].births * ys[i].entrant_revenue_mean;
    if (!(incumbent > 0))
      throw DataError("year " + std::to_string(ys[i].year) +
                          ": entrant revenue exceeds total revenue, incumbent revenue is non-positive",
                      ys[i].line);
    log_growth += std::log(incumbent / ys[i - 1].total_revenue);
  }

  const auto count = static_cast<double>(ys.size());
  return RateEstimates{std::expm1(log_growth / (count - 1)), std::expm1(log_birth / count),
                       std::exp(log_entrant / count)};
}

ZipfFit fit_zipf(std::span<const SizeBucket> histogram) {
  if (histogram.size() < kMinBuckets)
    throw DataError("Zipf fit needs at least " + std::to_string(kMinBuckets) + " buckets");
  // With the slope fixed at -1 the least-squares intercept is the mean of log(count * size).
  double sum = 0;
  for (const auto& b : histogram) {
    if (!(b.size > 0) || !(b.provider_count > 0))
      throw DataError("Zipf fit needs positive sizes and counts", b.line);
    sum += std::log(b.provider_count * b.size);
  }
  const double log_g0 = sum / static_cast<double>(histogram.size());
  double squares = 0;
  for (const auto& b : histogram) {
    const double r = std::log(b.provider_count * b.size) - log_g0;
    squares += r * r;
  }
  return {std::exp(log_g0), std::sqrt(squares / static_cast<double>(histogram.size()))};
}

Normalizations anchor_normalizations(const MarketConstants& constants,
                                     const AnchorConditions& anchors) {
  constants.validate();
  if (!(anchors.served0 > 0) || !std::isfinite(anchors.served0))
    throw DomainError("anchor: served clients must be positive");
  if (!(anchors.price0 > constants.n * (constants.c - constants.delta_c)) ||
      !(anchors.price0 <= constants.n * constants.c))
    throw DomainError("anchor: price must lie in (n(c - delta_c), n c]");
  // Both curves are linear in their normalization.
  return {anchors.served0 / unit_demand(constants, anchors.price0),
          anchors.served0 / unit_supply(constants, anchors.price0)};
}

ModelParams anchored_params(const MarketConstants& constants, const AnchorConditions& anchors) {
  const auto norm = anchor_normalizations(constants, anchors);
  ModelParams out(constants, norm.F0, norm.g0);
  out.validate();
  return out;
}

ModelParams anchored_params_with_g0(const MarketConstants& constants, double g0, double price0) {
  if (!(g0 > 0)) throw DomainError("anchor: g0 must be positive");
  constants.validate();
  const double served = g0 * unit_supply(constants, price0);
  return anchored_params(constants, {served, price0});
}

double derive_v(double sga_share, double savings_rate) {
  if (!(sga_share >= 0 && sga_share <= 1) || !(savings_rate >= 0 && savings_rate <= 1))
    throw DomainError("derive_v: both fractions must lie in [0, 1]");
  return sga_share * savings_rate;
}

CalibrationSeries load_series(const std::filesystem::path& path) {
  const auto rows = read_columns(
      path, {"year", "firm_count", "total_revenue", "births", "entrant_revenue_mean"});
  CalibrationSeries series;
  for (const auto& row : rows) {
    const double year = row.values[0];
    if (year != std::floor(year)) throw DataError("year must be an integer", row.line);
    series.years.push_back({static_cast<int>(year), row.values[1], row.values[2], row.values[3],
                            row.values[4], row.line});
  }
  series.validate();
  return series;
}

std::vector<SizeBucket> load_sizes(const std::filesystem::path& path) {
  const auto rows = read_columns(path, {"size", "provider_count"});
  std::vector<SizeBucket> out;
  for (const auto& row : rows) {
    if (!(row.values[0] > 0)) throw DataError("size must be positive", row.line);
    if (!(row.values[1] > 0)) throw DataError("provider_count must be positive", row.line);
    out.push_back({row.values[0], row.values[1], row.line});
  }
  if (out.size() < kMinBuckets)
    throw DataError(path.string() + ": insufficient size buckets");
  return out;
}

MarketConstants german_constants() {
  MarketConstants k;
  k.v = derive_v(0.25, 0.10);
  k.n = 1;
  k.c = 50000;
  k.delta_c = 25000;
  k.beta = 0.0002;
  k.psi = 0.036;
  k.mu = 0.05;
  k.alpha = 0.073;
  k.r_m = 1.3e6;
  return k;
}

AnchorConditions german_anchors() { return {7500.0, 37000.0}; }

}  // namespace mcmarket
