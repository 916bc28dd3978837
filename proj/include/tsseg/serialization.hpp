#ifndef TSSEG_SERIALIZATION_HPP
#define TSSEG_SERIALIZATION_HPP

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsseg/forecast.hpp"
#include "tsseg/grouping.hpp"
#include "tsseg/simulation.hpp"

namespace tsseg {

inline constexpr int kSchemaVersion = 1;

/// Versioned JSON document for a segmentation run. Indices (groups, edge
/// endpoints) are 1-based in the document; doubles round-trip exactly.
nlohmann::json segmentation_to_json(const SegmentationResult& result);
SegmentationResult segmentation_from_json(const nlohmann::json& doc);

/// x_hat as CSV, columns in group-contiguous order.
std::string xhat_to_csv(const SegmentationResult& result);

/// Rows (i, j, h, rho) for every pair i < j and |h| <= m, computed on the
/// prewhitened transformed components; feeds external correlogram plots.
std::string corr_stats_csv(const TimeSeriesMatrix& Zw, int m);

/// Forecast comparison as CSV: one row per series plus mean/sd rows,
/// one column per method and horizon.
std::string forecast_reports_to_csv(const std::vector<ForecastReport>& reports,
                                    const std::vector<std::string>& series_names);
nlohmann::json forecast_reports_to_json(const std::vector<ForecastReport>& reports,
                                        const std::vector<std::string>& series_names);

/// Monte Carlo summary table, one column per n.
std::string monte_carlo_table_csv(const std::vector<MonteCarloReport>& reports);
nlohmann::json monte_carlo_detail_json(const std::vector<MonteCarloReport>& reports,
                                       const std::string& design_name,
                                       std::uint64_t master_seed);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tsseg

#endif  // TSSEG_SERIALIZATION_HPP
