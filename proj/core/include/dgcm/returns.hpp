#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dgcm/panel.hpp"

namespace dgcm {

/// Parsed price file: strictly increasing ISO-8601 dates and one optional
/// (possibly absent on holidays) price per series per date.
struct PriceTable {
    std::vector<std::string> dates;
    std::vector<std::string> series_names;
    /// prices[series][row]; absent on exchange holidays.
    std::vector<std::vector<std::optional<double>>> prices;
};

/// Reads an RFC-4180 CSV with a header row. `date_column` names the date
/// column (empty means the first column); every other column is a series.
/// Rows where every series is absent are dropped. Throws CsvParseError
/// with the offending row/column on malformed input.
PriceTable parse_prices_csv(const std::string& path, const std::string& date_column = "");

/// Daily log returns after holiday interpolation; dates[i] labels return
/// i+1 of n (the later day of each consecutive pair).
struct ReturnsTable {
    std::vector<std::string> dates;
    std::vector<std::string> series_names;
    std::vector<std::vector<double>> returns;  // [series][0..n-1]
    int n = 0;
};

/// Log returns log(p_t / p_{t-1}) for each series. A return slot missing
/// because a price is absent is filled by linear interpolation between the
/// nearest available returns (copied flat at the edges). Throws DataError
/// on non-positive prices or a series with no computable return.
ReturnsTable to_log_returns(const PriceTable& table);

/// The gap-filling rule used by to_log_returns: unavailable slots are
/// linearly interpolated between the nearest available neighbors, flat at
/// the edges. At least one slot must be available.
void interpolate_missing(std::vector<double>& values, const std::vector<bool>& available);

/// Assigns one named return series to a role.
struct SeriesBinding {
    SeriesRole role;
    std::string name;   // column name in the data file
    std::string label;  // panel label; defaults to name when empty
};

/// Panel over the return series named by the bindings.
TimeSeriesPanel bind_panel(const ReturnsTable& table,
                           const std::vector<SeriesBinding>& bindings);

struct IngestSchema {
    std::string date_column;  // empty: first column
    std::vector<SeriesBinding> bindings;
};

/// parse + log returns + role binding in one step.
TimeSeriesPanel ingest_csv(const std::string& path, const IngestSchema& schema);

}  // namespace dgcm
