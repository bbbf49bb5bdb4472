#include "dgcm/returns.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dgcm/errors.hpp"

namespace dgcm {

namespace {

/// One RFC-4180 record; handles quoted fields, embedded commas/quotes and
/// newlines inside quotes. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    for (int ch = in.get(); ch != EOF; ch = in.get()) {
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(ch));
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(static_cast<char>(ch));
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

bool is_missing(const std::string& s) {
    if (s.empty()) return true;
    return s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

double parse_number(const std::string& s, int row, const std::string& column) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw CsvParseError("row " + std::to_string(row) + ", column '" + column +
                            "': not a number: '" + s + "'");
    }
    return value;
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

PriceTable parse_prices_csv(const std::string& path, const std::string& date_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::string> fields;
    if (!read_record(in, fields) || fields.empty()) {
        throw CsvParseError("'" + path + "': missing header row");
    }

    int date_col = 0;
    if (!date_column.empty()) {
        auto it = std::find(fields.begin(), fields.end(), date_column);
        if (it == fields.end()) {
            throw CsvParseError("no column named '" + date_column + "'");
        }
        date_col = static_cast<int>(it - fields.begin());
    }

    PriceTable table;
    for (int c = 0; c < static_cast<int>(fields.size()); ++c) {
        if (c != date_col) table.series_names.push_back(fields[static_cast<std::size_t>(c)]);
    }
    if (table.series_names.empty()) {
        throw CsvParseError("'" + path + "': no series columns besides the date");
    }
    table.prices.resize(table.series_names.size());

    const std::size_t width = fields.size();
    int row = 1;
    while (read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
        if (fields.size() != width) {
            throw CsvParseError("row " + std::to_string(row) + ": expected " +
                                std::to_string(width) + " fields, got " +
                                std::to_string(fields.size()));
        }
        const std::string& date = fields[static_cast<std::size_t>(date_col)];
        if (!valid_iso_date(date)) {
            throw CsvParseError("row " + std::to_string(row) + ": bad ISO date '" +
                                date + "'");
        }
        if (!table.dates.empty() && date <= table.dates.back()) {
            throw CsvParseError("row " + std::to_string(row) +
                                ": dates must be strictly increasing");
        }

        bool all_missing = true;
        std::vector<std::optional<double>> row_values;
        int series = 0;
        for (int c = 0; c < static_cast<int>(width); ++c) {
            if (c == date_col) continue;
            const std::string& cell = fields[static_cast<std::size_t>(c)];
            if (is_missing(cell)) {
                row_values.emplace_back(std::nullopt);
            } else {
                row_values.emplace_back(parse_number(
                    cell, row, table.series_names[static_cast<std::size_t>(series)]));
                all_missing = false;
            }
            ++series;
        }
        if (all_missing) continue;  // a date absent in every series is dropped
        table.dates.push_back(date);
        for (std::size_t s = 0; s < table.prices.size(); ++s) {
            table.prices[s].push_back(row_values[s]);
        }
    }
    return table;
}

void interpolate_missing(std::vector<double>& values, const std::vector<bool>& available) {
    const int n = static_cast<int>(values.size());
    if (values.size() != available.size()) {
        throw DomainError("values and availability mask differ in length");
    }
    if (std::find(available.begin(), available.end(), true) == available.end()) {
        throw DataError("no available value to interpolate from");
    }
    int t = 0;
    while (t < n) {
        if (available[static_cast<std::size_t>(t)]) {
            ++t;
            continue;
        }
        const int left = t - 1;
        int right = t;
        while (right < n && !available[static_cast<std::size_t>(right)]) ++right;
        for (int g = t; g < right; ++g) {
            if (left < 0) {
                values[static_cast<std::size_t>(g)] = values[static_cast<std::size_t>(right)];
            } else if (right >= n) {
                values[static_cast<std::size_t>(g)] = values[static_cast<std::size_t>(left)];
            } else {
                const double w =
                    static_cast<double>(g - left) / static_cast<double>(right - left);
                values[static_cast<std::size_t>(g)] =
                    (1.0 - w) * values[static_cast<std::size_t>(left)] +
                    w * values[static_cast<std::size_t>(right)];
            }
        }
        t = right;
    }
}

ReturnsTable to_log_returns(const PriceTable& table) {
    const int rows = static_cast<int>(table.dates.size());
    if (rows < 2) throw DataError("need at least two dates to form returns");
    const int n = rows - 1;

    ReturnsTable out;
    out.series_names = table.series_names;
    out.dates.assign(table.dates.begin() + 1, table.dates.end());
    out.n = n;

    for (std::size_t s = 0; s < table.prices.size(); ++s) {
        const auto& price = table.prices[s];
        for (int r = 0; r < rows; ++r) {
            if (price[static_cast<std::size_t>(r)] &&
                *price[static_cast<std::size_t>(r)] <= 0.0) {
                throw DataError("series '" + table.series_names[s] +
                                "' has a non-positive price on " +
                                table.dates[static_cast<std::size_t>(r)]);
            }
        }

        std::vector<double> returns(static_cast<std::size_t>(n), 0.0);
        std::vector<bool> available(static_cast<std::size_t>(n), false);
        int available_count = 0;
        for (int t = 0; t < n; ++t) {
            const auto& prev = price[static_cast<std::size_t>(t)];
            const auto& cur = price[static_cast<std::size_t>(t + 1)];
            if (prev && cur) {
                returns[static_cast<std::size_t>(t)] = std::log(*cur / *prev);
                available[static_cast<std::size_t>(t)] = true;
                ++available_count;
            }
        }
        if (available_count == 0) {
            throw DataError("series '" + table.series_names[s] +
                            "' has no computable return");
        }
        interpolate_missing(returns, available);
        out.returns.push_back(std::move(returns));
    }
    return out;
}

TimeSeriesPanel bind_panel(const ReturnsTable& table,
                           const std::vector<SeriesBinding>& bindings) {
    std::vector<Series> series;
    for (const SeriesBinding& b : bindings) {
        auto it = std::find(table.series_names.begin(), table.series_names.end(), b.name);
        if (it == table.series_names.end()) {
            throw DataError("no series named '" + b.name + "' in the data");
        }
        const std::size_t idx =
            static_cast<std::size_t>(it - table.series_names.begin());
        series.push_back(
            {b.role, b.label.empty() ? b.name : b.label, table.returns[idx]});
    }
    return TimeSeriesPanel(table.n, std::move(series));
}

TimeSeriesPanel ingest_csv(const std::string& path, const IngestSchema& schema) {
    const PriceTable prices = parse_prices_csv(path, schema.date_column);
    const ReturnsTable returns = to_log_returns(prices);
    return bind_panel(returns, schema.bindings);
}

}  // namespace dgcm
