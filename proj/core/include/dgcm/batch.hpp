#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgcm/engine.hpp"
#include "dgcm/returns.hpp"
#include "dgcm/simulation.hpp"

namespace dgcm {

/// One hypothesis over named return series. Tested tuples are the cross
/// product of the X legs' (series, offset) pairs with the Y legs'; the Z
/// legs form the conditioning set (empty for unconditional hypotheses).
struct HypothesisBinding {
    struct Leg {
        std::string series;
        std::vector<int> offsets;
    };
    std::string label;
    HypothesisKind kind = HypothesisKind::conditional;
    std::vector<Leg> x;
    std::vector<Leg> y;
    std::vector<Leg> z;
};

struct BatchConfig {
    std::string data_path;
    std::string date_column;  // empty: first column
    std::vector<HypothesisBinding> hypotheses;
    TestConfig test{};  // test.seed is the base seed; per-hypothesis seeds derive from it
    SieveStrategy sieve{};
    LagWindowStrategy lag{};
    int threads = 1;
    std::string out_csv;   // empty: do not write
    std::string out_json;  // empty: do not write
};

struct PvalueRow {
    std::string label;
    HypothesisKind kind = HypothesisKind::conditional;
    double statistic = 0.0;
    double quantile = 0.0;
    double p_raw = 0.0;
    double p_bh = 0.0;
    bool reject = false;
    std::uint64_t seed = 0;
    std::string error;  // nonempty when this hypothesis failed

    [[nodiscard]] bool failed() const { return !error.empty(); }
};

struct PvalueTable {
    std::vector<PvalueRow> rows;
};

/// Runs every hypothesis (concurrently up to config.threads), adjusts the
/// raw p-values with bh_adjust, and writes the configured outputs. A
/// hypothesis that throws is recorded as an error row; the batch
/// continues. Each hypothesis draws the seed derived from test.seed and
/// its own structure (kind, series, offsets), so output bytes depend only
/// on the config and structurally identical hypotheses report identical
/// p-values.
PvalueTable run_batch(const BatchConfig& config, const ReturnsTable& data);

/// Convenience overload ingesting config.data_path first.
PvalueTable run_batch(const BatchConfig& config);

/// CSV with columns hypothesis, kind, statistic, quantile, p_raw, p_bh,
/// reject, seed, error. Numbers are shortest round-trip decimal, so equal
/// inputs give byte-equal output.
std::string report_to_csv(const PvalueTable& table);
PvalueTable report_from_csv(const std::string& csv);
void write_report_csv(const PvalueTable& table, const std::string& path);

/// JSON mirror of the CSV plus a metadata block (version, configuration
/// echo, timings).
std::string report_to_json(const PvalueTable& table, const BatchConfig& config,
                           double elapsed_seconds);
void write_report_json(const PvalueTable& table, const BatchConfig& config,
                       double elapsed_seconds, const std::string& path);

/// Long-format rejection-rate table (one row per (process, n) cell).
std::string rates_to_csv(const std::vector<RateCell>& cells);
void write_rates_csv(const std::vector<RateCell>& cells, const std::string& path);
std::string rates_to_json(const std::vector<RateCell>& cells, const ReplicationPlan& plan,
                          double elapsed_seconds);
void write_rates_json(const std::vector<RateCell>& cells, const ReplicationPlan& plan,
                      double elapsed_seconds, const std::string& path);

std::string_view library_version();

}  // namespace dgcm
