#include "dgcm/batch.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dgcm/errors.hpp"
#include "dgcm/multiple_testing.hpp"
#include "dgcm/parallel.hpp"

namespace dgcm {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double v) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string_view kind_name(HypothesisKind kind) {
    return kind == HypothesisKind::conditional ? "conditional" : "unconditional";
}

HypothesisKind kind_from(const std::string& s) {
    if (s == "conditional") return HypothesisKind::conditional;
    if (s == "unconditional") return HypothesisKind::unconditional;
    throw CsvParseError("unknown hypothesis kind '" + s + "'");
}

std::string_view family_name(DgpFamily family) {
    switch (family) {
        case DgpFamily::correlated_shocks: return "correlated-shocks";
        case DgpFamily::additive_effect: return "additive-effect";
        case DgpFamily::indep_trend: return "indep-trend";
    }
    return "?";
}

std::string_view stat_family_name(StatFamily f) {
    return f == StatFamily::max_partial_sum ? "max-partial-sum" : "full-sum";
}

std::string_view stat_norm_name(StatNorm n) { return n == StatNorm::l2 ? "2" : "inf"; }

/// Structural fingerprint of a hypothesis (kind, series, offsets; the
/// label is cosmetic). Identical hypotheses draw identical Monte Carlo
/// streams, so their p-values agree within one batch.
std::uint64_t binding_fingerprint(const HypothesisBinding& h) {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix_byte = [&](unsigned char b) { hash = (hash ^ b) * 1099511628211ULL; };
    auto mix_int = [&](long long v) {
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(v >> (8 * i)));
    };
    auto mix_string = [&](const std::string& s) {
        for (char c : s) mix_byte(static_cast<unsigned char>(c));
        mix_byte(0xff);
    };
    mix_int(h.kind == HypothesisKind::conditional ? 1 : 2);
    for (const auto* legs : {&h.x, &h.y, &h.z}) {
        mix_byte(0xfe);
        for (const auto& leg : *legs) {
            mix_string(leg.series);
            for (int o : leg.offsets) mix_int(o);
        }
    }
    return hash;
}

/// Builds the per-hypothesis panel and spec from the named series.
std::pair<TimeSeriesPanel, HypothesisSpec> instantiate(const ReturnsTable& data,
                                                       const HypothesisBinding& h) {
    std::vector<SeriesBinding> bindings;
    auto add_role = [&](const std::vector<HypothesisBinding::Leg>& legs, SeriesRole role) {
        for (const auto& leg : legs) {
            if (leg.offsets.empty()) {
                throw DomainError("hypothesis '" + h.label + "': series '" + leg.series +
                                  "' has no offsets");
            }
            bindings.push_back({role, leg.series, leg.series});
        }
    };
    add_role(h.x, SeriesRole::X);
    add_role(h.y, SeriesRole::Y);
    add_role(h.z, SeriesRole::Z);
    TimeSeriesPanel panel = bind_panel(data, bindings);

    std::vector<TupleIndex> tuples;
    for (int i = 0; i < static_cast<int>(h.x.size()); ++i) {
        for (int a : h.x[static_cast<std::size_t>(i)].offsets) {
            for (int j = 0; j < static_cast<int>(h.y.size()); ++j) {
                for (int b : h.y[static_cast<std::size_t>(j)].offsets) {
                    tuples.push_back({i, j, a, b});
                }
            }
        }
    }
    std::vector<ConditioningPair> conditioning;
    for (int k = 0; k < static_cast<int>(h.z.size()); ++k) {
        for (int c : h.z[static_cast<std::size_t>(k)].offsets) {
            conditioning.push_back({k, c});
        }
    }
    return {std::move(panel), HypothesisSpec(std::move(tuples), std::move(conditioning),
                                             h.kind)};
}

ordered_json config_json(const BatchConfig& config) {
    ordered_json sieve;
    if (config.sieve.fixed_counts) {
        sieve["time_count"] = config.sieve.fixed_counts->first;
        sieve["cov_count"] = config.sieve.fixed_counts->second;
    } else {
        ordered_json grid = ordered_json::array();
        for (const auto& cd : config.sieve.grid) grid.push_back({cd.first, cd.second});
        sieve["grid"] = std::move(grid);  // empty means the default grid
        sieve["gamma"] = config.sieve.cv_gamma;
    }
    sieve["mode"] =
        config.sieve.mode == SieveMode::global ? "global" : "sequential";
    sieve["ridge"] = config.sieve.ridge;
    sieve["auto_ridge_fallback"] = config.sieve.auto_ridge_fallback;
    sieve["covariate_scale"] = config.sieve.covariate_scale;

    ordered_json lag;
    if (config.lag.fixed) {
        lag["fixed"] = *config.lag.fixed;
    } else {
        lag["delta"] = config.lag.delta;
        if (config.lag.candidates) lag["candidates"] = *config.lag.candidates;
    }

    return ordered_json{{"data", config.data_path},
                        {"date_column", config.date_column},
                        {"alpha", config.test.alpha},
                        {"sims", config.test.sims},
                        {"seed", config.test.seed},
                        {"statistic",
                         {{"family", stat_family_name(config.test.statistic.family)},
                          {"norm", stat_norm_name(config.test.statistic.norm)}}},
                        {"sieve", std::move(sieve)},
                        {"lag_window", std::move(lag)},
                        {"threads", config.threads},
                        {"hypotheses", config.hypotheses.size()}};
}

}  // namespace

std::string_view library_version() { return "0.1.0"; }

PvalueTable run_batch(const BatchConfig& config, const ReturnsTable& data) {
    if (config.hypotheses.empty()) throw DomainError("batch has no hypotheses");

    PvalueTable table;
    table.rows.resize(config.hypotheses.size());
    const SplitRng root(config.test.seed);

    parallel_for(0, static_cast<int>(config.hypotheses.size()), config.threads,
                 [&](int i) {
        const HypothesisBinding& h = config.hypotheses[static_cast<std::size_t>(i)];
        PvalueRow& row = table.rows[static_cast<std::size_t>(i)];
        row.label = h.label;
        row.kind = h.kind;
        row.seed = root.substream(binding_fingerprint(h)).next_u64();
        try {
            auto [panel, spec] = instantiate(data, h);
            TestConfig test = config.test;
            test.seed = row.seed;
            test.threads = 1;
            const TestReport report =
                h.kind == HypothesisKind::conditional
                    ? run_dgcm(panel, spec, config.sieve, config.lag, test)
                    : run_independence(panel, spec, config.sieve, config.lag, test);
            row.statistic = report.statistic;
            row.quantile = report.quantile;
            row.p_raw = report.p_value;
            row.reject = report.reject;
        } catch (const Error& e) {
            row.error = e.what();
        }
    });

    // Adjust the raw p-values of the hypotheses that completed.
    std::vector<double> raw;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!table.rows[i].failed()) {
            raw.push_back(table.rows[i].p_raw);
            where.push_back(i);
        }
    }
    if (!raw.empty()) {
        const std::vector<double> adjusted = bh_adjust(raw);
        for (std::size_t k = 0; k < where.size(); ++k) {
            table.rows[where[k]].p_bh = adjusted[k];
        }
    }
    return table;
}

PvalueTable run_batch(const BatchConfig& config) {
    const PriceTable prices = parse_prices_csv(config.data_path, config.date_column);
    const ReturnsTable data = to_log_returns(prices);
    return run_batch(config, data);
}

std::string report_to_csv(const PvalueTable& table) {
    std::ostringstream out;
    out << "hypothesis,kind,statistic,quantile,p_raw,p_bh,reject,seed,error\n";
    for (const PvalueRow& row : table.rows) {
        out << csv_escape(row.label) << ',' << kind_name(row.kind) << ',';
        if (row.failed()) {
            out << ",,,,," << row.seed << ',' << csv_escape(row.error) << '\n';
        } else {
            out << format_number(row.statistic) << ',' << format_number(row.quantile)
                << ',' << format_number(row.p_raw) << ',' << format_number(row.p_bh)
                << ',' << (row.reject ? "true" : "false") << ',' << row.seed << ",\n";
        }
    }
    return out.str();
}

PvalueTable report_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw CsvParseError("empty report");

    auto split = [](const std::string& record) {
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < record.size(); ++i) {
            const char c = record[i];
            if (quoted) {
                if (c == '"' && i + 1 < record.size() && record[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        fields.push_back(std::move(field));
        return fields;
    };

    PvalueTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line);
        if (f.size() != 9) throw CsvParseError("report row with " +
                                               std::to_string(f.size()) + " fields");
        PvalueRow row;
        row.label = f[0];
        row.kind = kind_from(f[1]);
        row.error = f[8];
        row.seed = std::stoull(f[7]);
        if (!row.failed()) {
            row.statistic = std::stod(f[2]);
            row.quantile = std::stod(f[3]);
            row.p_raw = std::stod(f[4]);
            row.p_bh = std::stod(f[5]);
            row.reject = f[6] == "true";
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

void write_report_csv(const PvalueTable& table, const std::string& path) {
    write_file(path, report_to_csv(table));
}

std::string report_to_json(const PvalueTable& table, const BatchConfig& config,
                           double elapsed_seconds) {
    ordered_json results = ordered_json::array();
    for (const PvalueRow& row : table.rows) {
        ordered_json r{{"hypothesis", row.label}, {"kind", kind_name(row.kind)}};
        if (row.failed()) {
            r["error"] = row.error;
        } else {
            r["statistic"] = row.statistic;
            r["quantile"] = row.quantile;
            r["p_raw"] = row.p_raw;
            r["p_bh"] = row.p_bh;
            r["reject"] = row.reject;
        }
        r["seed"] = row.seed;
        results.push_back(std::move(r));
    }
    ordered_json doc{{"metadata",
                      {{"version", library_version()},
                       {"config", config_json(config)},
                       {"elapsed_seconds", elapsed_seconds}}},
                     {"results", std::move(results)}};
    return doc.dump(2) + "\n";
}

void write_report_json(const PvalueTable& table, const BatchConfig& config,
                       double elapsed_seconds, const std::string& path) {
    write_file(path, report_to_json(table, config, elapsed_seconds));
}

std::string rates_to_csv(const std::vector<RateCell>& cells) {
    std::ostringstream out;
    out << "family,n,complexity,coupling,mode,replications,rejections,failures,rate,"
           "std_error\n";
    for (const RateCell& cell : cells) {
        out << family_name(cell.dgp.family) << ',' << cell.n << ',' << cell.dgp.complexity
            << ',' << format_number(cell.dgp.coupling) << ','
            << (cell.oracle ? "oracle" : "sieve") << ',' << cell.replications << ','
            << cell.rejections << ',' << cell.failures << ',' << format_number(cell.rate)
            << ',' << format_number(cell.std_error) << '\n';
    }
    return out.str();
}

void write_rates_csv(const std::vector<RateCell>& cells, const std::string& path) {
    write_file(path, rates_to_csv(cells));
}

std::string rates_to_json(const std::vector<RateCell>& cells, const ReplicationPlan& plan,
                          double elapsed_seconds) {
    ordered_json rows = ordered_json::array();
    for (const RateCell& cell : cells) {
        rows.push_back({{"family", family_name(cell.dgp.family)},
                        {"n", cell.n},
                        {"complexity", cell.dgp.complexity},
                        {"coupling", cell.dgp.coupling},
                        {"mode", cell.oracle ? "oracle" : "sieve"},
                        {"replications", cell.replications},
                        {"rejections", cell.rejections},
                        {"failures", cell.failures},
                        {"rate", cell.rate},
                        {"std_error", cell.std_error}});
    }
    ordered_json doc{
        {"metadata",
         {{"version", library_version()},
          {"burn_in", kDgpBurnIn},
          {"base_seed", plan.base_seed},
          {"alpha", plan.test.alpha},
          {"sims", plan.test.sims},
          {"replications", plan.replications},
          {"oracle", plan.oracle},
          {"statistic",
           {{"family", stat_family_name(plan.test.statistic.family)},
            {"norm", stat_norm_name(plan.test.statistic.norm)}}},
          {"elapsed_seconds", elapsed_seconds}}},
        {"rates", std::move(rows)}};
    return doc.dump(2) + "\n";
}

void write_rates_json(const std::vector<RateCell>& cells, const ReplicationPlan& plan,
                      double elapsed_seconds, const std::string& path) {
    write_file(path, rates_to_json(cells, plan, elapsed_seconds));
}

}  // namespace dgcm
