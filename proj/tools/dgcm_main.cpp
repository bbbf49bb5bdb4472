// Command-line driver: single tests, batch runs over a price file,
// synthetic rejection-rate studies, parameter selection, and p-value
// adjustment.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dgcm/batch.hpp"
#include "dgcm/covariance.hpp"
#include "dgcm/engine.hpp"
#include "dgcm/errors.hpp"
#include "dgcm/model_selection.hpp"
#include "dgcm/multiple_testing.hpp"
#include "dgcm/parallel.hpp"
#include "dgcm/returns.hpp"
#include "dgcm/simulation.hpp"

namespace {

using dgcm::Error;
using json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

dgcm::StatisticKind parse_statistic(const json& j) {
    dgcm::StatisticKind kind;
    if (j.contains("family")) {
        const std::string f = j["family"];
        if (f == "max-partial-sum") kind.family = dgcm::StatFamily::max_partial_sum;
        else if (f == "full-sum") kind.family = dgcm::StatFamily::full_sum;
        else throw dgcm::DomainError("unknown statistic family '" + f + "'");
    }
    if (j.contains("norm")) {
        const std::string n = j["norm"].is_string() ? j["norm"].get<std::string>()
                                                    : std::to_string(j["norm"].get<int>());
        if (n == "2") kind.norm = dgcm::StatNorm::l2;
        else if (n == "inf") kind.norm = dgcm::StatNorm::linf;
        else throw dgcm::DomainError("unknown statistic norm '" + n + "'");
    }
    return kind;
}

dgcm::SieveStrategy parse_sieve(const json& j) {
    dgcm::SieveStrategy s;
    if (j.contains("time_count") != j.contains("cov_count")) {
        throw dgcm::DomainError("fixed sieve counts need both time_count and cov_count");
    }
    if (j.contains("time_count")) {
        s.fixed_counts = {j["time_count"].get<int>(), j["cov_count"].get<int>()};
    }
    if (j.contains("grid_time")) {
        const auto times = j["grid_time"].get<std::vector<int>>();
        const auto covs = j.contains("grid_cov") ? j["grid_cov"].get<std::vector<int>>()
                                                 : std::vector<int>{1};
        for (int c : times) {
            for (int d : covs) s.grid.emplace_back(c, d);
        }
    }
    if (j.contains("gamma")) s.cv_gamma = j["gamma"].get<int>();
    if (j.contains("mode")) {
        const std::string m = j["mode"];
        if (m == "global") s.mode = dgcm::SieveMode::global;
        else if (m == "sequential") s.mode = dgcm::SieveMode::sequential;
        else throw dgcm::DomainError("unknown sieve mode '" + m + "'");
    }
    if (j.contains("ridge")) s.ridge = j["ridge"].get<double>();
    if (j.contains("auto_ridge_fallback")) {
        s.auto_ridge_fallback = j["auto_ridge_fallback"].get<bool>();
    }
    if (j.contains("covariate_scale")) {
        s.covariate_scale = j["covariate_scale"].get<double>();
    }
    return s;
}

dgcm::LagWindowStrategy parse_lag(const json& j) {
    dgcm::LagWindowStrategy lag;
    if (j.is_number_integer()) {
        lag.fixed = j.get<int>();
        return lag;
    }
    if (j.is_string()) {
        if (j.get<std::string>() != "auto") {
            throw dgcm::DomainError("lag_window must be an integer, \"auto\", or an object");
        }
        return lag;
    }
    if (j.contains("fixed")) lag.fixed = j["fixed"].get<int>();
    if (j.contains("delta")) lag.delta = j["delta"].get<int>();
    if (j.contains("candidates")) {
        lag.candidates = j["candidates"].get<std::vector<int>>();
    }
    return lag;
}

std::vector<dgcm::HypothesisBinding::Leg> parse_legs(const json& j) {
    std::vector<dgcm::HypothesisBinding::Leg> legs;
    for (const json& leg : j) {
        legs.push_back({leg["series"].get<std::string>(),
                        leg["offsets"].get<std::vector<int>>()});
    }
    return legs;
}

dgcm::BatchConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dgcm::IoError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw dgcm::CsvParseError("config '" + path + "': " + e.what());
    }

    dgcm::BatchConfig config;
    config.data_path = j.value("data", "");
    config.date_column = j.value("date_column", "");
    if (j.contains("alpha")) config.test.alpha = j["alpha"].get<double>();
    if (j.contains("sims")) config.test.sims = j["sims"].get<int>();
    if (j.contains("seed")) config.test.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("statistic")) config.test.statistic = parse_statistic(j["statistic"]);
    if (j.contains("sieve")) config.sieve = parse_sieve(j["sieve"]);
    if (j.contains("lag_window")) config.lag = parse_lag(j["lag_window"]);
    if (j.contains("output")) {
        config.out_csv = j["output"].value("csv", "");
        config.out_json = j["output"].value("json", "");
    }
    for (const json& h : j.value("hypotheses", json::array())) {
        dgcm::HypothesisBinding binding;
        binding.label = h.value("label", "");
        const std::string kind = h.value("kind", "conditional");
        if (kind == "conditional") binding.kind = dgcm::HypothesisKind::conditional;
        else if (kind == "unconditional") binding.kind = dgcm::HypothesisKind::unconditional;
        else throw dgcm::DomainError("unknown hypothesis kind '" + kind + "'");
        binding.x = parse_legs(h.at("x"));
        binding.y = parse_legs(h.at("y"));
        if (h.contains("z")) binding.z = parse_legs(h["z"]);
        if (binding.label.empty()) {
            binding.label = "hypothesis " + std::to_string(config.hypotheses.size() + 1);
        }
        config.hypotheses.push_back(std::move(binding));
    }
    return config;
}

json report_json(const dgcm::TestReport& report) {
    json regressions = json::array();
    for (const auto& reg : report.diagnostics.regressions) {
        regressions.push_back({{"role", dgcm::to_string(reg.response.role)},
                               {"dim", reg.response.dim},
                               {"offset", reg.response.offset},
                               {"time_count", reg.time_count},
                               {"cov_count", reg.cov_count},
                               {"from_cv", reg.from_cv},
                               {"cv_mse", reg.cv_mse}});
    }
    return json{{"statistic", report.statistic},
                {"quantile", report.quantile},
                {"p_value", report.p_value},
                {"reject", report.reject},
                {"diagnostics",
                 {{"n", report.diagnostics.n},
                  {"t_lo", report.diagnostics.effective.t_lo},
                  {"t_hi", report.diagnostics.effective.t_hi},
                  {"usable_lo", report.diagnostics.usable_lo},
                  {"tuples", report.diagnostics.tuple_count},
                  {"lag_window", report.diagnostics.lag_window},
                  {"lag_window_from_search", report.diagnostics.lag_window_from_search},
                  {"path_count", report.diagnostics.path_count},
                  {"sims", report.diagnostics.sims},
                  {"alpha", report.diagnostics.alpha},
                  {"seed", report.diagnostics.seed},
                  {"regressions", std::move(regressions)}}}};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw dgcm::IoError("cannot write '" + out_path + "'");
    out << text;
}

struct CommonOverrides {
    std::optional<double> alpha;
    std::optional<int> sims;
    std::optional<std::uint64_t> seed;
    int threads = 0;

    void apply(dgcm::TestConfig& test) const {
        if (alpha) test.alpha = *alpha;
        if (sims) test.sims = *sims;
        if (seed) test.seed = *seed;
    }
};

void add_common(CLI::App* cmd, CommonOverrides& common) {
    cmd->add_option("--alpha", common.alpha, "Significance level");
    cmd->add_option("--sims", common.sims, "Monte Carlo simulations");
    cmd->add_option("--seed", common.seed, "Base seed");
    cmd->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
}

int run_single(const std::string& config_path, const CommonOverrides& common,
               std::size_t index, const std::string& out_path,
               std::optional<dgcm::HypothesisKind> forced_kind) {
    dgcm::BatchConfig config = load_config(config_path);
    common.apply(config.test);
    if (config.hypotheses.empty()) throw dgcm::DomainError("config has no hypotheses");
    if (index >= config.hypotheses.size()) {
        throw dgcm::DomainError("hypothesis index " + std::to_string(index) +
                                " out of range");
    }
    dgcm::HypothesisBinding binding = config.hypotheses[index];
    if (forced_kind && binding.kind != *forced_kind) {
        throw dgcm::DomainError("hypothesis '" + binding.label +
                                "' does not match the subcommand's kind");
    }

    const dgcm::PriceTable prices =
        dgcm::parse_prices_csv(config.data_path, config.date_column);
    const dgcm::ReturnsTable data = dgcm::to_log_returns(prices);

    dgcm::BatchConfig single = config;
    single.hypotheses = {binding};
    single.threads = common.threads > 0 ? common.threads : dgcm::hardware_threads();
    single.test.threads = single.threads;

    // Run directly (not through run_batch) to surface full diagnostics.
    std::vector<dgcm::SeriesBinding> bindings;
    for (const auto& leg : binding.x) bindings.push_back({dgcm::SeriesRole::X, leg.series, leg.series});
    for (const auto& leg : binding.y) bindings.push_back({dgcm::SeriesRole::Y, leg.series, leg.series});
    for (const auto& leg : binding.z) bindings.push_back({dgcm::SeriesRole::Z, leg.series, leg.series});
    const dgcm::TimeSeriesPanel panel = dgcm::bind_panel(data, bindings);

    std::vector<dgcm::TupleIndex> tuples;
    for (int i = 0; i < static_cast<int>(binding.x.size()); ++i) {
        for (int a : binding.x[static_cast<std::size_t>(i)].offsets) {
            for (int j = 0; j < static_cast<int>(binding.y.size()); ++j) {
                for (int b : binding.y[static_cast<std::size_t>(j)].offsets) {
                    tuples.push_back({i, j, a, b});
                }
            }
        }
    }
    std::vector<dgcm::ConditioningPair> conditioning;
    for (int k = 0; k < static_cast<int>(binding.z.size()); ++k) {
        for (int c : binding.z[static_cast<std::size_t>(k)].offsets) {
            conditioning.push_back({k, c});
        }
    }
    const dgcm::HypothesisSpec spec(std::move(tuples), std::move(conditioning),
                                    binding.kind);

    const dgcm::TestReport report =
        binding.kind == dgcm::HypothesisKind::conditional
            ? dgcm::run_dgcm(panel, spec, single.sieve, single.lag, single.test)
            : dgcm::run_independence(panel, spec, single.sieve, single.lag, single.test);

    json out = report_json(report);
    out["hypothesis"] = binding.label;
    out["n"] = data.n;
    emit(out.dump(2) + "\n", out_path);
    return 0;
}

int run_batch_cmd(const std::string& config_path, const CommonOverrides& common,
                  const std::string& out_csv, const std::string& out_json) {
    dgcm::BatchConfig config = load_config(config_path);
    common.apply(config.test);
    config.threads = common.threads > 0 ? common.threads : dgcm::hardware_threads();
    if (!out_csv.empty()) config.out_csv = out_csv;
    if (!out_json.empty()) config.out_json = out_json;

    const auto started = std::chrono::steady_clock::now();
    const dgcm::PvalueTable table = dgcm::run_batch(config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!config.out_csv.empty()) dgcm::write_report_csv(table, config.out_csv);
    if (!config.out_json.empty()) {
        dgcm::write_report_json(table, config, elapsed, config.out_json);
    }
    if (config.out_csv.empty() && config.out_json.empty()) {
        std::cout << dgcm::report_to_csv(table);
    }
    return 0;
}

int run_simulate(const std::string& family_name, std::vector<int> n_values,
                 std::vector<int> complexities, std::vector<double> couplings, int reps,
                 const CommonOverrides& common, bool oracle, const std::string& out_csv,
                 const std::string& out_json) {
    dgcm::DgpFamily family;
    if (family_name == "correlated-shocks") family = dgcm::DgpFamily::correlated_shocks;
    else if (family_name == "additive-effect") family = dgcm::DgpFamily::additive_effect;
    else if (family_name == "indep-trend") family = dgcm::DgpFamily::indep_trend;
    else throw dgcm::DomainError("unknown family '" + family_name + "'");

    dgcm::ReplicationPlan plan;
    if (!n_values.empty()) plan.n_values = std::move(n_values);
    plan.replications = reps;
    plan.oracle = oracle;
    plan.threads = common.threads > 0 ? common.threads : dgcm::hardware_threads();
    if (common.alpha) plan.test.alpha = *common.alpha;
    if (common.sims) plan.test.sims = *common.sims;
    if (common.seed) plan.base_seed = *common.seed;

    if (complexities.empty()) complexities = {1};
    if (couplings.empty()) couplings = {0.0};
    std::vector<dgcm::DgpSpec> grid;
    for (int k : complexities) {
        for (double c : couplings) grid.push_back({family, k, c});
    }

    const auto started = std::chrono::steady_clock::now();
    const std::vector<dgcm::RateCell> cells = dgcm::rejection_rates(plan, grid);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!out_csv.empty()) dgcm::write_rates_csv(cells, out_csv);
    if (!out_json.empty()) dgcm::write_rates_json(cells, plan, elapsed, out_json);
    if (out_csv.empty() && out_json.empty()) std::cout << dgcm::rates_to_csv(cells);
    return 0;
}

int run_select_params(const std::string& config_path, const CommonOverrides& common,
                      std::size_t index, const std::string& out_path) {
    dgcm::BatchConfig config = load_config(config_path);
    common.apply(config.test);
    if (config.hypotheses.empty()) throw dgcm::DomainError("config has no hypotheses");
    if (index >= config.hypotheses.size()) {
        throw dgcm::DomainError("hypothesis index out of range");
    }
    const dgcm::HypothesisBinding& binding = config.hypotheses[index];

    const dgcm::PriceTable prices =
        dgcm::parse_prices_csv(config.data_path, config.date_column);
    const dgcm::ReturnsTable data = dgcm::to_log_returns(prices);

    std::vector<dgcm::SeriesBinding> bindings;
    for (const auto& leg : binding.x) bindings.push_back({dgcm::SeriesRole::X, leg.series, leg.series});
    for (const auto& leg : binding.y) bindings.push_back({dgcm::SeriesRole::Y, leg.series, leg.series});
    for (const auto& leg : binding.z) bindings.push_back({dgcm::SeriesRole::Z, leg.series, leg.series});
    const dgcm::TimeSeriesPanel panel = dgcm::bind_panel(data, bindings);

    std::vector<dgcm::TupleIndex> tuples;
    for (int i = 0; i < static_cast<int>(binding.x.size()); ++i) {
        for (int a : binding.x[static_cast<std::size_t>(i)].offsets) {
            for (int j = 0; j < static_cast<int>(binding.y.size()); ++j) {
                for (int b : binding.y[static_cast<std::size_t>(j)].offsets) {
                    tuples.push_back({i, j, a, b});
                }
            }
        }
    }
    std::vector<dgcm::ConditioningPair> conditioning;
    for (int k = 0; k < static_cast<int>(binding.z.size()); ++k) {
        for (int c : binding.z[static_cast<std::size_t>(k)].offsets) {
            conditioning.push_back({k, c});
        }
    }
    const dgcm::HypothesisSpec spec(tuples, conditioning, binding.kind);
    const dgcm::EffectiveTimeRange range =
        dgcm::effective_times(panel.length(), spec.offsets());
    const bool conditional = binding.kind == dgcm::HypothesisKind::conditional;

    std::vector<dgcm::ResponseKey> keys;
    for (const dgcm::TupleIndex& m : spec.tuples()) {
        keys.push_back({dgcm::SeriesRole::X, m.x_dim, m.x_offset});
        keys.push_back({dgcm::SeriesRole::Y, m.y_dim, m.y_offset});
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<std::pair<int, int>> grid = config.sieve.grid;
    if (grid.empty()) {
        grid = conditional ? dgcm::default_cv_grid() : dgcm::default_time_cv_grid();
    }
    dgcm::SieveConfig base;
    base.mode = config.sieve.mode;
    base.ridge = config.sieve.ridge;
    base.auto_ridge_fallback = config.sieve.auto_ridge_fallback;
    base.covariate_scale = config.sieve.covariate_scale;

    const std::vector<dgcm::CvSelection> selections = dgcm::cross_validate_many(
        panel, keys, conditional ? spec.conditioning() : std::vector<dgcm::ConditioningPair>{},
        range, grid, config.sieve.cv_gamma, base);

    json reg = json::array();
    std::map<dgcm::ResponseKey, dgcm::SieveFit> fits;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        json candidates = json::array();
        for (const auto& cand : selections[i].table) {
            candidates.push_back({{"time_count", cand.time_count},
                                  {"cov_count", cand.cov_count},
                                  {"mean_mse", cand.skipped ? json() : json(cand.mean_mse)},
                                  {"skipped", cand.skipped},
                                  {"note", cand.note}});
        }
        reg.push_back({{"role", dgcm::to_string(keys[i].role)},
                       {"dim", keys[i].dim},
                       {"offset", keys[i].offset},
                       {"time_count", selections[i].time_count},
                       {"cov_count", selections[i].cov_count},
                       {"mean_mse", selections[i].mean_mse},
                       {"candidates", std::move(candidates)}});

        dgcm::SieveConfig cfg = base;
        cfg.time_count = selections[i].time_count;
        cfg.cov_count = selections[i].cov_count;
        if (conditional) {
            fits.emplace(keys[i], dgcm::fit_regression(panel, range, keys[i],
                                                       spec.conditioning(), cfg));
        } else {
            std::vector<double> values(static_cast<std::size_t>(range.count));
            for (int t = 0; t < range.count; ++t) {
                values[static_cast<std::size_t>(t)] =
                    dgcm::response_value(panel, range.t_lo + t, keys[i].role, keys[i].dim,
                                         keys[i].offset);
            }
            fits.emplace(keys[i], dgcm::fit_time_varying_mean(values, range,
                                                              cfg.time_count));
        }
    }

    const dgcm::ResidualProducts products = dgcm::residual_products(panel, spec, fits);
    const std::vector<int> candidates =
        config.lag.candidates
            ? *config.lag.candidates
            : dgcm::default_lag_window_candidates(panel.length(), products.count());
    const dgcm::LagWindowSelection lag_sel =
        dgcm::select_lag_window(products, candidates, config.lag.delta);

    json out{{"hypothesis", binding.label},
             {"n", data.n},
             {"regressions", std::move(reg)},
             {"lag_window",
              {{"chosen", lag_sel.chosen},
               {"delta", lag_sel.delta},
               {"candidates", lag_sel.candidates.size()}}}};
    emit(out.dump(2) + "\n", out_path);
    return 0;
}

int run_bh(const std::string& input, const std::string& column,
           const std::string& out_path) {
    std::ifstream in(input);
    if (!in) throw dgcm::IoError("cannot open '" + input + "'");

    std::ostringstream result;
    if (column.empty()) {
        std::vector<double> p;
        double v = 0.0;
        while (in >> v) p.push_back(v);
        if (!in.eof()) throw dgcm::CsvParseError("'" + input + "': non-numeric entry");
        const std::vector<double> adjusted = dgcm::bh_adjust(p);
        for (double a : adjusted) {
            char buffer[64];
            auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), a);
            result << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer))
                   << '\n';
        }
    } else {
        std::string header;
        if (!std::getline(in, header)) throw dgcm::CsvParseError("empty input");
        std::vector<std::string> names;
        {
            std::istringstream hs(header);
            std::string field;
            while (std::getline(hs, field, ',')) names.push_back(field);
        }
        const auto it = std::find(names.begin(), names.end(), column);
        if (it == names.end()) throw dgcm::CsvParseError("no column '" + column + "'");
        const std::size_t col = static_cast<std::size_t>(it - names.begin());

        std::vector<std::string> lines;
        std::vector<double> p;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ls, field, ',')) fields.push_back(field);
            if (col >= fields.size()) {
                throw dgcm::CsvParseError("row lacks column '" + column + "'");
            }
            try {
                p.push_back(std::stod(fields[col]));
            } catch (const std::exception&) {
                throw dgcm::CsvParseError("not a number in column '" + column + "': '" +
                                          fields[col] + "'");
            }
            lines.push_back(line);
        }
        const std::vector<double> adjusted = dgcm::bh_adjust(p);
        result << header << ",p_bh\n";
        for (std::size_t i = 0; i < lines.size(); ++i) {
            char buffer[64];
            auto [ptr, ec] =
                std::to_chars(buffer, buffer + sizeof(buffer), adjusted[i]);
            result << lines[i] << ','
                   << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer))
                   << '\n';
        }
    }
    emit(result.str(), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dgcm: conditional and unconditional independence tests for "
                 "nonstationary time series"};
    app.require_subcommand(1);

    CommonOverrides common;
    std::string config_path, out_path, out_csv, out_json, column;
    std::size_t index = 0;

    auto* test = app.add_subcommand("test", "Run one hypothesis from a config file");
    test->add_option("config", config_path, "JSON config")->required();
    test->add_option("--index", index, "Hypothesis index within the config");
    test->add_option("--out", out_path, "Write the report here instead of stdout");
    add_common(test, common);

    auto* indep = app.add_subcommand("indep", "Run one unconditional hypothesis");
    indep->add_option("config", config_path, "JSON config")->required();
    indep->add_option("--index", index, "Hypothesis index within the config");
    indep->add_option("--out", out_path, "Write the report here instead of stdout");
    add_common(indep, common);

    auto* batch = app.add_subcommand("batch", "Run every hypothesis in a config file");
    batch->add_option("config", config_path, "JSON config")->required();
    batch->add_option("--out-csv", out_csv, "Results CSV path");
    batch->add_option("--out-json", out_json, "Results JSON path");
    add_common(batch, common);

    std::string family = "correlated-shocks";
    std::vector<int> n_values, complexities;
    std::vector<double> couplings;
    int reps = 100;
    bool oracle = false;
    auto* simulate = app.add_subcommand("simulate", "Empirical rejection rates on "
                                                    "synthetic processes");
    simulate->add_option("--family", family,
                         "correlated-shocks | additive-effect | indep-trend");
    simulate->add_option("--n", n_values, "Sample sizes (repeatable)");
    simulate->add_option("--complexity", complexities, "Complexity values (repeatable)");
    simulate->add_option("--coupling", couplings,
                         "Shock correlation or effect size (repeatable)");
    simulate->add_option("--reps", reps, "Replications per cell");
    simulate->add_flag("--oracle", oracle, "Use the true regression functions");
    simulate->add_option("--out-csv", out_csv, "Rate table CSV path");
    simulate->add_option("--out-json", out_json, "Rate table JSON path");
    add_common(simulate, common);

    auto* select = app.add_subcommand("select-params",
                                      "Cross-validated basis counts and lag window");
    select->add_option("config", config_path, "JSON config")->required();
    select->add_option("--index", index, "Hypothesis index within the config");
    select->add_option("--out", out_path, "Write the report here instead of stdout");
    add_common(select, common);

    auto* bh = app.add_subcommand("bh", "Benjamini-Hochberg adjustment");
    bh->add_option("input", config_path,
                   "p-values: plain list, or CSV with --column")->required();
    bh->add_option("--column", column, "CSV column holding the raw p-values");
    bh->add_option("--out", out_path, "Write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (test->parsed()) {
            return run_single(config_path, common, index, out_path, std::nullopt);
        }
        if (indep->parsed()) {
            return run_single(config_path, common, index, out_path,
                              dgcm::HypothesisKind::unconditional);
        }
        if (batch->parsed()) return run_batch_cmd(config_path, common, out_csv, out_json);
        if (simulate->parsed()) {
            return run_simulate(family, n_values, complexities, couplings, reps, common,
                                oracle, out_csv, out_json);
        }
        if (select->parsed()) return run_select_params(config_path, common, index, out_path);
        if (bh->parsed()) return run_bh(config_path, column, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dgcm::is_numerical_error(e) ? kExitNumerical : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
