#include "dgcm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dgcm/errors.hpp"
#include "dgcm/model_selection.hpp"
#include "dgcm/parallel.hpp"

namespace dgcm {

namespace {

double norm_of(const Eigen::VectorXd& v, StatNorm norm) {
    return norm == StatNorm::linf ? v.lpNorm<Eigen::Infinity>() : v.norm();
}

}  // namespace

double statistic(const Eigen::MatrixXd& path_values, StatisticKind kind) {
    if (path_values.rows() == 0) throw DomainError("statistic of an empty path");
    if (!path_values.allFinite()) throw DomainError("non-finite path values");
    const double scale = 1.0 / std::sqrt(static_cast<double>(path_values.rows()));
    Eigen::VectorXd partial = Eigen::VectorXd::Zero(path_values.cols());
    double running_max = 0.0;
    for (Eigen::Index t = 0; t < path_values.rows(); ++t) {
        partial += path_values.row(t).transpose();
        if (kind.family == StatFamily::max_partial_sum) {
            running_max = std::max(running_max, norm_of(partial, kind.norm));
        }
    }
    if (kind.family == StatFamily::full_sum) return scale * norm_of(partial, kind.norm);
    return scale * running_max;
}

Eigen::MatrixXd simulate_gaussian_path(const CovariancePath& path, SplitRng& rng) {
    Eigen::MatrixXd draw(path.count(), path.width());
    for (int t = 0; t < path.count(); ++t) {
        draw.row(t) = rng.next_normal() * path.generators.row(t);
    }
    return draw;
}

namespace {

/// Statistic of one simulated path without materializing it.
double simulated_statistic(const CovariancePath& path, StatisticKind kind,
                           SplitRng rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(path.count()));
    Eigen::VectorXd partial = Eigen::VectorXd::Zero(path.width());
    double running_max = 0.0;
    for (int t = 0; t < path.count(); ++t) {
        partial += rng.next_normal() * path.generators.row(t).transpose();
        if (kind.family == StatFamily::max_partial_sum) {
            running_max = std::max(running_max, norm_of(partial, kind.norm));
        }
    }
    if (kind.family == StatFamily::full_sum) return scale * norm_of(partial, kind.norm);
    return scale * running_max;
}

}  // namespace

// ceil((1-alpha) * sims) computed as sims - floor(alpha * sims), with
// products that are integers up to rounding noise snapped first.
int quantile_order_index(double alpha, int sims) {
    const double cut = alpha * static_cast<double>(sims);
    double floored = std::floor(cut);
    if (std::abs(cut - std::round(cut)) < 1e-9) floored = std::round(cut);
    const int drop = static_cast<int>(floored);
    return std::clamp(sims - drop, 1, sims);
}

Calibration calibrate(const CovariancePath& path, StatisticKind kind, int sims,
                      double alpha, const SplitRng& streams, int threads) {
    if (sims < 1) throw DomainError("need at least one Monte Carlo simulation");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (path.count() == 0) throw InsufficientDataError("empty covariance path");

    Calibration cal;
    cal.sorted_statistics.assign(static_cast<std::size_t>(sims), 0.0);
    parallel_for(0, sims, threads, [&](int r) {
        cal.sorted_statistics[static_cast<std::size_t>(r)] = simulated_statistic(
            path, kind, streams.substream(static_cast<std::uint64_t>(r)));
    });
    std::sort(cal.sorted_statistics.begin(), cal.sorted_statistics.end());
    cal.quantile = cal.sorted_statistics[static_cast<std::size_t>(
        quantile_order_index(alpha, sims) - 1)];
    return cal;
}

double p_value(double observed, std::span<const double> simulated) {
    if (simulated.empty()) throw DomainError("p-value needs simulated statistics");
    std::size_t exceed = 0;
    for (double s : simulated) {
        if (s >= observed) ++exceed;
    }
    return static_cast<double>(1 + exceed) / static_cast<double>(1 + simulated.size());
}

namespace {

std::vector<ResponseKey> distinct_responses(const HypothesisSpec& spec, SeriesRole role) {
    std::vector<ResponseKey> keys;
    for (const TupleIndex& m : spec.tuples()) {
        if (role == SeriesRole::X) {
            keys.push_back({SeriesRole::X, m.x_dim, m.x_offset});
        } else {
            keys.push_back({SeriesRole::Y, m.y_dim, m.y_offset});
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

void check_panel_covers(const TimeSeriesPanel& panel, const HypothesisSpec& spec) {
    for (const TupleIndex& m : spec.tuples()) {
        if (m.x_dim < 0 || m.x_dim >= panel.dimension(SeriesRole::X) || m.y_dim < 0 ||
            m.y_dim >= panel.dimension(SeriesRole::Y)) {
            throw OutOfRangeError("hypothesis references a series the panel lacks");
        }
    }
    for (const ConditioningPair& p : spec.conditioning()) {
        if (p.z_dim < 0 || p.z_dim >= panel.dimension(SeriesRole::Z)) {
            throw OutOfRangeError("hypothesis references a Z series the panel lacks");
        }
    }
}

SieveConfig base_config(const SieveStrategy& strategy) {
    SieveConfig config;
    config.mode = strategy.mode;
    config.ridge = strategy.ridge;
    config.auto_ridge_fallback = strategy.auto_ridge_fallback;
    config.covariate_scale = strategy.covariate_scale;
    return config;
}

/// Keeps grid candidates whose final fit satisfies the minimum-sample rule
/// T >= 5 * columns.
std::vector<std::pair<int, int>> feasible_grid(std::vector<std::pair<int, int>> grid,
                                               int pair_count, int usable) {
    const int blocks = std::max(1, pair_count);
    std::erase_if(grid, [&](const std::pair<int, int>& cd) {
        return 5 * blocks * cd.first * cd.second > usable;
    });
    return grid;
}

TestReport run_pipeline(const TimeSeriesPanel& panel, const HypothesisSpec& spec,
                        const SieveStrategy& strategy, const LagWindowStrategy& lag,
                        const TestConfig& config, bool conditional) {
    check_panel_covers(panel, spec);
    const EffectiveTimeRange range = effective_times(panel.length(), spec.offsets());
    const std::vector<ConditioningPair>& pairs = spec.conditioning();
    const SieveConfig base = base_config(strategy);

    TestDiagnostics diag;
    diag.n = panel.length();
    diag.effective = range;
    diag.tuple_count = spec.tuple_count();

    std::vector<ResponseKey> keys = distinct_responses(spec, SeriesRole::X);
    {
        std::vector<ResponseKey> ykeys = distinct_responses(spec, SeriesRole::Y);
        keys.insert(keys.end(), ykeys.begin(), ykeys.end());
    }

    // Basis counts per regression: fixed, or chosen by cross-validation.
    std::vector<std::pair<int, int>> counts(keys.size());
    std::vector<RegressionDiagnostic> reg_diags(keys.size());
    const int blocks = conditional ? static_cast<int>(pairs.size()) : 1;
    if (strategy.fixed_counts) {
        const auto cd = *strategy.fixed_counts;
        const int columns = conditional ? blocks * cd.first * cd.second : cd.first;
        if (5 * columns > range.count) {
            throw InsufficientDataError(
                "need at least 5 observations per coefficient; have " +
                std::to_string(range.count));
        }
        for (std::size_t i = 0; i < keys.size(); ++i) {
            counts[i] = cd;
            reg_diags[i] = {keys[i], cd.first, cd.second, false, 0.0};
        }
    } else {
        std::vector<std::pair<int, int>> grid = strategy.grid;
        if (grid.empty()) {
            grid = conditional ? default_cv_grid() : default_time_cv_grid();
        }
        if (!conditional) {
            for (auto& cd : grid) cd.second = 1;
        }
        grid = feasible_grid(std::move(grid), blocks, range.count);
        if (grid.empty()) {
            throw InsufficientDataError("no grid candidate fits the usable sample");
        }
        const std::vector<CvSelection> selections =
            cross_validate_many(panel, keys, conditional ? pairs
                                                         : std::vector<ConditioningPair>{},
                                range, grid, strategy.cv_gamma, base);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            counts[i] = {selections[i].time_count, selections[i].cov_count};
            reg_diags[i] = {keys[i], counts[i].first, counts[i].second, true,
                            selections[i].mean_mse};
        }
    }

    std::map<ResponseKey, SieveFit> fits;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        SieveConfig cfg = base;
        cfg.time_count = counts[i].first;
        cfg.cov_count = counts[i].second;
        if (conditional) {
            fits.emplace(keys[i], fit_regression(panel, range, keys[i], pairs, cfg));
        } else {
            std::vector<double> values(static_cast<std::size_t>(range.count));
            for (int t = 0; t < range.count; ++t) {
                values[static_cast<std::size_t>(t)] = response_value(
                    panel, range.t_lo + t, keys[i].role, keys[i].dim, keys[i].offset);
            }
            fits.emplace(keys[i],
                         fit_time_varying_mean(values, range, cfg.time_count));
        }
    }

    const ResidualProducts products = residual_products(panel, spec, fits);
    diag.usable_lo = products.range.t_lo;
    diag.regressions = std::move(reg_diags);

    return run_from_residual_products(products, lag, config, std::move(diag));
}

}  // namespace

TestReport run_from_residual_products(const ResidualProducts& products,
                                      const LagWindowStrategy& lag,
                                      const TestConfig& config,
                                      TestDiagnostics diagnostics) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1)");
    }
    if (config.sims < 1) throw DomainError("need at least one Monte Carlo simulation");

    int lag_window = 0;
    if (lag.fixed) {
        lag_window = *lag.fixed;
        diagnostics.lag_window_from_search = false;
    } else {
        std::vector<int> candidates =
            lag.candidates ? *lag.candidates
                           : default_lag_window_candidates(
                                 diagnostics.n > 0 ? diagnostics.n : products.count(),
                                 products.count());
        lag_window = select_lag_window(products, candidates, lag.delta).chosen;
        diagnostics.lag_window_from_search = true;
    }

    const CovariancePath path = rolling_path(products, lag_window);
    if (path.count() < 2) {
        throw InsufficientDataError("fewer than two times enter the statistic");
    }

    if (diagnostics.usable_lo == 0) diagnostics.usable_lo = products.range.t_lo;
    if (diagnostics.tuple_count == 0) diagnostics.tuple_count = products.width();
    diagnostics.lag_window = lag_window;
    diagnostics.path_count = path.count();
    diagnostics.seed = config.seed;
    diagnostics.sims = config.sims;
    diagnostics.alpha = config.alpha;
    diagnostics.statistic = config.statistic;

    const double observed =
        statistic(products.values.bottomRows(path.count()), config.statistic);

    const SplitRng streams = SplitRng(config.seed).substream(0x6d63);  // calibration lane
    const Calibration cal = calibrate(path, config.statistic, config.sims, config.alpha,
                                      streams, config.threads);

    TestReport report;
    report.statistic = observed;
    report.quantile = cal.quantile;
    report.p_value = p_value(observed, cal.sorted_statistics);
    report.reject = observed > cal.quantile;
    report.diagnostics = std::move(diagnostics);
    return report;
}

TestReport run_dgcm(const TimeSeriesPanel& panel, const HypothesisSpec& spec,
                    const SieveStrategy& sieve, const LagWindowStrategy& lag,
                    const TestConfig& config) {
    if (spec.kind() != HypothesisKind::conditional) {
        throw DomainError("run_dgcm requires a conditional hypothesis");
    }
    return run_pipeline(panel, spec, sieve, lag, config, /*conditional=*/true);
}

TestReport run_independence(const TimeSeriesPanel& panel, const HypothesisSpec& spec,
                            const SieveStrategy& sieve, const LagWindowStrategy& lag,
                            const TestConfig& config) {
    if (spec.kind() != HypothesisKind::unconditional) {
        throw DomainError("run_independence requires an unconditional hypothesis");
    }
    return run_pipeline(panel, spec, sieve, lag, config, /*conditional=*/false);
}

}  // namespace dgcm
