#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dgcm/covariance.hpp"
#include "dgcm/hypothesis.hpp"
#include "dgcm/panel.hpp"
#include "dgcm/rng.hpp"
#include "dgcm/sieve.hpp"

namespace dgcm {

/// Test statistic family: largest norm along the partial-sum process, or
/// the norm of the full sum.
enum class StatFamily { max_partial_sum, full_sum };

/// Norm applied to the (scaled) sums; l2 favors dense alternatives, linf
/// sparse ones. Both coincide when a single tuple is tested.
enum class StatNorm { l2, linf };

struct StatisticKind {
    StatFamily family = StatFamily::max_partial_sum;
    StatNorm norm = StatNorm::linf;
};

struct TestConfig {
    double alpha = 0.05;
    int sims = 5000;
    std::uint64_t seed = 0;
    StatisticKind statistic{};
    int threads = 1;
};

struct RegressionDiagnostic {
    ResponseKey response;
    int time_count = 0;
    int cov_count = 0;
    bool from_cv = false;
    double cv_mse = 0.0;  // mean held-out MSE of the chosen counts
};

struct TestDiagnostics {
    int n = 0;
    EffectiveTimeRange effective{};  // usable range of the hypothesis
    int usable_lo = 0;               // first time with residuals
    int tuple_count = 0;
    int lag_window = 0;
    bool lag_window_from_search = false;
    int path_count = 0;  // times entering the statistic
    std::vector<RegressionDiagnostic> regressions;
    std::uint64_t seed = 0;
    int sims = 0;
    double alpha = 0.0;
    StatisticKind statistic{};
};

struct TestReport {
    double statistic = 0.0;
    double quantile = 0.0;
    double p_value = 1.0;
    bool reject = false;
    TestDiagnostics diagnostics;
};

/// Statistic of a residual-product (or simulated) path: rows are times in
/// order, columns are tuples. Partial sums are scaled by 1/sqrt(rows).
double statistic(const Eigen::MatrixXd& path_values, StatisticKind kind);

/// One Gaussian draw of the whole path: row t is g_t * a_t with g_t an
/// independent standard normal, so each row has covariance a_t a_t^T
/// exactly; no factorization error exists by construction.
Eigen::MatrixXd simulate_gaussian_path(const CovariancePath& path, SplitRng& rng);

struct Calibration {
    double quantile = 0.0;
    std::vector<double> sorted_statistics;
};

/// 1-based index of the order statistic used as the 1-alpha quantile:
/// ceil((1-alpha) * sims), conservative at small simulation counts.
int quantile_order_index(double alpha, int sims);

/// Monte Carlo calibration: simulates `sims` independent Gaussian paths,
/// computes the statistic of each stream-wise, and returns the empirical
/// 1-alpha quantile (1-based ceiling order statistic). Simulation r draws
/// from streams.substream(r), so results do not depend on thread count.
Calibration calibrate(const CovariancePath& path, StatisticKind kind, int sims,
                      double alpha, const SplitRng& streams, int threads = 1);

/// Add-one Monte Carlo p-value: (1 + #{sim >= observed}) / (1 + sims).
double p_value(double observed, std::span<const double> simulated);

/// How to choose the sieve basis counts: either fixed for every regression
/// or cross-validated over a grid (each regression gets its own counts).
struct SieveStrategy {
    std::optional<std::pair<int, int>> fixed_counts;
    /// Candidate (time, covariate) counts; empty means the default grid.
    std::vector<std::pair<int, int>> grid;
    int cv_gamma = 1;
    SieveMode mode = SieveMode::global;
    double ridge = 0.0;
    bool auto_ridge_fallback = false;
    double covariate_scale = 1.0;
};

/// How to choose the lag-window size: fixed, or minimum-volatility search
/// over candidates (default 1..floor(n^{3/4}), clamped to feasibility).
struct LagWindowStrategy {
    std::optional<int> fixed;
    std::optional<std::vector<int>> candidates;
    int delta = 12;
};

/// Conditional-independence test: time-varying regressions of each tested
/// response on the conditioning covariates, residual products, lag-window
/// covariance path, Gaussian calibration, decision. Deterministic given
/// config.seed.
TestReport run_dgcm(const TimeSeriesPanel& panel, const HypothesisSpec& spec,
                    const SieveStrategy& sieve, const LagWindowStrategy& lag,
                    const TestConfig& config);

/// Unconditional-independence test: identical pipeline with time-varying
/// mean fits in place of conditional-mean fits.
TestReport run_independence(const TimeSeriesPanel& panel, const HypothesisSpec& spec,
                            const SieveStrategy& sieve, const LagWindowStrategy& lag,
                            const TestConfig& config);

/// Tail of the pipeline, starting from already-computed residual products;
/// also the entry point for oracle runs where residuals come from known
/// regression functions rather than fits.
TestReport run_from_residual_products(const ResidualProducts& products,
                                      const LagWindowStrategy& lag,
                                      const TestConfig& config,
                                      TestDiagnostics diagnostics = {});

}  // namespace dgcm
