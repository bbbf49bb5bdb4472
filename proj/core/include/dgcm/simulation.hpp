#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dgcm/engine.hpp"
#include "dgcm/panel.hpp"
#include "dgcm/rng.hpp"

namespace dgcm {

/// Built-in synthetic processes.
///
/// correlated_shocks: covariate tvAR(1), nonlinear time-varying regressions
/// of X and Y on Z, heteroskedastic tvAR(1) errors whose shocks share
/// correlation `coupling`; null holds at coupling == 0.
///
/// additive_effect: X and Y share one regression function on Z and Y gains
/// `coupling` times X additively; null holds at coupling == 0.
///
/// indep_trend: X and Y are time-varying trends of complexity `complexity`
/// plus scaled tvAR(1) errors with shock correlation `coupling`; no
/// covariate process.
enum class DgpFamily { correlated_shocks, additive_effect, indep_trend };

struct DgpSpec {
    DgpFamily family = DgpFamily::correlated_shocks;
    int complexity = 1;      // regression complexity K, or trend complexity
    double coupling = 0.0;   // shock correlation in [-1,1], or effect size
};

/// Recursions start at zero and this many steps are discarded before the
/// n emitted observations; parameter curves are evaluated at rescaled time
/// zero during the burn-in.
inline constexpr int kDgpBurnIn = 200;

/// One realization of length n. Throws DomainError for invalid parameters.
TimeSeriesPanel generate(const DgpSpec& dgp, int n, SplitRng& rng);

/// True regression / mean curves of the processes above, used by oracle
/// runs and by tests.
double correlated_shocks_f(int k, double z, double u);
double correlated_shocks_g(int k, double z, double u);
double additive_effect_f(int k, double z, double u);
double trend_mean_x(int complexity, double u);
double trend_mean_y(int complexity, double u);

/// Time-varying AR(1) driven by freshly drawn standard normal shocks:
/// x_t = theta(t/n) x_{t-1} + shock_t, started at zero with `burn_in`
/// discarded steps (curve evaluated at zero during burn-in).
std::vector<double> tvar1_path(const std::function<double(double)>& theta, int n,
                               int burn_in, SplitRng& rng);

struct ReplicationPlan {
    std::vector<int> n_values{250, 500, 750, 1000};
    int replications = 100;
    std::uint64_t base_seed = 0;
    TestConfig test{};        // per-replication seeds are derived, not test.seed
    SieveStrategy sieve{};    // ignored in oracle mode
    LagWindowStrategy lag{};
    /// Run with the true regression/mean functions instead of fitting.
    bool oracle = false;
    int threads = 1;
};

struct RateCell {
    DgpSpec dgp;
    int n = 0;
    bool oracle = false;
    int replications = 0;
    int rejections = 0;
    int failures = 0;
    double rate = 0.0;       // rejections / completed replications
    double std_error = 0.0;  // binomial standard error of the rate
};

/// Empirical rejection rate for every (dgp, n) cell in the grid. Each
/// replication draws its generator and test seed from substreams indexed
/// by (cell, replication), so the table is identical for any thread count.
/// A replication that throws is counted as a failure, not dropped.
std::vector<RateCell> rejection_rates(const ReplicationPlan& plan,
                                      const std::vector<DgpSpec>& grid);

/// The hypothesis each family's cells are tested under.
HypothesisSpec dgp_hypothesis(DgpFamily family);

/// Residual products from the true curves (the oracle path); bypasses all
/// regression fitting.
ResidualProducts oracle_residual_products(const DgpSpec& dgp,
                                          const TimeSeriesPanel& panel);

}  // namespace dgcm
