#include "dgcm/simulation.hpp"

#include <cmath>
#include <string>

#include "dgcm/errors.hpp"
#include "dgcm/parallel.hpp"

namespace dgcm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double clamp_unit(double u) { return std::min(1.0, std::max(0.0, u)); }

void validate(const DgpSpec& dgp) {
    if (dgp.complexity < 1) throw DomainError("complexity parameter must be >= 1");
    if (dgp.family != DgpFamily::additive_effect &&
        !(dgp.coupling >= -1.0 && dgp.coupling <= 1.0)) {
        throw DomainError("shock correlation must lie in [-1,1]");
    }
}

}  // namespace

double correlated_shocks_f(int k, double z, double u) {
    return (0.5 + 0.25 * std::cos(kTwoPi * u)) * std::exp(-z * z) * std::sin(k * z);
}

double correlated_shocks_g(int k, double z, double u) {
    return (0.3 + 0.15 * std::sin(kPi * u)) * std::exp(-z * z) * std::cos(k * z);
}

double additive_effect_f(int k, double z, double u) {
    return (0.4 + 0.2 * std::sin(kTwoPi * u)) * std::exp(-z * z) * std::sin(k * z);
}

double trend_mean_x(int complexity, double u) {
    return 0.5 + 0.25 * std::cos(complexity * kPi * u);
}

double trend_mean_y(int complexity, double u) {
    return 0.3 + 0.15 * std::sin(complexity * kPi * u);
}

std::vector<double> tvar1_path(const std::function<double(double)>& theta, int n,
                               int burn_in, SplitRng& rng) {
    std::vector<double> out(static_cast<std::size_t>(n));
    double state = 0.0;
    for (int t = 1 - burn_in; t <= n; ++t) {
        const double u = clamp_unit(static_cast<double>(t) / n);
        state = theta(u) * state + rng.next_normal();
        if (t >= 1) out[static_cast<std::size_t>(t - 1)] = state;
    }
    return out;
}

namespace {

TimeSeriesPanel generate_correlated_shocks(const DgpSpec& dgp, int n, SplitRng& rng) {
    const int k = dgp.complexity;
    const double rho = dgp.coupling;
    const double rho_comp = std::sqrt(1.0 - rho * rho);

    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)),
        z(static_cast<std::size_t>(n));
    double z_state = 0.0, eps_state = 0.0, xi_state = 0.0;
    for (int t = 1 - kDgpBurnIn; t <= n; ++t) {
        const double u = clamp_unit(static_cast<double>(t) / n);
        const double eta_z = rng.next_normal();
        const double g1 = rng.next_normal();
        const double g2 = rng.next_normal();
        const double eta_eps = g1;
        const double eta_xi = rho * g1 + rho_comp * g2;

        z_state = (0.35 + 0.2 * std::cos(kTwoPi * u)) * z_state + eta_z;
        eps_state = (0.4 + 0.2 * std::sin(kPi * u)) * eps_state + eta_eps;
        xi_state = (0.5 + 0.25 * std::sin(kTwoPi * u)) * xi_state + eta_xi;
        if (t < 1) continue;

        const double sigmoid = 1.0 / (1.0 + std::exp(5.0 * z_state));
        const double sigma_eps = 0.2 + (0.5 + 0.25 * std::sin(kTwoPi * u)) * sigmoid;
        const double sigma_xi = 0.5 + (0.4 + 0.2 * std::cos(kTwoPi * u)) *
                                          std::exp(-z_state * z_state) *
                                          std::sin(z_state);
        const std::size_t i = static_cast<std::size_t>(t - 1);
        z[i] = z_state;
        x[i] = correlated_shocks_f(k, z_state, u) + sigma_eps * eps_state;
        y[i] = correlated_shocks_g(k, z_state, u) + sigma_xi * xi_state;
    }
    return TimeSeriesPanel(n, {{SeriesRole::X, "X", std::move(x)},
                               {SeriesRole::Y, "Y", std::move(y)},
                               {SeriesRole::Z, "Z", std::move(z)}});
}

TimeSeriesPanel generate_additive_effect(const DgpSpec& dgp, int n, SplitRng& rng) {
    const int k = dgp.complexity;
    const double beta = dgp.coupling;

    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)),
        z(static_cast<std::size_t>(n));
    double z_state = 0.0, eps_state = 0.0, xi_state = 0.0;
    for (int t = 1 - kDgpBurnIn; t <= n; ++t) {
        const double u = clamp_unit(static_cast<double>(t) / n);
        const double eta_z = rng.next_normal();
        const double eta_eps = rng.next_normal();
        const double eta_xi = rng.next_normal();

        const double theta_e = 0.45 + 0.3 * std::sin(kTwoPi * u);
        z_state = (0.5 + 0.25 * std::cos(kPi * u)) * z_state + eta_z;
        eps_state = theta_e * eps_state + eta_eps;
        xi_state = theta_e * xi_state + eta_xi;
        if (t < 1) continue;

        const std::size_t i = static_cast<std::size_t>(t - 1);
        const double shared = additive_effect_f(k, z_state, u);
        z[i] = z_state;
        x[i] = shared + 0.3 * eps_state;
        y[i] = shared + beta * x[i] + 0.3 * xi_state;
    }
    return TimeSeriesPanel(n, {{SeriesRole::X, "X", std::move(x)},
                               {SeriesRole::Y, "Y", std::move(y)},
                               {SeriesRole::Z, "Z", std::move(z)}});
}

TimeSeriesPanel generate_indep_trend(const DgpSpec& dgp, int n, SplitRng& rng) {
    const int psi = dgp.complexity;
    const double rho = dgp.coupling;
    const double rho_comp = std::sqrt(1.0 - rho * rho);

    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    double eps_state = 0.0, xi_state = 0.0;
    for (int t = 1 - kDgpBurnIn; t <= n; ++t) {
        const double u = clamp_unit(static_cast<double>(t) / n);
        const double g1 = rng.next_normal();
        const double g2 = rng.next_normal();

        eps_state = (0.4 + 0.2 * std::sin(kPi * u)) * eps_state + g1;
        xi_state = (0.5 + 0.25 * std::sin(kTwoPi * u)) * xi_state +
                   (rho * g1 + rho_comp * g2);
        if (t < 1) continue;

        const double sigma_eps = 0.2 + (0.5 + 0.25 * std::sin(kTwoPi * u));
        const double sigma_xi = 0.5 + (0.4 + 0.2 * std::cos(kTwoPi * u));
        const std::size_t i = static_cast<std::size_t>(t - 1);
        x[i] = trend_mean_x(psi, u) + sigma_eps * eps_state;
        y[i] = trend_mean_y(psi, u) + sigma_xi * xi_state;
    }
    return TimeSeriesPanel(n, {{SeriesRole::X, "X", std::move(x)},
                               {SeriesRole::Y, "Y", std::move(y)}});
}

}  // namespace

TimeSeriesPanel generate(const DgpSpec& dgp, int n, SplitRng& rng) {
    if (n < 1) throw DomainError("sample length must be positive");
    validate(dgp);
    switch (dgp.family) {
        case DgpFamily::correlated_shocks: return generate_correlated_shocks(dgp, n, rng);
        case DgpFamily::additive_effect: return generate_additive_effect(dgp, n, rng);
        case DgpFamily::indep_trend: return generate_indep_trend(dgp, n, rng);
    }
    throw DomainError("unknown process family");
}

HypothesisSpec dgp_hypothesis(DgpFamily family) {
    if (family == DgpFamily::indep_trend) {
        return HypothesisSpec({{0, 0, 0, 0}}, {}, HypothesisKind::unconditional);
    }
    return HypothesisSpec({{0, 0, 0, 0}}, {{0, 0}}, HypothesisKind::conditional);
}

ResidualProducts oracle_residual_products(const DgpSpec& dgp,
                                          const TimeSeriesPanel& panel) {
    validate(dgp);
    const int n = panel.length();
    ResidualProducts out;
    out.range = EffectiveTimeRange{1, n, n};
    out.tuples = {{0, 0, 0, 0}};
    out.values.resize(n, 1);
    Eigen::VectorXd eps(n), xi(n);
    for (int t = 1; t <= n; ++t) {
        const double u = static_cast<double>(t) / n;
        const std::size_t i = static_cast<std::size_t>(t - 1);
        double mean_x = 0.0, mean_y = 0.0;
        switch (dgp.family) {
            case DgpFamily::correlated_shocks: {
                const double z = panel.value(SeriesRole::Z, 0, t);
                mean_x = correlated_shocks_f(dgp.complexity, z, u);
                mean_y = correlated_shocks_g(dgp.complexity, z, u);
                break;
            }
            case DgpFamily::additive_effect: {
                const double z = panel.value(SeriesRole::Z, 0, t);
                mean_x = additive_effect_f(dgp.complexity, z, u);
                mean_y = (1.0 + dgp.coupling) * additive_effect_f(dgp.complexity, z, u);
                break;
            }
            case DgpFamily::indep_trend:
                mean_x = trend_mean_x(dgp.complexity, u);
                mean_y = trend_mean_y(dgp.complexity, u);
                break;
        }
        eps[static_cast<Eigen::Index>(i)] = panel.value(SeriesRole::X, 0, t) - mean_x;
        xi[static_cast<Eigen::Index>(i)] = panel.value(SeriesRole::Y, 0, t) - mean_y;
    }
    out.values.col(0) = eps.cwiseProduct(xi);
    out.residuals.emplace(ResponseKey{SeriesRole::X, 0, 0}, std::move(eps));
    out.residuals.emplace(ResponseKey{SeriesRole::Y, 0, 0}, std::move(xi));
    return out;
}

std::vector<RateCell> rejection_rates(const ReplicationPlan& plan,
                                      const std::vector<DgpSpec>& grid) {
    if (plan.replications < 1) throw DomainError("need at least one replication");
    if (grid.empty()) throw DomainError("empty process grid");
    if (plan.n_values.empty()) throw DomainError("no sample sizes requested");

    struct Cell {
        DgpSpec dgp;
        int n;
    };
    std::vector<Cell> cells;
    for (const DgpSpec& dgp : grid) {
        validate(dgp);
        for (int n : plan.n_values) cells.push_back({dgp, n});
    }

    const int reps = plan.replications;
    const int total = static_cast<int>(cells.size()) * reps;
    // 0 = fail to reject, 1 = reject, 2 = replication failed
    std::vector<unsigned char> outcome(static_cast<std::size_t>(total), 0);
    const SplitRng root(plan.base_seed);

    parallel_for(0, total, plan.threads, [&](int item) {
        const int cell_idx = item / reps;
        const int rep = item % reps;
        const Cell& cell = cells[static_cast<std::size_t>(cell_idx)];
        const SplitRng rep_root =
            root.substream(static_cast<std::uint64_t>(cell_idx))
                .substream(static_cast<std::uint64_t>(rep));
        SplitRng gen_rng = rep_root.substream(0);

        TestConfig config = plan.test;
        config.seed = rep_root.substream(1).next_u64();
        config.threads = 1;

        try {
            const TimeSeriesPanel panel = generate(cell.dgp, cell.n, gen_rng);
            TestReport report;
            if (plan.oracle) {
                const ResidualProducts products =
                    oracle_residual_products(cell.dgp, panel);
                TestDiagnostics diag;
                diag.n = cell.n;
                diag.effective = products.range;
                report = run_from_residual_products(products, plan.lag, config, diag);
            } else {
                const HypothesisSpec spec = dgp_hypothesis(cell.dgp.family);
                report = cell.dgp.family == DgpFamily::indep_trend
                             ? run_independence(panel, spec, plan.sieve, plan.lag, config)
                             : run_dgcm(panel, spec, plan.sieve, plan.lag, config);
            }
            outcome[static_cast<std::size_t>(item)] = report.reject ? 1 : 0;
        } catch (const Error&) {
            outcome[static_cast<std::size_t>(item)] = 2;
        }
    });

    std::vector<RateCell> table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        RateCell row;
        row.dgp = cells[c].dgp;
        row.n = cells[c].n;
        row.oracle = plan.oracle;
        row.replications = reps;
        for (int r = 0; r < reps; ++r) {
            const unsigned char o =
                outcome[c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
            if (o == 1) ++row.rejections;
            if (o == 2) ++row.failures;
        }
        const int completed = reps - row.failures;
        if (completed > 0) {
            row.rate = static_cast<double>(row.rejections) / completed;
            row.std_error = std::sqrt(row.rate * (1.0 - row.rate) / completed);
        }
        table.push_back(row);
    }
    return table;
}

}  // namespace dgcm
