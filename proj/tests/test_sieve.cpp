#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dgcm/basis.hpp"
#include "dgcm/errors.hpp"
#include "dgcm/rng.hpp"
#include "dgcm/sieve.hpp"

using namespace dgcm;

namespace {

TimeSeriesPanel random_panel(int n, SplitRng& rng, double beta_xy = 0.0) {
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)),
        z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        z[static_cast<std::size_t>(i)] = rng.next_normal();
        x[static_cast<std::size_t>(i)] = rng.next_normal();
        y[static_cast<std::size_t>(i)] =
            beta_xy * x[static_cast<std::size_t>(i)] + rng.next_normal();
    }
    return TimeSeriesPanel(n, {{SeriesRole::X, "x", std::move(x)},
                               {SeriesRole::Y, "y", std::move(y)},
                               {SeriesRole::Z, "z", std::move(z)}});
}

SieveFit zero_fit(const EffectiveTimeRange& range) {
    return SieveFit({}, 1, 1, 1.0, TimeRemap{range.t_lo, range.t_hi},
                    Eigen::VectorXd::Zero(1));
}

}  // namespace

TEST_SUITE_BEGIN("sieve");

TEST_CASE("design with constant bases is an all-ones column") {
    SplitRng rng(1);
    const auto panel = random_panel(6, rng);
    const std::vector<int> times{1, 2, 3, 4, 5, 6};
    SieveConfig config;
    config.time_count = 1;
    config.cov_count = 1;
    const auto design =
        build_design_matrix(panel, times, {{0, 0}}, config, TimeRemap{1, 6});
    REQUIRE(design.cols() == 1);
    for (int i = 0; i < 6; ++i) CHECK(design(i, 0) == doctest::Approx(1.0));
}

TEST_CASE("design time column matches the basis evaluations") {
    SplitRng rng(2);
    const auto panel = random_panel(3, rng);
    const std::vector<int> times{1, 2, 3};
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 1;
    const TimeRemap remap{1, 3};
    const auto design = build_design_matrix(panel, times, {{0, 0}}, config, remap);
    REQUIRE(design.cols() == 2);
    for (int i = 0; i < 3; ++i) {
        const auto basis = eval_time_basis(remap.rescale(times[static_cast<std::size_t>(i)]), 2);
        CHECK(design(i, 0) == doctest::Approx(basis[0]));
        CHECK(design(i, 1) == doctest::Approx(basis[1]));
    }
}

TEST_CASE("design column order is pair-major, then time, then covariate") {
    SplitRng rng(3);
    const TimeSeriesPanel panel(5, {{SeriesRole::Z, "z1", {0.1, -0.4, 2.0, 0.3, -1.0}},
                                    {SeriesRole::Z, "z2", {1.5, 0.2, -0.7, 0.9, 0.0}}});
    const std::vector<int> times{2, 3, 4};
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 2;
    const TimeRemap remap{2, 4};
    const std::vector<ConditioningPair> pairs{{0, 0}, {1, -1}};
    const auto design = build_design_matrix(panel, times, pairs, config, remap);
    REQUIRE(design.cols() == 8);
    for (int i = 0; i < 3; ++i) {
        const int t = times[static_cast<std::size_t>(i)];
        const auto tb = eval_time_basis(remap.rescale(t), 2);
        const auto cb0 = eval_covariate_basis(panel.value(SeriesRole::Z, 0, t), 2, 1.0);
        const auto cb1 =
            eval_covariate_basis(panel.value(SeriesRole::Z, 1, t - 1), 2, 1.0);
        int col = 0;
        for (const auto& cb : {cb0, cb1}) {
            for (int l1 = 0; l1 < 2; ++l1) {
                for (int l2 = 0; l2 < 2; ++l2) {
                    CHECK(design(i, col) == doctest::Approx(tb[l1] * cb[l2]));
                    ++col;
                }
            }
        }
    }
}

TEST_CASE("least squares recovers responses in the column space") {
    const Eigen::MatrixXd design = Eigen::MatrixXd::Identity(8, 8);
    Eigen::VectorXd response(8);
    response << 1, -2, 3, 0, 5, 1, 1, -1;
    const Eigen::VectorXd beta = fit_ols(design, response);
    CHECK((design * beta - response).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("least squares identifies exact coefficients") {
    SplitRng rng(4);
    Eigen::MatrixXd design(12, 4);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 4; ++j) design(i, j) = rng.next_normal();
    }
    const Eigen::VectorXd response = 2.0 * design.col(0) + 3.0 * design.col(1);
    const Eigen::VectorXd beta = fit_ols(design, response);
    CHECK(beta[0] == doctest::Approx(2.0));
    CHECK(beta[1] == doctest::Approx(3.0));
    CHECK(std::abs(beta[2]) < 1e-10);
    CHECK(std::abs(beta[3]) < 1e-10);
}

TEST_CASE("degenerate designs are rejected") {
    Eigen::MatrixXd design(5, 2);
    design.col(0).setOnes();
    design.col(1).setOnes();  // duplicate column
    const Eigen::VectorXd response = Eigen::VectorXd::Ones(5);
    CHECK_THROWS_AS(fit_ols(design, response, 0.0), RankDeficientError);
    CHECK_NOTHROW(fit_ols(design, response, 1e-8));

    Eigen::MatrixXd wide(2, 5);
    wide.setOnes();
    CHECK_THROWS_AS(fit_ols(wide, Eigen::VectorXd::Ones(2)), UnderdeterminedError);
}

TEST_CASE("residuals are orthogonal to the design") {
    SplitRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd design(30, 5);
        Eigen::VectorXd response(30);
        for (int i = 0; i < 30; ++i) {
            response[i] = rng.next_normal();
            for (int j = 0; j < 5; ++j) design(i, j) = rng.next_normal();
        }
        const Eigen::VectorXd beta = fit_ols(design, response);
        const Eigen::VectorXd resid = response - design * beta;
        const double bound = 1e-8 * design.norm() * response.norm();
        CHECK((design.transpose() * resid).lpNorm<Eigen::Infinity>() <= bound);
    }
}

TEST_CASE("nested fits never increase the in-sample squared error") {
    SplitRng rng(6);
    const int n = 120;
    const auto panel = random_panel(n, rng);
    const EffectiveTimeRange range{1, n, n};
    std::vector<int> times(static_cast<std::size_t>(n));
    std::iota(times.begin(), times.end(), 1);
    Eigen::VectorXd response(n);
    for (int i = 0; i < n; ++i) response[i] = panel.value(SeriesRole::X, 0, i + 1);

    double previous = std::numeric_limits<double>::infinity();
    for (int count = 1; count <= 6; ++count) {
        SieveConfig config;
        config.time_count = count;
        config.cov_count = 2;
        const auto design =
            build_design_matrix(panel, times, {{0, 0}}, config, TimeRemap{1, n});
        const Eigen::VectorXd beta = fit_ols(design, response);
        const double ssr = (response - design * beta).squaredNorm();
        CHECK(ssr <= previous + 1e-10);
        previous = ssr;
    }
}

TEST_CASE("prediction basics") {
    const EffectiveTimeRange range{1, 10, 10};
    const auto zero = zero_fit(range);
    CHECK(zero.predict(4, {}) == 0.0);

    SplitRng rng(7);
    const auto panel = random_panel(40, rng);
    SieveConfig config;
    config.time_count = 3;
    config.cov_count = 3;
    const EffectiveTimeRange full{1, 40, 40};
    const auto fit =
        fit_regression(panel, full, {SeriesRole::X, 0, 0}, {{0, 0}}, config);

    // Linearity in the coefficients via superposition of two fits.
    SieveFit doubled({{0, 0}}, 3, 3, 1.0, fit.remap(), 2.0 * fit.beta());
    for (int t : {1, 13, 40}) {
        const std::vector<double> z{panel.value(SeriesRole::Z, 0, t)};
        CHECK(doubled.predict(t, z) == doctest::Approx(2.0 * fit.predict(t, z)));
    }
}

TEST_CASE("noiseless responses are reproduced by the fit") {
    SplitRng rng(8);
    const int n = 60;
    std::vector<double> z(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
    const TimeRemap remap{1, n};
    for (int i = 0; i < n; ++i) {
        z[static_cast<std::size_t>(i)] = rng.next_normal();
        const auto tb = eval_time_basis(remap.rescale(i + 1), 2);
        const auto cb = eval_covariate_basis(z[static_cast<std::size_t>(i)], 2, 1.0);
        x[static_cast<std::size_t>(i)] =
            0.5 * tb[0] * cb[0] - 1.2 * tb[1] * cb[0] + 0.7 * tb[0] * cb[1] +
            0.3 * tb[1] * cb[1];
    }
    const TimeSeriesPanel panel(n, {{SeriesRole::X, "x", x}, {SeriesRole::Z, "z", z}});
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 2;
    const EffectiveTimeRange range{1, n, n};
    const auto fit = fit_regression(panel, range, {SeriesRole::X, 0, 0}, {{0, 0}}, config);
    for (int t = 1; t <= n; ++t) {
        const std::vector<double> zt{panel.value(SeriesRole::Z, 0, t)};
        CHECK(fit.predict(t, zt) ==
              doctest::Approx(panel.value(SeriesRole::X, 0, t)).epsilon(1e-10));
    }
}

TEST_CASE("residual products multiply the two regressions' residuals") {
    const TimeSeriesPanel panel(2, {{SeriesRole::X, "x", {1, -1}},
                                    {SeriesRole::Y, "y", {2, 2}}});
    const HypothesisSpec spec({{0, 0, 0, 0}}, {}, HypothesisKind::unconditional);
    const EffectiveTimeRange range{1, 2, 2};
    std::map<ResponseKey, SieveFit> fits;
    fits.emplace(ResponseKey{SeriesRole::X, 0, 0}, zero_fit(range));
    fits.emplace(ResponseKey{SeriesRole::Y, 0, 0}, zero_fit(range));

    const auto products = residual_products(panel, spec, fits);
    REQUIRE(products.count() == 2);
    CHECK(products.values(0, 0) == doctest::Approx(2.0));
    CHECK(products.values(1, 0) == doctest::Approx(-2.0));
}

TEST_CASE("residual products are bilinear in the residuals") {
    SplitRng rng(9);
    const int n = 20;
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.next_normal();
    for (auto& v : y) v = rng.next_normal();
    auto scaled = x;
    for (auto& v : scaled) v *= 3.0;

    const EffectiveTimeRange range{1, n, n};
    const HypothesisSpec spec({{0, 0, 0, 0}}, {}, HypothesisKind::unconditional);
    std::map<ResponseKey, SieveFit> fits;
    fits.emplace(ResponseKey{SeriesRole::X, 0, 0}, zero_fit(range));
    fits.emplace(ResponseKey{SeriesRole::Y, 0, 0}, zero_fit(range));

    const TimeSeriesPanel base(n, {{SeriesRole::X, "x", x}, {SeriesRole::Y, "y", y}});
    const TimeSeriesPanel stretched(n, {{SeriesRole::X, "x", scaled},
                                        {SeriesRole::Y, "y", y}});
    const auto p1 = residual_products(base, spec, fits);
    const auto p3 = residual_products(stretched, spec, fits);
    CHECK((p3.values - 3.0 * p1.values).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("perfect fits give vanishing products") {
    SplitRng rng(10);
    const int n = 50;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = rng.next_normal();
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    const TimeRemap remap{1, n};
    for (int i = 0; i < n; ++i) {
        const auto cb = eval_covariate_basis(z[static_cast<std::size_t>(i)], 2, 1.0);
        x[static_cast<std::size_t>(i)] = 1.5 * cb[1];
        y[static_cast<std::size_t>(i)] = -0.5 + 0.25 * cb[1];
    }
    const TimeSeriesPanel panel(n, {{SeriesRole::X, "x", x},
                                    {SeriesRole::Y, "y", y},
                                    {SeriesRole::Z, "z", z}});
    const HypothesisSpec spec({{0, 0, 0, 0}}, {{0, 0}}, HypothesisKind::conditional);
    const EffectiveTimeRange range{1, n, n};
    SieveConfig config;
    config.time_count = 1;
    config.cov_count = 2;
    std::map<ResponseKey, SieveFit> fits;
    fits.emplace(ResponseKey{SeriesRole::X, 0, 0},
                 fit_regression(panel, range, {SeriesRole::X, 0, 0}, {{0, 0}}, config));
    fits.emplace(ResponseKey{SeriesRole::Y, 0, 0},
                 fit_regression(panel, range, {SeriesRole::Y, 0, 0}, {{0, 0}}, config));
    const auto products = residual_products(panel, spec, fits);
    CHECK(products.values.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("a missing fit is reported") {
    const TimeSeriesPanel panel(3, {{SeriesRole::X, "x", {1, 2, 3}},
                                    {SeriesRole::Y, "y", {1, 2, 3}}});
    const HypothesisSpec spec({{0, 0, 0, 0}}, {}, HypothesisKind::unconditional);
    std::map<ResponseKey, SieveFit> fits;
    fits.emplace(ResponseKey{SeriesRole::X, 0, 0}, zero_fit({1, 3, 3}));
    CHECK_THROWS_AS(residual_products(panel, spec, fits), MissingFitError);
}

TEST_CASE("tuples sharing a response reuse one fit") {
    SplitRng rng(11);
    const int n = 80;
    std::vector<double> x(static_cast<std::size_t>(n)), y1(static_cast<std::size_t>(n)),
        y2(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    for (auto* v : {&x, &y1, &y2, &z}) {
        for (auto& e : *v) e = rng.next_normal();
    }
    const TimeSeriesPanel panel(n, {{SeriesRole::X, "x", x},
                                    {SeriesRole::Y, "a", y1},
                                    {SeriesRole::Y, "b", y2},
                                    {SeriesRole::Z, "z", z}});
    // Two tuples share the X response (0, offset 0).
    const HypothesisSpec spec({{0, 0, 0, 0}, {0, 1, 0, 0}}, {{0, 0}},
                              HypothesisKind::conditional);
    const EffectiveTimeRange range{1, n, n};
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 2;

    const std::uint64_t before = ols_fit_count();
    std::map<ResponseKey, SieveFit> fits;
    for (const ResponseKey key : {ResponseKey{SeriesRole::X, 0, 0},
                                  ResponseKey{SeriesRole::Y, 0, 0},
                                  ResponseKey{SeriesRole::Y, 1, 0}}) {
        fits.emplace(key, fit_regression(panel, range, key, {{0, 0}}, config));
    }
    residual_products(panel, spec, fits);
    CHECK(ols_fit_count() - before == 3);  // one per distinct response
}

TEST_CASE("time-varying mean fit") {
    const EffectiveTimeRange range{1, 8, 8};
    SUBCASE("constant series reduces to the sample mean") {
        const std::vector<double> values{3, 3, 3, 3, 3, 3, 3, 3};
        const auto fit = fit_time_varying_mean(values, range, 1);
        CHECK(fit.predict(5, {}) == doctest::Approx(3.0));
    }
    SUBCASE("affine trend is recovered exactly") {
        std::vector<double> values(8);
        const TimeRemap remap{1, 8};
        for (int t = 1; t <= 8; ++t) {
            values[static_cast<std::size_t>(t - 1)] =
                1.5 + 0.75 * (2.0 * remap.rescale(t) - 1.0);
        }
        const auto fit = fit_time_varying_mean(values, range, 2);
        for (int t = 1; t <= 8; ++t) {
            CHECK(fit.predict(t, {}) ==
                  doctest::Approx(values[static_cast<std::size_t>(t - 1)]).epsilon(1e-10));
        }
    }
    SUBCASE("more basis functions than points is underdetermined") {
        const std::vector<double> values{1, 2, 3};
        CHECK_THROWS_AS(fit_time_varying_mean(values, {1, 3, 3}, 4),
                        UnderdeterminedError);
    }
}

TEST_CASE("sequential mode matches the global fit at the final time") {
    SplitRng rng(12);
    const int n = 40;
    const auto panel = random_panel(n, rng, 0.4);
    const EffectiveTimeRange range{1, n, n};
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 2;

    SieveConfig seq = config;
    seq.mode = SieveMode::sequential;
    const auto global = fit_regression(panel, range, {SeriesRole::X, 0, 0}, {{0, 0}}, config);
    const auto sequential = fit_regression(panel, range, {SeriesRole::X, 0, 0}, {{0, 0}}, seq);

    CHECK((global.beta() - sequential.beta()).lpNorm<Eigen::Infinity>() < 1e-10);
    const std::vector<double> z{panel.value(SeriesRole::Z, 0, n)};
    CHECK(sequential.predict(n, z) == doctest::Approx(global.predict(n, z)));

    // Warm-up: the first usable time has as many rows as columns; earlier
    // predictions are refused.
    CHECK(sequential.first_usable_time() == 1 + 4 - 1);
    const std::vector<double> z2{0.0};
    CHECK_THROWS_AS(sequential.predict(2, z2), OutOfRangeError);
}

TEST_CASE("sequential residual products start at the warm-up time") {
    SplitRng rng(13);
    const int n = 30;
    const auto panel = random_panel(n, rng);
    const HypothesisSpec spec({{0, 0, 0, 0}}, {{0, 0}}, HypothesisKind::conditional);
    const EffectiveTimeRange range{1, n, n};
    SieveConfig config;
    config.time_count = 2;
    config.cov_count = 2;
    config.mode = SieveMode::sequential;
    std::map<ResponseKey, SieveFit> fits;
    for (const ResponseKey key :
         {ResponseKey{SeriesRole::X, 0, 0}, ResponseKey{SeriesRole::Y, 0, 0}}) {
        fits.emplace(key, fit_regression(panel, range, key, {{0, 0}}, config));
    }
    const auto products = residual_products(panel, spec, fits);
    CHECK(products.range.t_lo == 4);
    CHECK(products.range.t_hi == n);
    CHECK(products.count() == n - 3);
}

TEST_SUITE_END();
