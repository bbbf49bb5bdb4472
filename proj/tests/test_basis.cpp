#include <doctest.h>

#include <cmath>

#include "dgcm/basis.hpp"
#include "dgcm/errors.hpp"
#include "dgcm/rng.hpp"

using namespace dgcm;

namespace {

// Plain Legendre polynomials on [-1,1] up to degree 6, written out, as an
// oracle for the recurrence.
double legendre_explicit(int degree, double x) {
    const double x2 = x * x;
    switch (degree) {
        case 0: return 1.0;
        case 1: return x;
        case 2: return (3.0 * x2 - 1.0) / 2.0;
        case 3: return (5.0 * x2 - 3.0) * x / 2.0;
        case 4: return ((35.0 * x2 - 30.0) * x2 + 3.0) / 8.0;
        case 5: return ((63.0 * x2 - 70.0) * x2 + 15.0) * x / 8.0;
        case 6: return (((231.0 * x2 - 315.0) * x2 + 105.0) * x2 - 5.0) / 16.0;
        default: return 0.0;
    }
}

}  // namespace

TEST_SUITE_BEGIN("basis");

TEST_CASE("first component is the constant function") {
    for (double u : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(eval_time_basis(u, 3)[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("degree-one component vanishes at the midpoint") {
    CHECK(eval_time_basis(0.5, 2)[1] == doctest::Approx(0.0));
}

TEST_CASE("degree-two component at u = 1") {
    // Recurrence value against the explicit polynomial: sqrt(5) P_2(1).
    const double expected = std::sqrt(5.0) * legendre_explicit(2, 1.0);
    CHECK(eval_time_basis(1.0, 3)[2] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS(eval_time_basis(-0.01, 2), DomainError);
    CHECK_THROWS_AS(eval_time_basis(1.01, 2), DomainError);
    CHECK_THROWS_AS(eval_time_basis(0.5, 0), DomainError);
}

TEST_CASE("recurrence matches the explicit polynomials up to degree 6") {
    SplitRng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const double u = rng.next_double();
        const Eigen::VectorXd basis = eval_time_basis(u, 7);
        for (int degree = 0; degree <= 6; ++degree) {
            const double expected = std::sqrt(2.0 * degree + 1.0) *
                                    legendre_explicit(degree, 2.0 * u - 1.0);
            CHECK(basis[degree] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("discrete orthonormality on a fine grid") {
    const int points = 100000;
    const int count = 5;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(count, count);
    for (int i = 0; i < points; ++i) {
        const double u = (i + 0.5) / points;  // midpoint rule
        const Eigen::VectorXd b = eval_time_basis(u, count);
        gram.noalias() += b * b.transpose();
    }
    gram /= points;
    CHECK((gram - Eigen::MatrixXd::Identity(count, count)).lpNorm<Eigen::Infinity>() <
          1e-3);
}

TEST_CASE("covariate map fixes zero at one half") {
    CHECK(map_covariate(0.0, 1.0) == doctest::Approx(0.5));
    CHECK(map_covariate(0.0, 3.5) == doctest::Approx(0.5));
}

TEST_CASE("covariate map approaches one for large values") {
    CHECK(map_covariate(1e12, 1.0) > 1.0 - 1e-9);
    CHECK(map_covariate(-1e12, 1.0) < 1e-9);
}

TEST_CASE("covariate map at z = 1 with unit scale") {
    const double expected = (1.0 / std::sqrt(2.0) + 1.0) / 2.0;  // direct formula
    CHECK(map_covariate(1.0, 1.0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(0.85355339059));
}

TEST_CASE("covariate map is strictly increasing") {
    SplitRng rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        const double scale = 0.5 + 2.0 * rng.next_double();
        double z1 = 20.0 * (rng.next_double() - 0.5);
        double z2 = 20.0 * (rng.next_double() - 0.5);
        if (z1 == z2) continue;
        if (z1 > z2) std::swap(z1, z2);
        CHECK(map_covariate(z1, scale) < map_covariate(z2, scale));
    }
}

TEST_CASE("covariate basis composes the map with the time basis") {
    CHECK(eval_covariate_basis(0.0, 2, 1.0)[1] == doctest::Approx(0.0));
    CHECK(eval_covariate_basis(-3.7, 4, 1.0)[0] == doctest::Approx(1.0));
    const Eigen::VectorXd via_map = eval_time_basis(map_covariate(1.0, 1.0), 4);
    const Eigen::VectorXd direct = eval_covariate_basis(1.0, 4, 1.0);
    for (int i = 0; i < 4; ++i) CHECK(direct[i] == via_map[i]);
}

TEST_SUITE_END();
