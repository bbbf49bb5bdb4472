#include "dgcm/basis.hpp"

#include <cmath>
#include <string>

#include "dgcm/errors.hpp"

namespace dgcm {

namespace {

// Legendre values P_0..P_{count-1} at x in [-1,1] via
// (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}, scaled to the orthonormal
// convention on [0,1].
void shifted_legendre(double x, int count, Eigen::VectorXd& out) {
    out.resize(count);
    double prev = 1.0;
    out[0] = 1.0;
    if (count == 1) return;
    double cur = x;
    out[1] = std::sqrt(3.0) * cur;
    for (int k = 1; k + 1 < count; ++k) {
        double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        out[k + 1] = std::sqrt(2.0 * (k + 1.0) + 1.0) * cur;
    }
}

}  // namespace

Eigen::VectorXd eval_time_basis(double u, int count) {
    if (count < 1) throw DomainError("basis count must be >= 1");
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("rescaled time " + std::to_string(u) + " outside [0,1]");
    }
    Eigen::VectorXd out;
    shifted_legendre(2.0 * u - 1.0, count, out);
    return out;
}

double map_covariate(double z, double scale) {
    if (!(scale > 0.0)) throw DomainError("covariate map scale must be positive");
    if (!std::isfinite(z)) throw DomainError("covariate value must be finite");
    const double compressed = z / std::hypot(scale, z);
    return (compressed + 1.0) / 2.0;
}

Eigen::VectorXd eval_covariate_basis(double z, int count, double scale) {
    return eval_time_basis(map_covariate(z, scale), count);
}

}  // namespace dgcm
