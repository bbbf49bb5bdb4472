#pragma once

#include <Eigen/Core>

namespace dgcm {

/// Orthonormal shifted Legendre basis on [0,1]: component l (1-based) is
/// sqrt(2l-1) * P_{l-1}(2u-1), evaluated with the three-term recurrence.
/// Throws DomainError for u outside [0,1].
Eigen::VectorXd eval_time_basis(double u, int count);

/// Compresses a real covariate into (0,1) with the algebraic map
/// z -> (z / sqrt(scale^2 + z^2) + 1) / 2; strictly increasing in z.
double map_covariate(double z, double scale);

/// Shifted Legendre basis evaluated at the compressed covariate value.
Eigen::VectorXd eval_covariate_basis(double z, int count, double scale);

}  // namespace dgcm
