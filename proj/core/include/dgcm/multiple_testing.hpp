#pragma once

#include <vector>

namespace dgcm {

/// Benjamini-Hochberg step-up adjustment: with p-values sorted ascending,
/// the k-th adjusted value is min over k' >= k of min(1, p_(k') * m / k'),
/// reported back in the original order. Inputs must lie in (0, 1].
std::vector<double> bh_adjust(const std::vector<double>& p_values);

}  // namespace dgcm
