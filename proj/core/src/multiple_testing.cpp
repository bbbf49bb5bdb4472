#include "dgcm/multiple_testing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dgcm/errors.hpp"

namespace dgcm {

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    if (m == 0) throw DomainError("no p-values to adjust");
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw DomainError("p-value " + std::to_string(p) + " outside (0,1]");
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p_values[a] < p_values[b];
    });

    std::vector<double> adjusted(m);
    double trailing_min = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double scaled =
            p_values[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
        trailing_min = std::min(trailing_min, scaled);
        // adjusted >= raw holds exactly in the mathematics; guard the last
        // ulp that p * m / m can shave off.
        adjusted[order[k]] = std::max(trailing_min, p_values[order[k]]);
    }
    return adjusted;
}

}  // namespace dgcm
