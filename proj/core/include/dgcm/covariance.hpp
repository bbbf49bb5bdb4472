#pragma once

#include <Eigen/Core>

#include <vector>

#include "dgcm/sieve.hpp"

namespace dgcm {

/// Rolling lag-window covariance path of the residual products.
///
/// Only the rank-one generators are stored: row t of `generators` holds
/// a_t = L^{-1/2} * sum of the residual-product rows in the window ending
/// at t, and the covariance at t is a_t a_t^T. Keeping generators instead
/// of matrices makes Gaussian sampling exact and O(width) per time.
struct CovariancePath {
    int lag_window;  // L
    int t_first;     // first time with a full window: L + range start - 1
    int t_last;
    Eigen::MatrixXd generators;  // (t_last - t_first + 1) x width

    [[nodiscard]] int count() const { return t_first > t_last ? 0 : t_last - t_first + 1; }
    [[nodiscard]] int width() const { return static_cast<int>(generators.cols()); }

    /// Covariance matrix a_t a_t^T at time t.
    [[nodiscard]] Eigen::MatrixXd covariance(int t) const;
};

/// Windowed sums of residual products for lag-window size L in [1, count].
/// Throws WindowTooLargeError otherwise.
CovariancePath rolling_path(const ResidualProducts& products, int lag_window);

/// Running sum of the covariance path up to time t (inclusive); symmetric
/// positive semidefinite by construction.
Eigen::MatrixXd cumulative_cov(const CovariancePath& path, int t);

/// Outcome of the minimum-volatility search over candidate window sizes.
struct LagWindowSelection {
    std::vector<int> candidates;
    int delta;
    std::vector<double> volatility;  // criterion value per candidate
    int chosen_index;                // position in `candidates`
    int chosen;                      // the selected lag-window size
};

/// Minimum-volatility selection: for each candidate j, the criterion is the
/// largest (over times common to all candidates) spread of the covariance
/// estimates produced by the candidates within delta positions of j, where
/// the spread of a set of matrices is the trace of the PSD square root of
/// their mean squared deviation. Smallest criterion wins; ties go to the
/// smaller window.
LagWindowSelection select_lag_window(const ResidualProducts& products,
                                     const std::vector<int>& candidates, int delta);

/// Default candidate sizes 1, 2, ..., floor(sqrt(usable)): the window must
/// grow slower than the square root of the number of usable times, and the
/// volatility criterion settles near the top of whatever range it is
/// offered, so the cap doubles as the selector's guard rail.
std::vector<int> default_lag_window_candidates(int n, int usable);

}  // namespace dgcm
