#include "dgcm/covariance.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "dgcm/errors.hpp"

namespace dgcm {

Eigen::MatrixXd CovariancePath::covariance(int t) const {
    if (t < t_first || t > t_last) {
        throw OutOfRangeError("time " + std::to_string(t) + " outside the path");
    }
    const Eigen::VectorXd a = generators.row(t - t_first).transpose();
    return a * a.transpose();
}

CovariancePath rolling_path(const ResidualProducts& products, int lag_window) {
    const int total = products.count();
    if (lag_window < 1 || lag_window > total) {
        throw WindowTooLargeError("lag window " + std::to_string(lag_window) +
                                  " outside [1, " + std::to_string(total) + "]");
    }
    CovariancePath path;
    path.lag_window = lag_window;
    path.t_first = products.range.t_lo + lag_window - 1;
    path.t_last = products.range.t_hi;
    const int count = path.count();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(lag_window));

    path.generators.resize(count, products.width());
    Eigen::RowVectorXd window(products.width());
    for (int i = 0; i < count; ++i) {
        window.setZero();
        for (int s = i; s < i + lag_window; ++s) window += products.values.row(s);
        path.generators.row(i) = inv_sqrt * window;
    }
    return path;
}

Eigen::MatrixXd cumulative_cov(const CovariancePath& path, int t) {
    if (t < path.t_first || t > path.t_last) {
        throw OutOfRangeError("time " + std::to_string(t) + " outside the path");
    }
    const int width = path.width();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(width, width);
    for (int i = 0; i <= t - path.t_first; ++i) {
        const Eigen::VectorXd a = path.generators.row(i).transpose();
        sum.noalias() += a * a.transpose();
    }
    return sum;
}

namespace {

/// Trace of the PSD square root of the mean squared deviation of the
/// rank-one matrices w_h w_h^T. Uses the identity
/// mean((S_h - M)^2) = mean(|w_h|^2 w_h w_h^T) - M^2 with M the mean of
/// the S_h; eigenvalues are clamped at zero before the square root.
double matrix_spread(const Eigen::MatrixXd& gens, int h_lo, int h_hi) {
    const int m = h_hi - h_lo + 1;
    const int width = static_cast<int>(gens.cols());
    if (width == 1) {
        double mean = 0.0, mean_sq = 0.0;
        for (int h = h_lo; h <= h_hi; ++h) {
            const double s = gens(h, 0) * gens(h, 0);
            mean += s;
            mean_sq += s * s;
        }
        mean /= m;
        mean_sq /= m;
        return std::sqrt(std::max(0.0, mean_sq - mean * mean));
    }
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(width, width);
    Eigen::MatrixXd mean_sq = Eigen::MatrixXd::Zero(width, width);
    for (int h = h_lo; h <= h_hi; ++h) {
        const Eigen::VectorXd w = gens.row(h).transpose();
        const Eigen::MatrixXd outer = w * w.transpose();
        mean += outer;
        mean_sq += w.squaredNorm() * outer;
    }
    mean /= m;
    mean_sq /= m;
    const Eigen::MatrixXd deviation = mean_sq - mean * mean;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(deviation);
    double trace_root = 0.0;
    for (int i = 0; i < width; ++i) {
        trace_root += std::sqrt(std::max(0.0, eig.eigenvalues()[i]));
    }
    return trace_root;
}

}  // namespace

LagWindowSelection select_lag_window(const ResidualProducts& products,
                                     const std::vector<int>& candidates, int delta) {
    if (candidates.empty()) throw InvalidCandidatesError("no lag-window candidates");
    if (delta < 0) throw InvalidCandidatesError("delta must be non-negative");
    const int H = static_cast<int>(candidates.size());
    for (int h = 0; h < H; ++h) {
        if (candidates[static_cast<std::size_t>(h)] < 1) {
            throw InvalidCandidatesError("candidate windows must be >= 1");
        }
        if (h > 0 && candidates[static_cast<std::size_t>(h)] <=
                         candidates[static_cast<std::size_t>(h - 1)]) {
            throw InvalidCandidatesError("candidate windows must be strictly increasing");
        }
    }

    LagWindowSelection sel;
    sel.candidates = candidates;
    sel.delta = delta;
    if (H == 1) {
        sel.volatility = {0.0};
        sel.chosen_index = 0;
        sel.chosen = candidates[0];
        return sel;
    }

    // Criterion times run from range start + largest candidate to the range
    // end, so every candidate is compared on one common set of times.
    const int l_max = candidates.back();
    const int t_lo = products.range.t_lo + l_max;
    const int t_hi = products.range.t_hi;
    if (t_lo > t_hi) {
        throw InvalidCandidatesError("largest candidate " + std::to_string(l_max) +
                                     " leaves no common evaluation times");
    }
    const int times = t_hi - t_lo + 1;
    const int width = products.width();

    // Prefix sums of the residual products for O(1) window sums.
    Eigen::MatrixXd prefix(products.count() + 1, width);
    prefix.row(0).setZero();
    for (int i = 0; i < products.count(); ++i) {
        prefix.row(i + 1) = prefix.row(i) + products.values.row(i);
    }

    sel.volatility.assign(static_cast<std::size_t>(H), 0.0);
    Eigen::MatrixXd gens(H, width);  // generators at one time, per candidate
    for (int ti = 0; ti < times; ++ti) {
        const int t = t_lo + ti;
        const int row_end = t - products.range.t_lo + 1;  // prefix row of time t
        for (int h = 0; h < H; ++h) {
            const int l = candidates[static_cast<std::size_t>(h)];
            gens.row(h) = (prefix.row(row_end) - prefix.row(row_end - l)) /
                          std::sqrt(static_cast<double>(l));
        }
        for (int j = 0; j < H; ++j) {
            const int h_lo = std::max(0, j - delta);
            const int h_hi = std::min(H - 1, j + delta);
            const double spread = matrix_spread(gens, h_lo, h_hi);
            auto& mv = sel.volatility[static_cast<std::size_t>(j)];
            mv = std::max(mv, spread);
        }
    }

    sel.chosen_index = 0;
    for (int j = 1; j < H; ++j) {
        if (sel.volatility[static_cast<std::size_t>(j)] <
            sel.volatility[static_cast<std::size_t>(sel.chosen_index)]) {
            sel.chosen_index = j;
        }
    }
    sel.chosen = candidates[static_cast<std::size_t>(sel.chosen_index)];
    return sel;
}

std::vector<int> default_lag_window_candidates(int n, int usable) {
    // The window must grow strictly slower than sqrt(T) for the cumulative
    // covariance to concentrate, so candidates stop at floor(sqrt(T)).
    // Larger caps let the volatility criterion drift to the top of the
    // range, where the windowed sums absorb any drift in the residual
    // products and the test loses power. An explicit candidate list
    // overrides this default.
    (void)n;
    const int cap = static_cast<int>(std::floor(std::sqrt(static_cast<double>(usable))));
    const int h_max = std::max(1, std::min(cap, usable - 1));
    std::vector<int> out(static_cast<std::size_t>(h_max));
    for (int h = 0; h < h_max; ++h) out[static_cast<std::size_t>(h)] = h + 1;
    return out;
}

}  // namespace dgcm
