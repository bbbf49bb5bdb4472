#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dgcm/hypothesis.hpp"
#include "dgcm/panel.hpp"

namespace dgcm {

/// In global mode one fit over all usable times serves every prediction;
/// in sequential mode the prediction at time t uses data up to t only.
enum class SieveMode { global, sequential };

struct SieveConfig {
    int time_count = 4;   // basis functions over rescaled time
    int cov_count = 4;    // basis functions over each covariate
    SieveMode mode = SieveMode::global;
    double ridge = 0.0;
    /// When the design is rank deficient and ridge == 0, retry with
    /// ridge = 1e-10 * trace(D^T D) / cols instead of failing.
    bool auto_ridge_fallback = false;
    double covariate_scale = 1.0;
};

/// Affine map taking rescaled time t/n onto [0,1] over the fitted range,
/// so the time basis is always evaluated on its natural domain.
struct TimeRemap {
    int t_lo;
    int t_hi;

    [[nodiscard]] double rescale(int t) const {
        if (t_hi == t_lo) return 0.5;
        return static_cast<double>(t - t_lo) / static_cast<double>(t_hi - t_lo);
    }
};

/// Identifies one regression: the response series (role, dimension) read at
/// a fixed offset.
struct ResponseKey {
    SeriesRole role;
    int dim;
    int offset;

    auto operator<=>(const ResponseKey&) const = default;
};

/// A fitted time-varying regression.
///
/// Columns of the underlying design follow the fixed order
/// (conditioning pair, time basis index l1, covariate basis index l2),
/// pairs sorted by (dimension, offset) and basis indices nested innermost;
/// `column_index` exposes the bijection. An empty conditioning set denotes
/// a time-varying mean fit whose design is the time basis alone.
class SieveFit {
public:
    SieveFit(std::vector<ConditioningPair> pairs, int time_count, int cov_count,
             double covariate_scale, TimeRemap remap, Eigen::VectorXd beta);

    /// Prediction at time t with covariate vector z ordered like the
    /// conditioning pairs. z may be empty for mean fits.
    [[nodiscard]] double predict(int t, std::span<const double> z) const;

    /// Earliest time with a usable prediction. Equals the fitted range
    /// start in global mode; in sequential mode, times before the warm-up
    /// (rows < columns) are unusable and predict() throws for them.
    [[nodiscard]] int first_usable_time() const { return first_usable_; }

    /// Coefficients of the fit (in sequential mode, at the final time).
    [[nodiscard]] const Eigen::VectorXd& beta() const { return beta_; }

    [[nodiscard]] int columns() const { return static_cast<int>(beta_.size()); }
    [[nodiscard]] int column_index(int pair, int l1, int l2) const;

    [[nodiscard]] int time_count() const { return time_count_; }
    [[nodiscard]] int cov_count() const { return cov_count_; }
    [[nodiscard]] const std::vector<ConditioningPair>& conditioning() const {
        return pairs_;
    }
    [[nodiscard]] const TimeRemap& remap() const { return remap_; }
    [[nodiscard]] double covariate_scale() const { return covariate_scale_; }

private:
    friend SieveFit fit_regression(const TimeSeriesPanel&, const EffectiveTimeRange&,
                                   const ResponseKey&,
                                   const std::vector<ConditioningPair>&,
                                   const SieveConfig&);

    [[nodiscard]] Eigen::VectorXd design_row(int t, std::span<const double> z) const;

    std::vector<ConditioningPair> pairs_;
    int time_count_;
    int cov_count_;
    double covariate_scale_;
    TimeRemap remap_;
    Eigen::VectorXd beta_;
    // Sequential mode: one coefficient row per time from the warm-up on.
    Eigen::MatrixXd betas_by_time_;
    int first_usable_;
};

/// Design matrix with one row per requested time (in the given order) and
/// one column per (pair, l1, l2) combination; entry = time basis at the
/// remapped t/n times covariate basis at the pair's value. With an empty
/// conditioning set the matrix is the time basis alone.
Eigen::MatrixXd build_design_matrix(const TimeSeriesPanel& panel,
                                    std::span<const int> times,
                                    const std::vector<ConditioningPair>& conditioning,
                                    const SieveConfig& config, const TimeRemap& remap);

/// Least squares by Householder QR, never by normal equations. With
/// ridge > 0 solves the augmented system [D; sqrt(ridge) I]. Throws
/// UnderdeterminedError when rows < cols and RankDeficientError when
/// ridge == 0 and the numerical rank falls short.
Eigen::VectorXd fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                        double ridge = 0.0);

/// Fits the response identified by `key` on the conditioning covariates
/// over the whole effective range, honoring config.mode.
SieveFit fit_regression(const TimeSeriesPanel& panel, const EffectiveTimeRange& range,
                        const ResponseKey& key,
                        const std::vector<ConditioningPair>& conditioning,
                        const SieveConfig& config);

/// Time-varying mean: regression on the time basis alone. `values` holds
/// the response over the range (values[0] at range.t_lo).
SieveFit fit_time_varying_mean(std::span<const double> values,
                               const EffectiveTimeRange& range, int time_count);

/// Residual products for every tested tuple.
struct ResidualProducts {
    /// Times covered; starts after the warm-up in sequential mode.
    EffectiveTimeRange range;
    /// Column order of `values`.
    std::vector<TupleIndex> tuples;
    /// range.count x tuples.size(); entry (t, m) is the product of the two
    /// regression residuals at time t for tuple m.
    Eigen::MatrixXd values;
    /// Per-regression residuals kept for diagnostics, aligned with range.
    std::map<ResponseKey, Eigen::VectorXd> residuals;

    [[nodiscard]] int count() const { return range.count; }
    [[nodiscard]] int width() const { return static_cast<int>(tuples.size()); }
};

/// Combines per-response fits into the residual-product matrix. Each
/// distinct (role, dim, offset) fit is evaluated once and shared by every
/// tuple that references it. Throws MissingFitError when a tuple's
/// response has no fit.
ResidualProducts residual_products(const TimeSeriesPanel& panel,
                                   const HypothesisSpec& spec,
                                   const std::map<ResponseKey, SieveFit>& fits);

/// Total fit_ols invocations in this process (test instrumentation).
std::uint64_t ols_fit_count();

}  // namespace dgcm
