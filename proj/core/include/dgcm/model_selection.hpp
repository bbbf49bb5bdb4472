#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dgcm/hypothesis.hpp"
#include "dgcm/panel.hpp"
#include "dgcm/sieve.hpp"

namespace dgcm {

/// Subsampled folds over the effective range: fold k (1-based) holds the
/// times t_lo + (k-1) + 2j(gamma+1), j = 0, 1, ...; there are 2(gamma+1)
/// folds of stride 2(gamma+1) and together they partition the range.
/// Throws RangeTooSmallError when the range has fewer than 2(gamma+1)
/// times.
std::vector<std::vector<int>> build_cv_folds(const EffectiveTimeRange& range, int gamma);

struct CvCandidate {
    int time_count = 0;
    int cov_count = 0;
    double mean_mse = 0.0;
    std::vector<double> fold_mse;  // one entry per fold
    bool skipped = false;
    std::string note;
};

struct CvSelection {
    int time_count = 0;
    int cov_count = 0;
    double mean_mse = 0.0;
    std::vector<CvCandidate> table;
    /// Held-out residuals of the chosen candidate, one vector per fold.
    std::vector<std::vector<double>> chosen_fold_residuals;
};

/// The usual search grid for conditional regressions.
std::vector<std::pair<int, int>> default_cv_grid();  // {2,4,6,8,10} x {2,4,6,8,10}

/// Grid for time-varying mean fits: time counts only.
std::vector<std::pair<int, int>> default_time_cv_grid();  // {2,4,6,8,10} x {1}

/// Chooses basis counts for one regression by buffered subsampling
/// cross-validation: for k = 1..gamma+1, fit on fold k and score on fold
/// k+gamma+1, then reverse the roles; candidates are ranked by the average
/// of the 2(gamma+1) per-fold MSEs. Consecutive members of a training fold
/// and its scoring fold are gamma time points apart. Candidates whose
/// training folds are too small (or rank deficient) are skipped with a
/// note rather than aborting. Ties break toward the smaller column count,
/// then the smaller time count.
CvSelection cross_validate(const TimeSeriesPanel& panel, const ResponseKey& response,
                           const std::vector<ConditioningPair>& conditioning,
                           const EffectiveTimeRange& range,
                           const std::vector<std::pair<int, int>>& grid, int gamma,
                           const SieveConfig& base);

/// Same search for several responses sharing one conditioning set; fold
/// design factorizations are shared, each response gets its own choice.
std::vector<CvSelection> cross_validate_many(
    const TimeSeriesPanel& panel, const std::vector<ResponseKey>& responses,
    const std::vector<ConditioningPair>& conditioning, const EffectiveTimeRange& range,
    const std::vector<std::pair<int, int>>& grid, int gamma, const SieveConfig& base);

}  // namespace dgcm
