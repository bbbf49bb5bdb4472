#include "dgcm/model_selection.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "dgcm/errors.hpp"

namespace dgcm {

std::vector<std::vector<int>> build_cv_folds(const EffectiveTimeRange& range, int gamma) {
    if (gamma < 0) throw DomainError("buffer gamma must be non-negative");
    const int fold_count = 2 * (gamma + 1);
    if (range.count < fold_count) {
        throw RangeTooSmallError("range of " + std::to_string(range.count) +
                                 " times cannot host " + std::to_string(fold_count) +
                                 " folds");
    }
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(fold_count));
    for (int k = 0; k < fold_count; ++k) {
        for (int t = range.t_lo + k; t <= range.t_hi; t += fold_count) {
            folds[static_cast<std::size_t>(k)].push_back(t);
        }
    }
    return folds;
}

std::vector<std::pair<int, int>> default_cv_grid() {
    std::vector<std::pair<int, int>> grid;
    for (int c : {2, 4, 6, 8, 10}) {
        for (int d : {2, 4, 6, 8, 10}) grid.emplace_back(c, d);
    }
    return grid;
}

std::vector<std::pair<int, int>> default_time_cv_grid() {
    std::vector<std::pair<int, int>> grid;
    for (int c : {2, 4, 6, 8, 10}) grid.emplace_back(c, 1);
    return grid;
}

namespace {

/// Multi-response least squares on a training fold; nullopt marks a
/// candidate that cannot be fit there (rank deficiency without a ridge).
std::optional<Eigen::MatrixXd> solve_fold(const Eigen::MatrixXd& design,
                                          const Eigen::MatrixXd& responses,
                                          const SieveConfig& base, std::string& note) {
    double ridge = base.ridge;
    if (ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() == design.cols()) return qr.solve(responses);
        if (!base.auto_ridge_fallback) {
            note = "rank deficient on a training fold";
            return std::nullopt;
        }
        ridge = 1e-10 * design.squaredNorm() / static_cast<double>(design.cols());
    }
    Eigen::MatrixXd augmented(design.rows() + design.cols(), design.cols());
    augmented.topRows(design.rows()) = design;
    augmented.bottomRows(design.cols()) =
        std::sqrt(ridge) *
        Eigen::MatrixXd::Identity(design.cols(), design.cols());
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(augmented.rows(), responses.cols());
    rhs.topRows(design.rows()) = responses;
    return augmented.householderQr().solve(rhs);
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& source, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), source.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = source.row(rows[i]);
    }
    return out;
}

}  // namespace

std::vector<CvSelection> cross_validate_many(
    const TimeSeriesPanel& panel, const std::vector<ResponseKey>& responses,
    const std::vector<ConditioningPair>& conditioning, const EffectiveTimeRange& range,
    const std::vector<std::pair<int, int>>& grid, int gamma, const SieveConfig& base) {
    if (responses.empty()) throw DomainError("no responses to cross-validate");
    if (grid.empty()) throw DomainError("empty candidate grid");

    const std::vector<std::vector<int>> folds = build_cv_folds(range, gamma);
    const int fold_count = static_cast<int>(folds.size());
    const int half = fold_count / 2;
    const int resp_count = static_cast<int>(responses.size());

    // Fold times as 0-based row offsets into the range.
    std::vector<std::vector<int>> fold_rows(folds.size());
    for (std::size_t k = 0; k < folds.size(); ++k) {
        for (int t : folds[k]) fold_rows[k].push_back(t - range.t_lo);
    }

    std::vector<int> all_times(static_cast<std::size_t>(range.count));
    std::iota(all_times.begin(), all_times.end(), range.t_lo);
    const TimeRemap remap{range.t_lo, range.t_hi};

    Eigen::MatrixXd y(range.count, resp_count);
    for (int r = 0; r < resp_count; ++r) {
        const ResponseKey& key = responses[static_cast<std::size_t>(r)];
        for (int i = 0; i < range.count; ++i) {
            y(i, r) = response_value(panel, range.t_lo + i, key.role, key.dim, key.offset);
        }
    }

    // One design at the largest counts; candidate designs are column
    // subsets of it, so basis functions are evaluated once.
    int c_max = 1, d_max = 1;
    for (const auto& cd : grid) {
        c_max = std::max(c_max, cd.first);
        d_max = std::max(d_max, cd.second);
    }
    SieveConfig big = base;
    big.time_count = c_max;
    big.cov_count = d_max;
    const Eigen::MatrixXd full_design =
        build_design_matrix(panel, all_times, conditioning, big, remap);
    const int pair_count = static_cast<int>(conditioning.size());

    auto candidate_columns = [&](int c, int d) {
        std::vector<int> cols;
        if (pair_count == 0) {
            for (int l1 = 0; l1 < c; ++l1) cols.push_back(l1);
            return cols;
        }
        for (int p = 0; p < pair_count; ++p) {
            for (int l1 = 0; l1 < c; ++l1) {
                for (int l2 = 0; l2 < d; ++l2) {
                    cols.push_back((p * c_max + l1) * d_max + l2);
                }
            }
        }
        return cols;
    };

    struct Evaluated {
        CvCandidate summary;
        // residuals[fold][response] over the fold's times
        std::vector<std::vector<Eigen::VectorXd>> residuals;
        std::vector<std::vector<double>> fold_mse_by_response;
    };

    std::vector<Evaluated> evaluated;
    evaluated.reserve(grid.size());

    for (const auto& [c, d] : grid) {
        Evaluated ev;
        ev.summary.time_count = c;
        ev.summary.cov_count = d;
        const std::vector<int> col_idx = candidate_columns(c, d);
        const int cols = static_cast<int>(col_idx.size());

        bool feasible = true;
        for (const auto& rows : fold_rows) {
            if (static_cast<int>(rows.size()) < cols) {
                feasible = false;
                break;
            }
        }
        if (!feasible) {
            ev.summary.skipped = true;
            ev.summary.note = "training fold smaller than " + std::to_string(cols) +
                              " columns";
            evaluated.push_back(std::move(ev));
            continue;
        }

        Eigen::MatrixXd design(range.count, cols);
        for (int j = 0; j < cols; ++j) {
            design.col(j) = full_design.col(col_idx[static_cast<std::size_t>(j)]);
        }

        ev.residuals.assign(folds.size(), {});
        ev.fold_mse_by_response.assign(
            folds.size(), std::vector<double>(static_cast<std::size_t>(resp_count), 0.0));

        // Schedule: fit on fold k, score on fold k + half; then reverse.
        for (int k = 0; k < half && !ev.summary.skipped; ++k) {
            for (int direction = 0; direction < 2; ++direction) {
                const int train = direction == 0 ? k : k + half;
                const int score = direction == 0 ? k + half : k;
                const Eigen::MatrixXd d_train =
                    gather_rows(design, fold_rows[static_cast<std::size_t>(train)]);
                const Eigen::MatrixXd y_train =
                    gather_rows(y, fold_rows[static_cast<std::size_t>(train)]);
                std::string note;
                const auto beta = solve_fold(d_train, y_train, base, note);
                if (!beta) {
                    ev.summary.skipped = true;
                    ev.summary.note = note;
                    break;
                }
                const Eigen::MatrixXd d_score =
                    gather_rows(design, fold_rows[static_cast<std::size_t>(score)]);
                const Eigen::MatrixXd y_score =
                    gather_rows(y, fold_rows[static_cast<std::size_t>(score)]);
                const Eigen::MatrixXd resid = y_score - d_score * (*beta);
                auto& per_resp = ev.residuals[static_cast<std::size_t>(score)];
                per_resp.clear();
                for (int r = 0; r < resp_count; ++r) {
                    per_resp.push_back(resid.col(r));
                    ev.fold_mse_by_response[static_cast<std::size_t>(score)]
                                           [static_cast<std::size_t>(r)] =
                        resid.col(r).squaredNorm() /
                        static_cast<double>(resid.rows());
                }
            }
        }
        evaluated.push_back(std::move(ev));
    }

    std::vector<CvSelection> selections(static_cast<std::size_t>(resp_count));
    for (int r = 0; r < resp_count; ++r) {
        CvSelection& sel = selections[static_cast<std::size_t>(r)];
        int best = -1;
        double best_mse = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < evaluated.size(); ++e) {
            const Evaluated& ev = evaluated[e];
            CvCandidate cand = ev.summary;
            if (!cand.skipped) {
                double total = 0.0;
                for (std::size_t k = 0; k < ev.fold_mse_by_response.size(); ++k) {
                    const double mse =
                        ev.fold_mse_by_response[k][static_cast<std::size_t>(r)];
                    cand.fold_mse.push_back(mse);
                    total += mse;
                }
                cand.mean_mse = total / static_cast<double>(fold_count);
            } else {
                cand.mean_mse = std::numeric_limits<double>::quiet_NaN();
            }
            sel.table.push_back(cand);
            if (cand.skipped) continue;

            bool better = cand.mean_mse < best_mse;
            if (!better && cand.mean_mse == best_mse && best >= 0) {
                const CvCandidate& incumbent = sel.table[static_cast<std::size_t>(best)];
                const int cd_new = cand.time_count * cand.cov_count;
                const int cd_old = incumbent.time_count * incumbent.cov_count;
                better = cd_new < cd_old ||
                         (cd_new == cd_old && cand.time_count < incumbent.time_count);
            }
            if (better) {
                best = static_cast<int>(sel.table.size()) - 1;
                best_mse = cand.mean_mse;
            }
        }
        if (best < 0) {
            throw InsufficientDataError("every cross-validation candidate was skipped");
        }
        const CvCandidate& chosen = sel.table[static_cast<std::size_t>(best)];
        sel.time_count = chosen.time_count;
        sel.cov_count = chosen.cov_count;
        sel.mean_mse = chosen.mean_mse;

        const Evaluated& ev = evaluated[static_cast<std::size_t>(best)];
        for (std::size_t k = 0; k < ev.residuals.size(); ++k) {
            const Eigen::VectorXd& v = ev.residuals[k][static_cast<std::size_t>(r)];
            sel.chosen_fold_residuals.emplace_back(v.data(), v.data() + v.size());
        }
    }
    return selections;
}

CvSelection cross_validate(const TimeSeriesPanel& panel, const ResponseKey& response,
                           const std::vector<ConditioningPair>& conditioning,
                           const EffectiveTimeRange& range,
                           const std::vector<std::pair<int, int>>& grid, int gamma,
                           const SieveConfig& base) {
    return cross_validate_many(panel, {response}, conditioning, range, grid, gamma,
                               base)[0];
}

}  // namespace dgcm
