#include "dgcm/sieve.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "dgcm/basis.hpp"
#include "dgcm/errors.hpp"

namespace dgcm {

namespace {

std::atomic<std::uint64_t> g_ols_fits{0};

Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                            double ridge) {
    const Eigen::Index rows = design.rows();
    const Eigen::Index cols = design.cols();
    Eigen::MatrixXd augmented(rows + cols, cols);
    augmented.topRows(rows) = design;
    augmented.bottomRows(cols) =
        std::sqrt(ridge) * Eigen::MatrixXd::Identity(cols, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + cols);
    rhs.head(rows) = response;
    return augmented.householderQr().solve(rhs);
}

}  // namespace

std::uint64_t ols_fit_count() { return g_ols_fits.load(); }

Eigen::VectorXd fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                        double ridge) {
    g_ols_fits.fetch_add(1, std::memory_order_relaxed);
    if (design.rows() != response.size()) {
        throw DomainError("design rows and response length differ");
    }
    if (!response.allFinite() || !design.allFinite()) {
        throw DomainError("non-finite values in least-squares problem");
    }
    if (ridge < 0.0) throw DomainError("ridge must be non-negative");
    if (design.rows() < design.cols()) {
        throw UnderdeterminedError("least squares with " + std::to_string(design.rows()) +
                                   " rows < " + std::to_string(design.cols()) +
                                   " columns");
    }
    if (ridge > 0.0) return solve_ridge(design, response, ridge);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw RankDeficientError("design is rank deficient (rank " +
                                 std::to_string(qr.rank()) + " of " +
                                 std::to_string(design.cols()) + ")");
    }
    return qr.solve(response);
}

Eigen::MatrixXd build_design_matrix(const TimeSeriesPanel& panel,
                                    std::span<const int> times,
                                    const std::vector<ConditioningPair>& conditioning,
                                    const SieveConfig& config, const TimeRemap& remap) {
    if (config.time_count < 1 || config.cov_count < 1) {
        throw DomainError("basis counts must be >= 1");
    }
    const int pair_count = static_cast<int>(conditioning.size());
    const int block = config.time_count * config.cov_count;
    const Eigen::Index cols =
        pair_count == 0 ? config.time_count : static_cast<Eigen::Index>(pair_count) * block;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(times.size()), cols);

    for (Eigen::Index row = 0; row < design.rows(); ++row) {
        const int t = times[static_cast<std::size_t>(row)];
        const Eigen::VectorXd time_basis =
            eval_time_basis(remap.rescale(t), config.time_count);
        if (pair_count == 0) {
            design.row(row) = time_basis.transpose();
            continue;
        }
        for (int p = 0; p < pair_count; ++p) {
            const ConditioningPair& pair = conditioning[static_cast<std::size_t>(p)];
            const double z = panel.value(SeriesRole::Z, pair.z_dim, t + pair.offset);
            const Eigen::VectorXd cov_basis =
                eval_covariate_basis(z, config.cov_count, config.covariate_scale);
            for (int l1 = 0; l1 < config.time_count; ++l1) {
                for (int l2 = 0; l2 < config.cov_count; ++l2) {
                    design(row, p * block + l1 * config.cov_count + l2) =
                        time_basis[l1] * cov_basis[l2];
                }
            }
        }
    }
    return design;
}

SieveFit::SieveFit(std::vector<ConditioningPair> pairs, int time_count, int cov_count,
                   double covariate_scale, TimeRemap remap, Eigen::VectorXd beta)
    : pairs_(std::move(pairs)),
      time_count_(time_count),
      cov_count_(cov_count),
      covariate_scale_(covariate_scale),
      remap_(remap),
      beta_(std::move(beta)),
      first_usable_(remap.t_lo) {
    if (!beta_.allFinite()) throw DomainError("non-finite coefficients");
}

int SieveFit::column_index(int pair, int l1, int l2) const {
    if (pairs_.empty()) return l1 - 1;
    return (pair * time_count_ + (l1 - 1)) * cov_count_ + (l2 - 1);
}

Eigen::VectorXd SieveFit::design_row(int t, std::span<const double> z) const {
    const Eigen::VectorXd time_basis = eval_time_basis(remap_.rescale(t), time_count_);
    if (pairs_.empty()) return time_basis;
    if (z.size() != pairs_.size()) {
        throw DomainError("covariate vector has length " + std::to_string(z.size()) +
                          ", expected " + std::to_string(pairs_.size()));
    }
    Eigen::VectorXd row(columns());
    const int block = time_count_ * cov_count_;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        const Eigen::VectorXd cov_basis =
            eval_covariate_basis(z[p], cov_count_, covariate_scale_);
        for (int l1 = 0; l1 < time_count_; ++l1) {
            for (int l2 = 0; l2 < cov_count_; ++l2) {
                row[static_cast<int>(p) * block + l1 * cov_count_ + l2] =
                    time_basis[l1] * cov_basis[l2];
            }
        }
    }
    return row;
}

double SieveFit::predict(int t, std::span<const double> z) const {
    if (t < first_usable_ || t > remap_.t_hi) {
        throw OutOfRangeError("time " + std::to_string(t) +
                              " has no usable prediction (first usable " +
                              std::to_string(first_usable_) + ")");
    }
    const Eigen::VectorXd row = design_row(t, z);
    if (betas_by_time_.size() == 0) return row.dot(beta_);
    return row.dot(betas_by_time_.row(t - first_usable_));
}

namespace {

Eigen::VectorXd fit_with_policy(const Eigen::MatrixXd& design,
                                const Eigen::VectorXd& response,
                                const SieveConfig& config) {
    if (config.ridge > 0.0 || !config.auto_ridge_fallback) {
        return fit_ols(design, response, config.ridge);
    }
    try {
        return fit_ols(design, response, 0.0);
    } catch (const RankDeficientError&) {
        const double fallback =
            1e-10 * design.squaredNorm() / static_cast<double>(design.cols());
        return fit_ols(design, response, fallback);
    }
}

}  // namespace

SieveFit fit_regression(const TimeSeriesPanel& panel, const EffectiveTimeRange& range,
                        const ResponseKey& key,
                        const std::vector<ConditioningPair>& conditioning,
                        const SieveConfig& config) {
    std::vector<int> times(static_cast<std::size_t>(range.count));
    std::iota(times.begin(), times.end(), range.t_lo);
    const TimeRemap remap{range.t_lo, range.t_hi};

    Eigen::VectorXd response(range.count);
    for (int i = 0; i < range.count; ++i) {
        response[i] = response_value(panel, times[static_cast<std::size_t>(i)], key.role,
                                     key.dim, key.offset);
    }
    const Eigen::MatrixXd design =
        build_design_matrix(panel, times, conditioning, config, remap);

    if (config.mode == SieveMode::global) {
        Eigen::VectorXd beta = fit_with_policy(design, response, config);
        return SieveFit(conditioning, config.time_count, config.cov_count,
                        config.covariate_scale, remap, std::move(beta));
    }

    // Sequential mode: coefficients at time t come from rows up to t; the
    // warm-up ends once the prefix has at least as many rows as columns.
    const int cols = static_cast<int>(design.cols());
    if (range.count < cols) {
        throw UnderdeterminedError("sequential fit never reaches " +
                                   std::to_string(cols) + " usable rows");
    }
    const int warmup_rows = cols;
    const int usable = range.count - warmup_rows + 1;
    Eigen::MatrixXd betas(usable, cols);
    for (int i = 0; i < usable; ++i) {
        const int rows = warmup_rows + i;
        betas.row(i) =
            fit_with_policy(design.topRows(rows), response.head(rows), config).transpose();
    }
    SieveFit fit(conditioning, config.time_count, config.cov_count,
                 config.covariate_scale, remap, betas.row(usable - 1).transpose());
    fit.betas_by_time_ = std::move(betas);
    fit.first_usable_ = range.t_lo + warmup_rows - 1;
    return fit;
}

SieveFit fit_time_varying_mean(std::span<const double> values,
                               const EffectiveTimeRange& range, int time_count) {
    if (static_cast<int>(values.size()) != range.count) {
        throw DomainError("values length does not match range");
    }
    const TimeRemap remap{range.t_lo, range.t_hi};
    Eigen::MatrixXd design(range.count, time_count);
    for (int i = 0; i < range.count; ++i) {
        design.row(i) = eval_time_basis(remap.rescale(range.t_lo + i), time_count).transpose();
    }
    Eigen::VectorXd response =
        Eigen::Map<const Eigen::VectorXd>(values.data(), range.count);
    Eigen::VectorXd beta = fit_ols(design, response, 0.0);
    return SieveFit({}, time_count, 1, 1.0, remap, std::move(beta));
}

ResidualProducts residual_products(const TimeSeriesPanel& panel,
                                   const HypothesisSpec& spec,
                                   const std::map<ResponseKey, SieveFit>& fits) {
    const EffectiveTimeRange full = effective_times(panel.length(), spec.offsets());

    std::vector<ResponseKey> keys;
    for (const TupleIndex& m : spec.tuples()) {
        keys.push_back({SeriesRole::X, m.x_dim, m.x_offset});
        keys.push_back({SeriesRole::Y, m.y_dim, m.y_offset});
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    int usable_lo = full.t_lo;
    for (const ResponseKey& key : keys) {
        auto it = fits.find(key);
        if (it == fits.end()) {
            throw MissingFitError("no fit for response " +
                                  std::string(to_string(key.role)) + "[" +
                                  std::to_string(key.dim) + "] offset " +
                                  std::to_string(key.offset));
        }
        usable_lo = std::max(usable_lo, it->second.first_usable_time());
    }
    if (usable_lo > full.t_hi) {
        throw InsufficientDataError("no time has usable predictions from every fit");
    }

    ResidualProducts out;
    out.range = EffectiveTimeRange{usable_lo, full.t_hi, full.t_hi - usable_lo + 1};
    out.tuples = spec.tuples();

    for (const ResponseKey& key : keys) {
        const SieveFit& fit = fits.at(key);
        Eigen::VectorXd resid(out.range.count);
        for (int i = 0; i < out.range.count; ++i) {
            const int t = usable_lo + i;
            const std::vector<double> z = regressor_vector(panel, t, fit.conditioning());
            resid[i] = response_value(panel, t, key.role, key.dim, key.offset) -
                       fit.predict(t, z);
        }
        out.residuals.emplace(key, std::move(resid));
    }

    out.values.resize(out.range.count, out.width());
    for (int m = 0; m < out.width(); ++m) {
        const TupleIndex& idx = out.tuples[static_cast<std::size_t>(m)];
        const Eigen::VectorXd& eps =
            out.residuals.at({SeriesRole::X, idx.x_dim, idx.x_offset});
        const Eigen::VectorXd& xi =
            out.residuals.at({SeriesRole::Y, idx.y_dim, idx.y_offset});
        out.values.col(m) = eps.cwiseProduct(xi);
    }
    return out;
}

}  // namespace dgcm
