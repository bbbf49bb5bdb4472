#pragma once

#include <compare>
#include <map>
#include <set>
#include <vector>

#include "dgcm/panel.hpp"

namespace dgcm {

/// Offsets under consideration for each dimension of X, Y and Z.
/// Negative offsets are lags, positive offsets are leads. Conditioning
/// offsets must be non-positive so covariates are known at time t.
struct OffsetSpec {
    std::map<int, std::set<int>> x_offsets;  // dimension of X -> offsets
    std::map<int, std::set<int>> y_offsets;  // dimension of Y -> offsets
    std::map<int, std::set<int>> z_offsets;  // dimension of Z -> offsets, all <= 0
};

/// One tested dimension/offset combination (i, j, a, b): dimension i of X
/// at offset a against dimension j of Y at offset b.
struct TupleIndex {
    int x_dim;
    int y_dim;
    int x_offset;
    int y_offset;

    auto operator<=>(const TupleIndex&) const = default;
};

/// One conditioning coordinate (k, c): dimension k of Z at offset c <= 0.
struct ConditioningPair {
    int z_dim;
    int offset;

    auto operator<=>(const ConditioningPair&) const = default;
};

enum class HypothesisKind { conditional, unconditional };

/// A single null hypothesis: the tested tuples plus the conditioning set.
///
/// Tuples and conditioning pairs are kept sorted lexicographically
/// (dimension first, then offset ascending); this fixed ordering defines
/// the component order of regressor vectors, design-matrix columns, and
/// residual-product columns everywhere downstream.
class HypothesisSpec {
public:
    /// Throws DomainError if tuples are empty or duplicated, if a
    /// conditioning offset is positive, if kind is unconditional with a
    /// nonempty conditioning set, or conditional with an empty one.
    HypothesisSpec(std::vector<TupleIndex> tuples,
                   std::vector<ConditioningPair> conditioning,
                   HypothesisKind kind);

    [[nodiscard]] const std::vector<TupleIndex>& tuples() const { return tuples_; }
    [[nodiscard]] const std::vector<ConditioningPair>& conditioning() const {
        return conditioning_;
    }
    [[nodiscard]] HypothesisKind kind() const { return kind_; }

    /// Number of tested tuples.
    [[nodiscard]] int tuple_count() const { return static_cast<int>(tuples_.size()); }

    /// Offsets referenced by this hypothesis, grouped by role and dimension.
    [[nodiscard]] OffsetSpec offsets() const;

private:
    std::vector<TupleIndex> tuples_;
    std::vector<ConditioningPair> conditioning_;
    HypothesisKind kind_;
};

/// The contiguous block of original times at which every referenced offset
/// of every series is observed.
struct EffectiveTimeRange {
    int t_lo;   // first usable time
    int t_hi;   // last usable time
    int count;  // t_hi - t_lo + 1

    [[nodiscard]] bool contains(int t) const { return t >= t_lo && t <= t_hi; }
};

/// Computes the usable time range for a sample of length n.
///
/// The lower end is 1 - min(all offsets, 0) and the upper end is
/// n - max(all offsets, 0); clamping against zero covers specs that use
/// only lags or only leads. Throws EmptyRangeError when no time survives
/// and DomainError when an offset has magnitude >= n.
EffectiveTimeRange effective_times(int n, const OffsetSpec& offsets);

/// The conditioning covariate vector at time t, ordered by (dimension,
/// offset ascending); component value is Z[k] at time t + c.
std::vector<double> regressor_vector(const TimeSeriesPanel& panel, int t,
                                     const std::vector<ConditioningPair>& conditioning);

/// The observation of the given X or Y dimension at time t + offset.
double response_value(const TimeSeriesPanel& panel, int t, SeriesRole role, int dim,
                      int offset);

}  // namespace dgcm
