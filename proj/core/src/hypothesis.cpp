#include "dgcm/hypothesis.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "dgcm/errors.hpp"

namespace dgcm {

HypothesisSpec::HypothesisSpec(std::vector<TupleIndex> tuples,
                               std::vector<ConditioningPair> conditioning,
                               HypothesisKind kind)
    : tuples_(std::move(tuples)), conditioning_(std::move(conditioning)), kind_(kind) {
    if (tuples_.empty()) throw DomainError("hypothesis needs at least one tuple");
    std::sort(tuples_.begin(), tuples_.end());
    if (std::adjacent_find(tuples_.begin(), tuples_.end()) != tuples_.end()) {
        throw DomainError("duplicate tuple in hypothesis");
    }
    std::sort(conditioning_.begin(), conditioning_.end());
    if (std::adjacent_find(conditioning_.begin(), conditioning_.end()) !=
        conditioning_.end()) {
        throw DomainError("duplicate conditioning pair");
    }
    for (const ConditioningPair& p : conditioning_) {
        if (p.offset > 0) {
            throw DomainError("conditioning offsets must be non-positive, got " +
                              std::to_string(p.offset));
        }
    }
    if (kind_ == HypothesisKind::unconditional && !conditioning_.empty()) {
        throw DomainError("unconditional hypothesis must have an empty conditioning set");
    }
    if (kind_ == HypothesisKind::conditional && conditioning_.empty()) {
        throw DomainError("conditional hypothesis needs a nonempty conditioning set");
    }
}

OffsetSpec HypothesisSpec::offsets() const {
    OffsetSpec spec;
    for (const TupleIndex& m : tuples_) {
        spec.x_offsets[m.x_dim].insert(m.x_offset);
        spec.y_offsets[m.y_dim].insert(m.y_offset);
    }
    for (const ConditioningPair& p : conditioning_) {
        spec.z_offsets[p.z_dim].insert(p.offset);
    }
    return spec;
}

EffectiveTimeRange effective_times(int n, const OffsetSpec& offsets) {
    if (n < 1) throw DomainError("sample length must be positive");
    int lo = 0;  // min over all offsets and zero
    int hi = 0;  // max over all offsets and zero
    auto visit = [&](const std::map<int, std::set<int>>& by_dim) {
        for (const auto& [dim, offs] : by_dim) {
            if (offs.empty()) {
                throw DomainError("empty offset set for dimension " + std::to_string(dim));
            }
            for (int o : offs) {
                if (std::abs(o) >= n) {
                    throw DomainError("offset " + std::to_string(o) +
                                      " out of range for length " + std::to_string(n));
                }
                lo = std::min(lo, o);
                hi = std::max(hi, o);
            }
        }
    };
    visit(offsets.x_offsets);
    visit(offsets.y_offsets);
    visit(offsets.z_offsets);
    for (const auto& [dim, offs] : offsets.z_offsets) {
        for (int o : offs) {
            if (o > 0) {
                throw DomainError("conditioning offsets must be non-positive, got " +
                                  std::to_string(o));
            }
        }
    }

    const int t_lo = 1 - lo;
    const int t_hi = n - hi;
    if (t_lo > t_hi) {
        throw EmptyRangeError("offsets leave no usable times (t_lo=" +
                              std::to_string(t_lo) + " > t_hi=" + std::to_string(t_hi) +
                              ")");
    }
    return EffectiveTimeRange{t_lo, t_hi, t_hi - t_lo + 1};
}

std::vector<double> regressor_vector(const TimeSeriesPanel& panel, int t,
                                     const std::vector<ConditioningPair>& conditioning) {
    std::vector<double> out;
    out.reserve(conditioning.size());
    for (const ConditioningPair& p : conditioning) {
        out.push_back(panel.value(SeriesRole::Z, p.z_dim, t + p.offset));
    }
    return out;
}

double response_value(const TimeSeriesPanel& panel, int t, SeriesRole role, int dim,
                      int offset) {
    if (role == SeriesRole::Z) throw DomainError("responses must have role X or Y");
    return panel.value(role, dim, t + offset);
}

}  // namespace dgcm
