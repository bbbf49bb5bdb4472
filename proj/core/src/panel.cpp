#include "dgcm/panel.hpp"

#include <cmath>
#include <set>

#include "dgcm/errors.hpp"

namespace dgcm {

std::string_view to_string(SeriesRole role) {
    switch (role) {
        case SeriesRole::X: return "X";
        case SeriesRole::Y: return "Y";
        case SeriesRole::Z: return "Z";
    }
    return "?";
}

TimeSeriesPanel::TimeSeriesPanel(int n, std::vector<Series> series)
    : n_(n), series_(std::move(series)) {
    if (n_ < 1) throw DataError("panel length must be positive");
    std::set<std::pair<SeriesRole, std::string>> seen;
    for (std::size_t s = 0; s < series_.size(); ++s) {
        const Series& sr = series_[s];
        if (static_cast<int>(sr.values.size()) != n_) {
            throw DataError("series '" + sr.label + "' has length " +
                            std::to_string(sr.values.size()) + ", expected " +
                            std::to_string(n_));
        }
        for (double v : sr.values) {
            if (!std::isfinite(v)) {
                throw DataError("series '" + sr.label + "' contains a non-finite value");
            }
        }
        if (!seen.insert({sr.role, sr.label}).second) {
            throw DataError("duplicate label '" + sr.label + "' within one role");
        }
        switch (sr.role) {
            case SeriesRole::X: x_index_.push_back(static_cast<int>(s)); break;
            case SeriesRole::Y: y_index_.push_back(static_cast<int>(s)); break;
            case SeriesRole::Z: z_index_.push_back(static_cast<int>(s)); break;
        }
    }
}

int TimeSeriesPanel::dimension(SeriesRole role) const {
    switch (role) {
        case SeriesRole::X: return static_cast<int>(x_index_.size());
        case SeriesRole::Y: return static_cast<int>(y_index_.size());
        case SeriesRole::Z: return static_cast<int>(z_index_.size());
    }
    return 0;
}

std::vector<std::string> TimeSeriesPanel::labels(SeriesRole role) const {
    std::vector<std::string> out;
    for (const Series& s : series_) {
        if (s.role == role) out.push_back(s.label);
    }
    return out;
}

const Series& TimeSeriesPanel::at(SeriesRole role, int dim) const {
    const std::vector<int>* idx = nullptr;
    switch (role) {
        case SeriesRole::X: idx = &x_index_; break;
        case SeriesRole::Y: idx = &y_index_; break;
        case SeriesRole::Z: idx = &z_index_; break;
    }
    if (dim < 0 || dim >= static_cast<int>(idx->size())) {
        throw OutOfRangeError("no dimension " + std::to_string(dim) + " with role " +
                              std::string(to_string(role)));
    }
    return series_[static_cast<std::size_t>((*idx)[static_cast<std::size_t>(dim)])];
}

double TimeSeriesPanel::value(SeriesRole role, int dim, int t) const {
    if (t < 1 || t > n_) {
        throw OutOfRangeError("time " + std::to_string(t) + " outside [1, " +
                              std::to_string(n_) + "]");
    }
    return at(role, dim).values[static_cast<std::size_t>(t - 1)];
}

const std::vector<double>& TimeSeriesPanel::values(SeriesRole role, int dim) const {
    return at(role, dim).values;
}

}  // namespace dgcm
