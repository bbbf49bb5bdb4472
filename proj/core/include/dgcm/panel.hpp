#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dgcm {

/// Role a series plays in a hypothesis: X and Y are the tested processes,
/// Z carries the conditioning covariates.
enum class SeriesRole { X, Y, Z };

std::string_view to_string(SeriesRole role);

struct Series {
    SeriesRole role;
    std::string label;
    std::vector<double> values;
};

/// Rectangular panel of real-valued observations of common length n.
///
/// Time indices are 1-based throughout the library so that code matches the
/// usual t = 1, ..., n convention; dimension indices are 0-based positions
/// within a role. Panels are immutable after construction and safe to share
/// across threads.
class TimeSeriesPanel {
public:
    /// Validates that every series has length n, every value is finite, and
    /// labels are unique within each role. Throws DataError otherwise.
    TimeSeriesPanel(int n, std::vector<Series> series);

    [[nodiscard]] int length() const { return n_; }

    /// Number of series with the given role.
    [[nodiscard]] int dimension(SeriesRole role) const;

    /// Labels of the series with the given role, in panel order.
    [[nodiscard]] std::vector<std::string> labels(SeriesRole role) const;

    /// Observation of dimension `dim` (0-based within the role) at time
    /// t in [1, n]. Throws OutOfRangeError for t outside [1, n].
    [[nodiscard]] double value(SeriesRole role, int dim, int t) const;

    /// Whole series for a role/dimension.
    [[nodiscard]] const std::vector<double>& values(SeriesRole role, int dim) const;

    [[nodiscard]] const std::vector<Series>& series() const { return series_; }

private:
    [[nodiscard]] const Series& at(SeriesRole role, int dim) const;

    int n_;
    std::vector<Series> series_;
    std::vector<int> x_index_, y_index_, z_index_;  // positions by role
};

}  // namespace dgcm
