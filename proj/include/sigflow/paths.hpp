#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sigflow {

// Strictly increasing times t_0 = 0 < t_1 < ... < t_N.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);

    // Uniform grid {0, dt, 2*dt, ..., span}; span must be an integer multiple of dt.
    static TimeGrid uniform(double span, double dt);

    const std::vector<double>& points() const { return points_; }
    int size() const { return static_cast<int>(points_.size()); }
    int segments() const { return size() - 1; }
    double time(int k) const { return points_[static_cast<std::size_t>(k)]; }
    double span() const { return points_.back(); }
    double dt(int j) const { return points_[static_cast<std::size_t>(j) + 1] - points_[static_cast<std::size_t>(j)]; }

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> points_;
};

// Affine map of the grid onto [0, 1].
TimeGrid rescaled_to_unit(const TimeGrid& grid);

// Values of the d input channels on a grid; piecewise-linear in between.
struct SampledPath {
    SampledPath(TimeGrid grid, Eigen::MatrixXd values);  // values: (N+1) x d

    int channels() const { return static_cast<int>(values.cols()); }

    TimeGrid grid;
    Eigen::MatrixXd values;
};

// Time-extended path X = [t, u^1, ..., u^d]; channel 0 equals the grid times.
struct AugmentedPath {
    AugmentedPath(TimeGrid grid, Eigen::MatrixXd values);  // values: (N+1) x (d+1)

    int channels() const { return static_cast<int>(values.cols()) - 1; }  // d, excluding time

    TimeGrid grid;
    Eigen::MatrixXd values;
};

// Bare point sequence without grid semantics. reverse/dilate/concatenate land
// here: their outputs generally violate the "channel 0 is grid time"
// invariant, and the signature algebra is channel-agnostic anyway. Accepted
// by the signature module, rejected by prediction and control.
struct Polyline {
    explicit Polyline(Eigen::MatrixXd pts);  // k x c, k >= 1
    explicit Polyline(const AugmentedPath& x) : points(x.values) {}

    int channels() const { return static_cast<int>(points.cols()); }
    int segments() const { return static_cast<int>(points.rows()) - 1; }

    Eigen::MatrixXd points;
};

AugmentedPath augment_with_time(const SampledPath& u);

// Row j = X_{t_{j+1}} - X_{t_j}; N rows.
Eigen::MatrixXd path_increments(const AugmentedPath& x);
Eigen::MatrixXd path_increments(const Polyline& x);

// b is translated so that it starts where a ends; the junction point appears once.
Polyline concatenate(const Polyline& a, const Polyline& b);

// Value sequence in reverse order (the path run backwards in time).
Polyline reverse(const Polyline& x);

// All channels scaled by lambda, the time channel included.
Polyline dilate(const Polyline& x, double lambda);

}  // namespace sigflow
