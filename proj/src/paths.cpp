#include "sigflow/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sigflow {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (points_.front() != 0.0) throw std::invalid_argument("TimeGrid: first time must be 0");
    for (std::size_t k = 1; k < points_.size(); ++k) {
        if (!(points_[k] > points_[k - 1]))
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
    }
    if (!std::isfinite(points_.back())) throw std::invalid_argument("TimeGrid: non-finite time");
}

TimeGrid TimeGrid::uniform(double span, double dt) {
    if (!(dt > 0.0) || !(span > 0.0)) throw std::invalid_argument("TimeGrid::uniform: need span, dt > 0");
    const long long n = std::llround(span / dt);
    if (n < 1 || std::abs(static_cast<double>(n) * dt - span) > 1e-9 * std::max(1.0, span))
        throw std::invalid_argument("TimeGrid::uniform: span is not a multiple of dt");
    std::vector<double> pts(static_cast<std::size_t>(n) + 1);
    for (long long k = 0; k <= n; ++k) pts[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
    pts.back() = span;
    return TimeGrid(std::move(pts));
}

TimeGrid rescaled_to_unit(const TimeGrid& grid) {
    const double span = grid.span();
    std::vector<double> pts(grid.points());
    for (auto& t : pts) t /= span;
    pts.back() = 1.0;
    return TimeGrid(std::move(pts));
}

SampledPath::SampledPath(TimeGrid g, Eigen::MatrixXd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.rows() != grid.size())
        throw std::invalid_argument("SampledPath: value count does not match grid");
    if (values.cols() < 1) throw std::invalid_argument("SampledPath: need at least one channel");
}

AugmentedPath::AugmentedPath(TimeGrid g, Eigen::MatrixXd v)
    : grid(std::move(g)), values(std::move(v)) {
    if (values.rows() != grid.size())
        throw std::invalid_argument("AugmentedPath: value count does not match grid");
    if (values.cols() < 2) throw std::invalid_argument("AugmentedPath: need time plus one channel");
    for (int k = 0; k < grid.size(); ++k) {
        if (values(k, 0) != grid.time(k))
            throw std::invalid_argument("AugmentedPath: channel 0 must equal the grid times");
    }
}

Polyline::Polyline(Eigen::MatrixXd pts) : points(std::move(pts)) {
    if (points.rows() < 1) throw std::invalid_argument("Polyline: need at least one point");
    if (points.cols() < 1) throw std::invalid_argument("Polyline: need at least one channel");
}

AugmentedPath augment_with_time(const SampledPath& u) {
    Eigen::MatrixXd v(u.values.rows(), u.values.cols() + 1);
    for (int k = 0; k < u.grid.size(); ++k) v(k, 0) = u.grid.time(k);
    v.rightCols(u.values.cols()) = u.values;
    return AugmentedPath(u.grid, std::move(v));
}

Eigen::MatrixXd path_increments(const AugmentedPath& x) {
    return path_increments(Polyline(x));
}

Eigen::MatrixXd path_increments(const Polyline& x) {
    const Eigen::Index n = x.points.rows() - 1;
    Eigen::MatrixXd d(n, x.points.cols());
    for (Eigen::Index j = 0; j < n; ++j) d.row(j) = x.points.row(j + 1) - x.points.row(j);
    return d;
}

Polyline concatenate(const Polyline& a, const Polyline& b) {
    if (a.points.cols() != b.points.cols())
        throw std::invalid_argument("concatenate: channel counts differ");
    const Eigen::RowVectorXd offset = a.points.row(a.points.rows() - 1) - b.points.row(0);
    Eigen::MatrixXd pts(a.points.rows() + b.points.rows() - 1, a.points.cols());
    pts.topRows(a.points.rows()) = a.points;
    for (Eigen::Index k = 1; k < b.points.rows(); ++k)
        pts.row(a.points.rows() + k - 1) = b.points.row(k) + offset;
    return Polyline(std::move(pts));
}

Polyline reverse(const Polyline& x) {
    return Polyline(x.points.colwise().reverse().eval());
}

Polyline dilate(const Polyline& x, double lambda) {
    if (!std::isfinite(lambda)) throw std::invalid_argument("dilate: lambda must be finite");
    return Polyline((lambda * x.points).eval());
}

}  // namespace sigflow
