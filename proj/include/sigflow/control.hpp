#pragma once

#include "sigflow/features.hpp"
#include "sigflow/paths.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace sigflow {

// Per-segment increments of the augmented path. Time increments come from the
// grid and stay fixed; the input increments are the optimization variables.
// Flattened variable order is segment-major: (segment 1, channel 1..d), ...
struct IncrementVector {
    IncrementVector(Eigen::VectorXd time_deltas, Eigen::MatrixXd input_deltas);

    int segments() const { return static_cast<int>(time_deltas.size()); }
    int channels() const { return static_cast<int>(input_deltas.cols()); }
    int free_count() const { return segments() * channels(); }

    Eigen::VectorXd flat() const;                 // input_deltas, segment-major
    void set_flat(const Eigen::VectorXd& v);

    Eigen::VectorXd time_deltas;   // N, positive
    Eigen::MatrixXd input_deltas;  // N x d
};

IncrementVector increment_vector(const AugmentedPath& x);

// Optional box on the input increments.
struct IncrementBounds {
    Eigen::MatrixXd lo;  // N x d
    Eigen::MatrixXd hi;
};

// Tracking problem: desired output differences, a trained readout, and the
// grid fixing the time increments.
struct ControlProblem {
    SigModel model;
    Eigen::VectorXd target;  // N values: Z'_{t_1} - z0, then consecutive differences
    TimeGrid grid;
    std::optional<IncrementBounds> bounds;
};

// Consecutive differences of a desired trajectory (N+1 values, first = z0).
Eigen::VectorXd difference_targets(const Eigen::VectorXd& desired);

// Row-differenced feature matrix: row j models Z_{t_j} - Z_{t_{j-1}} and is
// assembled directly from the increments via the product rule of the tensor
// algebra, never by subtracting dense rows.
FeatureMatrix modified_feature_matrix(const IncrementVector& delta, int order);

// Residual whose squared norm is the tracking cost.
Eigen::VectorXd control_residual(const ControlProblem& p, const IncrementVector& delta);

// Exact partials of the residual w.r.t. the free increments, N x (N*d).
// Residual row j only sees increments of segments 1..j, so the matrix is
// lower-block-triangular.
Eigen::MatrixXd control_jacobian(const ControlProblem& p, const IncrementVector& delta);

struct SolveTracePoint {
    int iter;
    double objective;
    double gradient_norm;
    double lambda;
};

struct SolveReport {
    IncrementVector solution;
    double objective;
    int iterations;  // accepted steps
    bool converged;
    double gradient_norm;
    std::vector<SolveTracePoint> trace;
};

struct SolveOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-8;
    double step_tol = 1e-12;
    double initial_lambda = 1e-3;
};

// Damped Gauss-Newton (Levenberg-Marquardt) on the analytic Jacobian.
// Objective is non-increasing across accepted steps.
SolveReport solve_control(const ControlProblem& p, const IncrementVector& init,
                          const SolveOptions& opts = {});

// White Gaussian noise on the reconstructed input values after t_0 (then
// re-differenced to increments), rescaled so the realized signal-to-noise
// ratio equals snr_db exactly. u0 fixes the value offset the signal norm is
// measured against; the value at t_0 itself is kept, since a constant shift
// never reaches the increments.
IncrementVector perturb_with_snr(const IncrementVector& delta_true, double snr_db,
                                 std::uint64_t seed, const Eigen::VectorXd& u0);
IncrementVector perturb_with_snr(const IncrementVector& delta_true, double snr_db,
                                 std::uint64_t seed);

// Cumulative sums from u0; inverse of increment extraction.
SampledPath increments_to_input(const IncrementVector& delta, const TimeGrid& grid,
                                const Eigen::VectorXd& u0);

}  // namespace sigflow
