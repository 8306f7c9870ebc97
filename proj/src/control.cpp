#include "sigflow/control.hpp"

#include "sigflow/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace sigflow {

namespace {

// Pairing of a tensor series with the readout: level-0 is skipped because the
// feature matrix never materializes it.
double dot_features(const TruncatedTensorSeries& s, const Eigen::VectorXd& beta) {
    double acc = 0.0;
    const auto& coeffs = s.data();
    for (Eigen::Index c = 0; c < beta.size(); ++c)
        acc += coeffs[static_cast<std::size_t>(c) + 1] * beta[c];
    return acc;
}

// d/d delta[channel] of the segment signature, via the recursion
// D_k = (D_{k-1} (x) delta + S_{k-1} (x) e_channel) / k.
TruncatedTensorSeries segment_signature_derivative(const Eigen::VectorXd& delta, int order,
                                                   int channel) {
    const int alphabet = static_cast<int>(delta.size());
    const TruncatedTensorSeries seg = segment_signature(delta, order);
    TruncatedTensorSeries deriv(alphabet, order);
    for (int k = 1; k <= order; ++k) {
        auto dprev = deriv.level(k - 1);
        auto sprev = seg.level(k - 1);
        auto cur = deriv.level(k);
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t u = 0; u < dprev.size(); ++u) {
            const std::size_t base = u * static_cast<std::size_t>(alphabet);
            for (int c = 0; c < alphabet; ++c) {
                double v = dprev[u] * delta[c];
                if (c == channel) v += sprev[u];
                cur[base + static_cast<std::size_t>(c)] = v * inv_k;
            }
        }
    }
    return deriv;
}

Eigen::VectorXd segment_delta(const IncrementVector& delta, int j) {
    Eigen::VectorXd d(delta.channels() + 1);
    d[0] = delta.time_deltas[j];
    d.tail(delta.channels()) = delta.input_deltas.row(j).transpose();
    return d;
}

std::vector<TruncatedTensorSeries> segment_signatures(const IncrementVector& delta, int order) {
    std::vector<TruncatedTensorSeries> segs;
    segs.reserve(static_cast<std::size_t>(delta.segments()));
    for (int j = 0; j < delta.segments(); ++j)
        segs.push_back(segment_signature(segment_delta(delta, j), order));
    return segs;
}

void check_problem(const ControlProblem& p, const IncrementVector& delta) {
    const int n = p.grid.segments();
    if (p.target.size() != n)
        throw std::invalid_argument("control: target length must equal grid segment count");
    if (delta.segments() != n)
        throw std::invalid_argument("control: increment count must equal grid segment count");
    if (delta.channels() != p.model.channels)
        throw std::invalid_argument("control: channel count does not match model");
    for (int j = 0; j < n; ++j)
        if (delta.time_deltas[j] != p.grid.dt(j))
            throw std::invalid_argument("control: time increments must match the target grid");
}

}  // namespace

IncrementVector::IncrementVector(Eigen::VectorXd td, Eigen::MatrixXd id)
    : time_deltas(std::move(td)), input_deltas(std::move(id)) {
    if (time_deltas.size() != input_deltas.rows())
        throw std::invalid_argument("IncrementVector: segment counts differ");
    if (time_deltas.size() < 1) throw std::invalid_argument("IncrementVector: need >= 1 segment");
    for (Eigen::Index j = 0; j < time_deltas.size(); ++j)
        if (!(time_deltas[j] > 0.0))
            throw std::invalid_argument("IncrementVector: time increments must be positive");
}

Eigen::VectorXd IncrementVector::flat() const {
    Eigen::VectorXd v(free_count());
    for (int j = 0; j < segments(); ++j)
        v.segment(static_cast<Eigen::Index>(j) * channels(), channels()) =
            input_deltas.row(j).transpose();
    return v;
}

void IncrementVector::set_flat(const Eigen::VectorXd& v) {
    if (v.size() != free_count()) throw std::invalid_argument("IncrementVector: flat size mismatch");
    for (int j = 0; j < segments(); ++j)
        input_deltas.row(j) = v.segment(static_cast<Eigen::Index>(j) * channels(), channels()).transpose();
}

IncrementVector increment_vector(const AugmentedPath& x) {
    const Eigen::MatrixXd inc = path_increments(x);
    return IncrementVector(inc.col(0), inc.rightCols(inc.cols() - 1));
}

Eigen::VectorXd difference_targets(const Eigen::VectorXd& desired) {
    if (desired.size() < 2) throw std::invalid_argument("difference_targets: need >= 2 values");
    Eigen::VectorXd d(desired.size() - 1);
    for (Eigen::Index j = 0; j + 1 < desired.size(); ++j) d[j] = desired[j + 1] - desired[j];
    return d;
}

FeatureMatrix modified_feature_matrix(const IncrementVector& delta, int order) {
    const int n = delta.segments();
    const int alphabet = delta.channels() + 1;
    const long cols = feature_count(delta.channels(), order);

    std::vector<double> times(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 0; j < n; ++j) times[static_cast<std::size_t>(j) + 1] = times[static_cast<std::size_t>(j)] + delta.time_deltas[j];
    TimeGrid grid{std::move(times)};

    Eigen::MatrixXd values(n, cols);
    TruncatedTensorSeries prefix = TruncatedTensorSeries::unit(alphabet, order);
    for (int j = 0; j < n; ++j) {
        // row j = prefix (x) (seg_j - 1): the level-0 entries cancel and the
        // surviving terms are the segment block plus prefix-times-suffix
        // cross terms of Chen's identity.
        TruncatedTensorSeries next =
            chen_product(prefix, segment_signature(segment_delta(delta, j), order));
        for (long c = 0; c < cols; ++c)
            values(j, c) = next.data()[static_cast<std::size_t>(c) + 1] -
                           prefix.data()[static_cast<std::size_t>(c) + 1];
        prefix = std::move(next);
    }
    return FeatureMatrix{std::move(values), std::move(grid), order, delta.channels()};
}

Eigen::VectorXd control_residual(const ControlProblem& p, const IncrementVector& delta) {
    check_problem(p, delta);
    const FeatureMatrix f = modified_feature_matrix(delta, p.model.order);
    return p.target - f.values * p.model.beta;
}

Eigen::MatrixXd control_jacobian(const ControlProblem& p, const IncrementVector& delta) {
    check_problem(p, delta);
    const int n = delta.segments();
    const int d = delta.channels();
    const int order = p.model.order;
    const int alphabet = d + 1;
    const Eigen::VectorXd& beta = p.model.beta;

    const std::vector<TruncatedTensorSeries> segs = segment_signatures(delta, order);
    std::vector<TruncatedTensorSeries> prefixes;
    prefixes.reserve(static_cast<std::size_t>(n));
    prefixes.push_back(TruncatedTensorSeries::unit(alphabet, order));  // prefix before segment q
    for (int j = 0; j + 1 < n; ++j) prefixes.push_back(chen_product(prefixes.back(), segs[static_cast<std::size_t>(j)]));

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n) * d);
    for (int q = 0; q < n; ++q) {
        const Eigen::VectorXd dq = segment_delta(delta, q);
        for (int i = 0; i < d; ++i) {
            const Eigen::Index col = static_cast<Eigen::Index>(q) * d + i;
            // derivative flows through seg_q in every later row:
            //   d S~_j / d delta_q = P_{q-1} (x) D seg_q (x) seg_{q+1} ... (x) (seg_j - 1)
            TruncatedTensorSeries grown =
                chen_product(prefixes[static_cast<std::size_t>(q)],
                             segment_signature_derivative(dq, order, i + 1));
            jac(q, col) = -dot_features(grown, beta);
            for (int j = q + 1; j < n; ++j) {
                TruncatedTensorSeries next = chen_product(grown, segs[static_cast<std::size_t>(j)]);
                jac(j, col) = -(dot_features(next, beta) - dot_features(grown, beta));
                grown = std::move(next);
            }
        }
    }
    return jac;
}

IncrementVector perturb_with_snr(const IncrementVector& delta_true, double snr_db,
                                 std::uint64_t seed, const Eigen::VectorXd& u0) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("perturb_with_snr: snr_db must be finite");
    const int n = delta_true.segments();
    const int d = delta_true.channels();
    if (u0.size() != d) throw std::invalid_argument("perturb_with_snr: u0 size mismatch");

    Eigen::MatrixXd values(n + 1, d);
    values.row(0) = u0.transpose();
    for (int j = 0; j < n; ++j) values.row(j + 1) = values.row(j) + delta_true.input_deltas.row(j);

    // No noise on the first value: a constant shift is invisible to the
    // increments, so it would only dilute the realized perturbation.
    Rng rng(seed);
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(n + 1, d);
    for (int k = 1; k <= n; ++k)
        for (int c = 0; c < d; ++c) noise(k, c) = rng.gaussian();

    const double signal_norm = values.norm();
    const double noise_norm = noise.norm();
    const double alpha =
        noise_norm > 0.0 ? signal_norm / (noise_norm * std::pow(10.0, snr_db / 20.0)) : 0.0;
    values += alpha * noise;

    Eigen::MatrixXd deltas(n, d);
    for (int j = 0; j < n; ++j) deltas.row(j) = values.row(j + 1) - values.row(j);
    return IncrementVector(delta_true.time_deltas, std::move(deltas));
}

IncrementVector perturb_with_snr(const IncrementVector& delta_true, double snr_db,
                                 std::uint64_t seed) {
    return perturb_with_snr(delta_true, snr_db, seed,
                            Eigen::VectorXd::Zero(delta_true.channels()));
}

SampledPath increments_to_input(const IncrementVector& delta, const TimeGrid& grid,
                                const Eigen::VectorXd& u0) {
    if (grid.segments() != delta.segments())
        throw std::invalid_argument("increments_to_input: grid does not match increments");
    if (u0.size() != delta.channels())
        throw std::invalid_argument("increments_to_input: u0 size mismatch");
    Eigen::MatrixXd values(grid.size(), delta.channels());
    values.row(0) = u0.transpose();
    for (int j = 0; j < delta.segments(); ++j)
        values.row(j + 1) = values.row(j) + delta.input_deltas.row(j);
    return SampledPath(grid, std::move(values));
}

SolveReport solve_control(const ControlProblem& p, const IncrementVector& init,
                          const SolveOptions& opts) {
    check_problem(p, init);
    const int d = init.channels();
    const int n = init.segments();

    auto clamp = [&](IncrementVector& delta) {
        if (!p.bounds) return;
        delta.input_deltas = delta.input_deltas.cwiseMax(p.bounds->lo).cwiseMin(p.bounds->hi);
    };
    if (p.bounds) {
        if ((init.input_deltas.array() < p.bounds->lo.array()).any() ||
            (init.input_deltas.array() > p.bounds->hi.array()).any())
            throw std::invalid_argument("solve_control: init violates bounds");
    }

    IncrementVector current = init;
    Eigen::VectorXd residual = control_residual(p, current);
    if (!residual.allFinite())
        throw std::runtime_error("solve_control: residual not finite at the initial point");
    double objective = residual.squaredNorm();
    Eigen::MatrixXd jac = control_jacobian(p, current);
    Eigen::VectorXd gradient = 2.0 * jac.transpose() * residual;
    double gradient_norm = gradient.norm();

    SolveReport report{current, objective, 0, false, gradient_norm, {}};
    double lambda = opts.initial_lambda;
    report.trace.push_back({0, objective, gradient_norm, lambda});

    const Eigen::Index vars = static_cast<Eigen::Index>(n) * d;
    for (int trial = 0; trial < opts.max_iterations; ++trial) {
        if (gradient_norm <= opts.gradient_tol) {
            report.converged = true;
            break;
        }
        Eigen::MatrixXd normal = jac.transpose() * jac;
        normal.diagonal().array() += lambda;
        const Eigen::VectorXd step = normal.ldlt().solve(-jac.transpose() * residual);
        if (!step.allFinite() || step.size() != vars) {
            lambda *= 4.0;
            continue;
        }
        if (step.norm() <= opts.step_tol) {
            report.converged = true;
            break;
        }
        IncrementVector candidate = current;
        candidate.set_flat(current.flat() + step);
        clamp(candidate);
        const Eigen::VectorXd r_try = control_residual(p, candidate);
        const double f_try = r_try.allFinite() ? r_try.squaredNorm()
                                               : std::numeric_limits<double>::infinity();
        if (f_try < objective) {
            current = std::move(candidate);
            residual = r_try;
            objective = f_try;
            jac = control_jacobian(p, current);
            gradient = 2.0 * jac.transpose() * residual;
            gradient_norm = gradient.norm();
            lambda = std::max(lambda * 0.25, 1e-14);
            ++report.iterations;
            report.trace.push_back({report.iterations, objective, gradient_norm, lambda});
        } else {
            lambda *= 4.0;
            if (lambda > 1e15) break;  // stalled
        }
    }
    if (gradient_norm <= opts.gradient_tol) report.converged = true;

    report.solution = std::move(current);
    report.objective = objective;
    report.gradient_norm = gradient_norm;
    return report;
}

}  // namespace sigflow
