#include "sigflow/features.hpp"

#include <Eigen/QR>

#include <cmath>
#include <exception>
#include <stdexcept>

namespace sigflow {

long feature_count(int channels, int order) {
    long total = 0, sz = 1;
    for (int k = 1; k <= order; ++k) {
        sz *= channels + 1;
        total += sz;
    }
    return total;
}

Dataset::Dataset(TimeGrid g, std::vector<SampledPath> in, std::vector<Eigen::VectorXd> out,
                 double z0_)
    : grid(std::move(g)), inputs(std::move(in)), outputs(std::move(out)), z0(z0_) {
    if (inputs.empty() || inputs.size() != outputs.size())
        throw std::invalid_argument("Dataset: need matching, non-empty inputs and outputs");
    const int d = inputs.front().channels();
    for (std::size_t m = 0; m < inputs.size(); ++m) {
        if (!(inputs[m].grid == grid)) throw std::invalid_argument("Dataset: grids differ");
        if (inputs[m].channels() != d) throw std::invalid_argument("Dataset: channel counts differ");
        if (outputs[m].size() != grid.size())
            throw std::invalid_argument("Dataset: output length does not match grid");
        if (outputs[m][0] != z0)
            throw std::invalid_argument("Dataset: trajectories must share the initial output z0");
    }
}

FeatureMatrix build_feature_matrix(const AugmentedPath& x, int order) {
    const SignatureStream stream = signature_stream(x, order);
    const long cols = feature_count(x.channels(), order);
    Eigen::MatrixXd values(stream.rows.size(), cols);
    for (std::size_t j = 0; j < stream.rows.size(); ++j) {
        const auto& coeffs = stream.rows[j].data();
        for (long c = 0; c < cols; ++c) values(static_cast<Eigen::Index>(j), c) = coeffs[static_cast<std::size_t>(c) + 1];
    }
    return FeatureMatrix{std::move(values), x.grid, order, x.channels()};
}

std::vector<FeatureMatrix> batch_feature_matrices_serial(std::span<const AugmentedPath> paths,
                                                         int order) {
    std::vector<FeatureMatrix> out;
    out.reserve(paths.size());
    for (const auto& x : paths) out.push_back(build_feature_matrix(x, order));
    return out;
}

std::vector<FeatureMatrix> batch_feature_matrices(std::span<const AugmentedPath> paths, int order) {
    std::vector<FeatureMatrix> out(paths.size(),
                                   FeatureMatrix{Eigen::MatrixXd(), TimeGrid({0.0, 1.0}), 0, 0});
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long m = 0; m < static_cast<long>(paths.size()); ++m) {
        try {
            out[static_cast<std::size_t>(m)] = build_feature_matrix(paths[static_cast<std::size_t>(m)], order);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

SigModel ridge_fit(const Dataset& data, int order, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("ridge_fit: gamma must be >= 0");
    const int n = data.grid.segments();
    const int d = data.channels();
    const long cols = feature_count(d, order);
    const long data_rows = static_cast<long>(n) * data.trajectories();

    std::vector<AugmentedPath> augmented;
    augmented.reserve(data.inputs.size());
    for (const auto& u : data.inputs) augmented.push_back(augment_with_time(u));
    const std::vector<FeatureMatrix> features = batch_feature_matrices(augmented, order);

    // gamma > 0: append sqrt(gamma)*I rows so the QR solves the ridge problem.
    const long rows = data_rows + (gamma > 0.0 ? cols : 0);
    Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd targets = Eigen::VectorXd::Zero(rows);
    for (int m = 0; m < data.trajectories(); ++m) {
        stacked.middleRows(static_cast<long>(m) * n, n) = features[static_cast<std::size_t>(m)].values;
        targets.segment(static_cast<long>(m) * n, n) =
            data.outputs[static_cast<std::size_t>(m)].tail(n).array() - data.z0;
    }
    if (gamma > 0.0)
        stacked.bottomRows(cols) =
            std::sqrt(gamma) * Eigen::MatrixXd::Identity(cols, cols);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
    if (gamma == 0.0 && qr.rank() < cols)
        throw std::runtime_error(
            "ridge_fit: stacked feature matrix is rank deficient with gamma = 0; "
            "set gamma > 0 to regularize");
    Eigen::VectorXd beta = qr.solve(targets);
    return SigModel{std::move(beta), order, d, data.z0, gamma, data.grid};
}

Eigen::VectorXd predict_outputs(const SigModel& model, const AugmentedPath& x) {
    if (x.channels() != model.channels)
        throw std::invalid_argument("predict_outputs: channel count does not match model");
    const FeatureMatrix f = build_feature_matrix(x, model.order);
    Eigen::VectorXd z(x.grid.size());
    z[0] = model.z0;
    z.tail(f.values.rows()) = (f.values * model.beta).array() + model.z0;
    return z;
}

double fit_score(const Eigen::VectorXd& z_hat, const Eigen::VectorXd& z_true) {
    if (z_hat.size() != z_true.size()) throw std::invalid_argument("fit_score: length mismatch");
    const double ref = z_true.norm();
    if (ref == 0.0) throw std::invalid_argument("fit_score: reference trajectory has zero norm");
    return 100.0 * (1.0 - (z_hat - z_true).norm() / ref);
}

}  // namespace sigflow
