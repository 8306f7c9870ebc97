#pragma once

#include "sigflow/paths.hpp"
#include "sigflow/signature.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sigflow {

// Number of signature terms of levels 1..order for d input channels.
long feature_count(int channels, int order);

// Row j holds the signature over [0, t_{j+1}] with the constant level-0 term
// dropped; columns are level-major, lexicographic within each level.
struct FeatureMatrix {
    Eigen::MatrixXd values;  // N x L
    TimeGrid grid;
    int order;
    int channels;
};

// Input/output trajectories on a common grid with a shared initial output.
struct Dataset {
    Dataset(TimeGrid grid, std::vector<SampledPath> inputs, std::vector<Eigen::VectorXd> outputs,
            double z0);

    int channels() const { return inputs.front().channels(); }
    int trajectories() const { return static_cast<int>(inputs.size()); }

    TimeGrid grid;
    std::vector<SampledPath> inputs;
    std::vector<Eigen::VectorXd> outputs;  // each N+1 values, outputs[m][0] == z0
    double z0;
};

// Linear readout on truncated-signature features.
struct SigModel {
    Eigen::VectorXd beta;  // length feature_count(channels, order)
    int order;
    int channels;
    double z0;
    double gamma;
    TimeGrid grid;  // training grid, retained for control
};

FeatureMatrix build_feature_matrix(const AugmentedPath& x, int order);

// Feature matrices for a batch of paths; the OpenMP kernel and the serial
// reference produce bit-identical results.
std::vector<FeatureMatrix> batch_feature_matrices(std::span<const AugmentedPath> paths, int order);
std::vector<FeatureMatrix> batch_feature_matrices_serial(std::span<const AugmentedPath> paths,
                                                         int order);

// Ridge regression of stacked output differences on stacked features, solved
// through a rank-revealing QR of the gamma-augmented matrix. gamma = 0 demands
// a full-column-rank stack and throws otherwise.
SigModel ridge_fit(const Dataset& data, int order, double gamma);

// z0 plus the feature rows applied to beta; element 0 is exactly z0.
Eigen::VectorXd predict_outputs(const SigModel& model, const AugmentedPath& x);

// 100 * (1 - ||z_hat - z_true|| / ||z_true||), Euclidean norms.
double fit_score(const Eigen::VectorXd& z_hat, const Eigen::VectorXd& z_true);

}  // namespace sigflow
