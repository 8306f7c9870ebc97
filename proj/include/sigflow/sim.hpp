#pragma once

#include "sigflow/features.hpp"
#include "sigflow/paths.hpp"
#include "sigflow/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace sigflow {

// Double-well drift dZ = theta*Z*(mu - Z^2) dt + sigma dU.
struct LangevinParams {
    double mu;
    double theta;  // > 0
    double sigma;  // > 0
};

// Scalar input-affine system dZ = f_0(Z) dt + sum_i f_i(Z) dU^i.
struct VectorFieldSystem {
    std::vector<std::function<double(double)>> fields;  // fields[0] = drift

    int channels() const { return static_cast<int>(fields.size()) - 1; }
};

VectorFieldSystem langevin_system(const LangevinParams& p);

LangevinParams random_langevin_params(double lo, double hi, Rng& rng);

// First-order Euler along the grid; each segment split into `substeps` equal
// pieces with the input interpolated linearly. Returns the N+1 grid samples.
// Throws with the blow-up time if the state leaves the finite range.
Eigen::VectorXd euler_simulate(const VectorFieldSystem& sys, const AugmentedPath& x, double z0,
                               int substeps = 1);

// I.i.d. uniform values per grid point and channel.
SampledPath random_piecewise_input(const TimeGrid& grid, int channels, double lo, double hi,
                                   std::uint64_t seed);

// n_train random inputs pushed through the system, all sharing z0.
// Per-trajectory seeds are split from `seed`, so trajectory m is the same no
// matter how many siblings are generated. OpenMP kernel plus serial reference,
// bit-identical outputs.
Dataset generate_dataset(const VectorFieldSystem& sys, const TimeGrid& grid, int n_train,
                         double lo, double hi, double z0, std::uint64_t seed, int substeps = 1);
Dataset generate_dataset_serial(const VectorFieldSystem& sys, const TimeGrid& grid, int n_train,
                                double lo, double hi, double z0, std::uint64_t seed,
                                int substeps = 1);

}  // namespace sigflow
