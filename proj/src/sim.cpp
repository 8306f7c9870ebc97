#include "sigflow/sim.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

namespace sigflow {

VectorFieldSystem langevin_system(const LangevinParams& p) {
    if (!(p.theta > 0.0) || !(p.sigma > 0.0))
        throw std::invalid_argument("langevin_system: theta and sigma must be positive");
    VectorFieldSystem sys;
    sys.fields.push_back([mu = p.mu, theta = p.theta](double z) { return theta * z * (mu - z * z); });
    sys.fields.push_back([sigma = p.sigma](double) { return sigma; });
    return sys;
}

LangevinParams random_langevin_params(double lo, double hi, Rng& rng) {
    return LangevinParams{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

Eigen::VectorXd euler_simulate(const VectorFieldSystem& sys, const AugmentedPath& x, double z0,
                               int substeps) {
    if (substeps < 1) throw std::invalid_argument("euler_simulate: substeps must be >= 1");
    if (x.channels() != sys.channels())
        throw std::invalid_argument("euler_simulate: input channels do not match the system");
    const int n = x.grid.segments();
    const int d = x.channels();
    Eigen::VectorXd z(n + 1);
    z[0] = z0;
    double state = z0;
    for (int j = 0; j < n; ++j) {
        const double h = x.grid.dt(j) / substeps;
        for (int s = 0; s < substeps; ++s) {
            double step = sys.fields[0](state) * h;
            for (int i = 1; i <= d; ++i)
                step += sys.fields[static_cast<std::size_t>(i)](state) *
                        (x.values(j + 1, i) - x.values(j, i)) / substeps;
            state += step;
            if (!std::isfinite(state)) {
                std::ostringstream msg;
                msg << "euler_simulate: state became non-finite at t = "
                    << x.grid.time(j) + (s + 1) * h;
                throw std::runtime_error(msg.str());
            }
        }
        z[j + 1] = state;
    }
    return z;
}

SampledPath random_piecewise_input(const TimeGrid& grid, int channels, double lo, double hi,
                                   std::uint64_t seed) {
    if (!(lo < hi)) throw std::invalid_argument("random_piecewise_input: need lo < hi");
    if (channels < 1) throw std::invalid_argument("random_piecewise_input: need channels >= 1");
    Rng rng(seed);
    Eigen::MatrixXd values(grid.size(), channels);
    for (int k = 0; k < grid.size(); ++k)
        for (int c = 0; c < channels; ++c) values(k, c) = rng.uniform(lo, hi);
    return SampledPath(grid, std::move(values));
}

namespace {

std::pair<SampledPath, Eigen::VectorXd> one_trajectory(const VectorFieldSystem& sys,
                                                       const TimeGrid& grid, double lo, double hi,
                                                       double z0, std::uint64_t seed,
                                                       int substeps) {
    SampledPath input = random_piecewise_input(grid, sys.channels(), lo, hi, seed);
    Eigen::VectorXd output = euler_simulate(sys, augment_with_time(input), z0, substeps);
    return {std::move(input), std::move(output)};
}

}  // namespace

Dataset generate_dataset_serial(const VectorFieldSystem& sys, const TimeGrid& grid, int n_train,
                                double lo, double hi, double z0, std::uint64_t seed,
                                int substeps) {
    if (n_train < 1) throw std::invalid_argument("generate_dataset: need n_train >= 1");
    std::vector<SampledPath> inputs;
    std::vector<Eigen::VectorXd> outputs;
    inputs.reserve(static_cast<std::size_t>(n_train));
    outputs.reserve(static_cast<std::size_t>(n_train));
    for (int m = 0; m < n_train; ++m) {
        try {
            auto [input, output] =
                one_trajectory(sys, grid, lo, hi, z0, split_seed(seed, static_cast<std::uint64_t>(m)), substeps);
            inputs.push_back(std::move(input));
            outputs.push_back(std::move(output));
        } catch (const std::exception& e) {
            throw std::runtime_error("generate_dataset: trajectory " + std::to_string(m) + ": " +
                                     e.what());
        }
    }
    return Dataset(grid, std::move(inputs), std::move(outputs), z0);
}

Dataset generate_dataset(const VectorFieldSystem& sys, const TimeGrid& grid, int n_train,
                         double lo, double hi, double z0, std::uint64_t seed, int substeps) {
    if (n_train < 1) throw std::invalid_argument("generate_dataset: need n_train >= 1");
    std::vector<SampledPath> inputs(static_cast<std::size_t>(n_train),
                                    SampledPath(grid, Eigen::MatrixXd::Zero(grid.size(), 1)));
    std::vector<Eigen::VectorXd> outputs(static_cast<std::size_t>(n_train));
    std::exception_ptr err;
    int err_index = -1;
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < n_train; ++m) {
        try {
            auto [input, output] =
                one_trajectory(sys, grid, lo, hi, z0, split_seed(seed, static_cast<std::uint64_t>(m)), substeps);
            inputs[static_cast<std::size_t>(m)] = std::move(input);
            outputs[static_cast<std::size_t>(m)] = std::move(output);
        } catch (...) {
#pragma omp critical
            if (!err || m < err_index) {
                err = std::current_exception();
                err_index = m;
            }
        }
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const std::exception& e) {
            throw std::runtime_error("generate_dataset: trajectory " + std::to_string(err_index) +
                                     ": " + e.what());
        }
    }
    return Dataset(grid, std::move(inputs), std::move(outputs), z0);
}

}  // namespace sigflow
