#pragma once

#include "sigflow/config.hpp"
#include "sigflow/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sigflow {

// Everything a Monte Carlo study needs; defaults mirror the desk-scale
// experiment setups and every field can be overridden from a config file.
struct ExperimentConfig {
    double span = 3.0;
    double dt = 0.01;
    int channels = 1;
    std::vector<int> orders = {1, 2, 3, 4, 5};  // prediction study
    int order = 4;                              // control study and tools
    double gamma = 1e-8;
    int n_train = 40;
    double input_lo = 0.0;
    double input_hi = 5.0;
    double z0 = 0.0;
    int substeps = 1;
    bool randomize_params = true;  // draw (mu, theta, sigma) per run
    LangevinParams params{1.0, 1.0, 1.0};
    double param_lo = 0.5;
    double param_hi = 1.5;
    int n_mc = 50;
    double snr_db = 3.5;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "results";
};

// Defaults for the prediction study (T=3, dt=0.01, inputs on [0,5],
// randomized system parameters) overlaid with the config file.
ExperimentConfig prediction_study_config(const Config& cfg);

// Defaults for the tracking study (T=1, dt=0.05, inputs on [0,3], fixed
// (1,1,1) parameters, SNR 3.5 dB warm start) overlaid with the config file.
ExperimentConfig control_study_config(const Config& cfg);

struct StudyResult {
    int runs = 0;
    int failed = 0;
    std::vector<std::filesystem::path> files;
};

// Per run: fresh system, dataset and test input; fit score per truncation
// order. Writes prediction_fits.csv (run,M,fit) and per-order quantiles to
// prediction_summary.csv. Runs execute in parallel with split seeds; rows are
// emitted in run order, so outputs are a pure function of (config, seed).
StudyResult run_prediction_study(const ExperimentConfig& cfg);

// Per run: train, simulate a hidden input to get the target, warm-start from
// an SNR-perturbed copy, solve, then replay the reconstructed input through
// the true system. Writes control_fits.csv (run,fraction,fit), per-run solver
// traces under reports/, and quantiles to control_summary.csv.
StudyResult run_control_study(const ExperimentConfig& cfg);

// Fractions of the trajectory the control study scores against.
inline constexpr double kPrefixFractions[] = {0.25, 0.5, 0.75, 1.0};

}  // namespace sigflow
