#include "sigflow/config.hpp"
#include "sigflow/control.hpp"
#include "sigflow/experiments.hpp"
#include "sigflow/io.hpp"
#include "sigflow/signature.hpp"
#include "sigflow/sim.hpp"

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace sigflow;

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "configuration file (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out, "override the output directory");
}

Config load_config(const CommonArgs& args) { return Config::load(args.config); }

void warn_unused(const Config& cfg) {
    for (const auto& key : cfg.unused_keys())
        std::cerr << "warning: unused config key '" << key << "'\n";
}

fs::path out_dir_of(const Config& cfg, const CommonArgs& args) {
    return args.out ? fs::path(*args.out) : fs::path(cfg.get_string("out_dir", "results"));
}

std::uint64_t seed_of(const Config& cfg, const CommonArgs& args) {
    return args.seed ? *args.seed : cfg.get_u64("seed", 0);
}

bool has_output_column(const fs::path& file) {
    std::ifstream in(file);
    std::string header;
    if (!in || !std::getline(in, header)) throw CsvError("cannot open " + file.string());
    if (!header.empty() && header.back() == '\r') header.pop_back();
    return header.size() >= 2 && header.compare(header.size() - 2, 2, ",z") == 0;
}

int cmd_sig(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const SampledPath u = read_path_csv(cfg.get_string("input"));
    const int order = cfg.get_int("order");
    warn_unused(cfg);
    write_signature_csv(std::cout, path_signature(augment_with_time(u), order));
    return 0;
}

// Fit of the model on each of its own training trajectories, scored on t_1..T.
std::vector<double> training_fits(const SigModel& model, const Dataset& data) {
    const int n = data.grid.segments();
    std::vector<double> fits;
    fits.reserve(static_cast<std::size_t>(data.trajectories()));
    for (int m = 0; m < data.trajectories(); ++m) {
        const Eigen::VectorXd z_hat =
            predict_outputs(model, augment_with_time(data.inputs[static_cast<std::size_t>(m)]));
        fits.push_back(
            fit_score(z_hat.tail(n), data.outputs[static_cast<std::size_t>(m)].tail(n)));
    }
    return fits;
}

int cmd_train(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const fs::path out_dir = out_dir_of(cfg, args);
    const int order = cfg.get_int("order");
    const double gamma = cfg.get_double("gamma", 1e-8);

    std::optional<Dataset> data;
    if (cfg.has("dataset_dir")) {
        data = read_dataset_dir(cfg.get_string("dataset_dir"));
    } else {
        // No dataset on disk: generate one from the configured system.
        const TimeGrid grid = TimeGrid::uniform(cfg.get_double("T"), cfg.get_double("dt"));
        const VectorFieldSystem sys = langevin_system(LangevinParams{
            cfg.get_double("mu", 1.0), cfg.get_double("theta", 1.0), cfg.get_double("sigma", 1.0)});
        data = generate_dataset(sys, grid, cfg.get_int("n_train"), cfg.get_double("input_lo"),
                                cfg.get_double("input_hi"), cfg.get_double("z0", 0.0),
                                seed_of(cfg, args), cfg.get_int("substeps", 1));
        if (cfg.get_int("write_dataset", 0) != 0) write_dataset_csv(out_dir / "dataset", *data);
    }
    const fs::path model_file = cfg.get_string("model_out", (out_dir / "model.csv").string());
    warn_unused(cfg);

    const SigModel model = ridge_fit(*data, order, gamma);
    write_model_csv(model_file, model);
    const std::vector<double> fits = training_fits(model, *data);
    fs::create_directories(out_dir);
    std::ofstream fits_csv(out_dir / "training_fits.csv");
    fits_csv << "trajectory,fit\n";
    double mean = 0.0;
    for (std::size_t m = 0; m < fits.size(); ++m) {
        fits_csv << m << "," << format_double(fits[m]) << "\n";
        mean += fits[m];
    }
    std::cout << "model written to " << model_file.string() << "\n";
    std::cout << "training fit: " << mean / static_cast<double>(fits.size()) << "\n";
    return 0;
}

int cmd_predict(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const fs::path out_dir = out_dir_of(cfg, args);
    const SigModel model = read_model_csv(cfg.get_string("model"));
    const fs::path input_file = cfg.get_string("input");
    warn_unused(cfg);

    std::optional<Eigen::VectorXd> truth;
    SampledPath u = [&] {
        if (has_output_column(input_file)) {
            auto [input, output] = read_trajectory_csv(input_file);
            truth = std::move(output);
            return std::move(input);
        }
        return read_path_csv(input_file);
    }();

    const Eigen::VectorXd z_hat = predict_outputs(model, augment_with_time(u));
    write_output_csv(out_dir / "prediction.csv", u.grid, z_hat);
    std::cout << "prediction written to " << (out_dir / "prediction.csv").string() << "\n";
    if (truth) {
        const int n = u.grid.segments();
        std::cout << "fit: " << format_double(fit_score(z_hat.tail(n), truth->tail(n))) << "\n";
    }
    return 0;
}

int cmd_control(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const fs::path out_dir = out_dir_of(cfg, args);
    const SigModel model = read_model_csv(cfg.get_string("model"));
    auto [grid, desired] = read_output_csv(cfg.get_string("target"));
    if (std::abs(desired[0] - model.z0) > 1e-12)
        throw std::runtime_error("control: target initial value does not match the model z0");

    ControlProblem problem{model, difference_targets(desired), grid, std::nullopt};
    const int n = grid.segments();
    const int d = model.channels;
    if (cfg.has("bound_lo") || cfg.has("bound_hi")) {
        const double lo = cfg.get_double("bound_lo");
        const double hi = cfg.get_double("bound_hi");
        problem.bounds = IncrementBounds{Eigen::MatrixXd::Constant(n, d, lo),
                                         Eigen::MatrixXd::Constant(n, d, hi)};
    }

    Eigen::VectorXd time_deltas(n);
    for (int j = 0; j < n; ++j) time_deltas[j] = grid.dt(j);
    IncrementVector init(time_deltas, Eigen::MatrixXd::Zero(n, d));
    if (cfg.has("init_input")) {
        const SampledPath warm = read_path_csv(cfg.get_string("init_input"));
        init = increment_vector(augment_with_time(warm));
        if (cfg.has("snr_db"))
            init = perturb_with_snr(init, cfg.get_double("snr_db"), seed_of(cfg, args),
                                    warm.values.row(0).transpose());
    }
    const double u0 = cfg.get_double("u0", 0.0);
    warn_unused(cfg);

    const SolveReport report = solve_control(problem, init);
    const SampledPath u_hat =
        increments_to_input(report.solution, grid, Eigen::VectorXd::Constant(d, u0));
    write_path_csv(out_dir / "control_input.csv", u_hat);
    write_solve_report_csv(out_dir / "solve_report.csv", report);
    const Eigen::VectorXd predicted = predict_outputs(model, augment_with_time(u_hat));
    write_output_csv(out_dir / "predicted_output.csv", grid, predicted);

    std::cout << "converged: " << (report.converged ? "yes" : "no")
              << "  iterations: " << report.iterations
              << "  objective: " << format_double(report.objective) << "\n";
    std::cout << "model-predicted fit vs target: "
              << format_double(fit_score(predicted.tail(n), desired.tail(n))) << "\n";
    std::cout << "solution written to " << (out_dir / "control_input.csv").string() << "\n";
    return 0;
}

int cmd_mc_predict(const CommonArgs& args) {
    const Config file = load_config(args);
    ExperimentConfig cfg = prediction_study_config(file);
    if (args.seed) cfg.seed = *args.seed;
    if (args.out) cfg.out_dir = *args.out;
    warn_unused(file);
    const StudyResult result = run_prediction_study(cfg);
    std::cout << "mc-predict: " << result.runs - result.failed << "/" << result.runs
              << " runs succeeded\n";
    return result.failed == 0 ? 0 : 1;
}

int cmd_mc_control(const CommonArgs& args) {
    const Config file = load_config(args);
    ExperimentConfig cfg = control_study_config(file);
    if (args.seed) cfg.seed = *args.seed;
    if (args.out) cfg.out_dir = *args.out;
    warn_unused(file);
    const StudyResult result = run_control_study(cfg);
    std::cout << "mc-control: " << result.runs - result.failed << "/" << result.runs
              << " runs succeeded\n";
    return result.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* env = std::getenv("SIGFLOW_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) omp_set_num_threads(threads);
    }
#endif

    CLI::App app{"signature features for trajectory prediction and open-loop tracking control"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* sig = app.add_subcommand("sig", "print the truncated signature of a path CSV");
    auto* train = app.add_subcommand("train", "fit a signature model and save it");
    auto* predict = app.add_subcommand("predict", "apply a saved model to an input CSV");
    auto* control = app.add_subcommand("control", "solve one tracking problem from a target CSV");
    auto* mc_predict = app.add_subcommand("mc-predict", "Monte Carlo prediction study");
    auto* mc_control = app.add_subcommand("mc-control", "Monte Carlo tracking study");
    for (auto* cmd : {sig, train, predict, control, mc_predict, mc_control})
        add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sig)) return cmd_sig(args);
        if (app.got_subcommand(train)) return cmd_train(args);
        if (app.got_subcommand(predict)) return cmd_predict(args);
        if (app.got_subcommand(control)) return cmd_control(args);
        if (app.got_subcommand(mc_predict)) return cmd_mc_predict(args);
        if (app.got_subcommand(mc_control)) return cmd_mc_control(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
