#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include "sigflow/experiments.hpp"
#include "sigflow/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace sigflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("sigflow_exp_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::vector<std::string>> csv_rows(const fs::path& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

ExperimentConfig small_prediction_config(const fs::path& out) {
    ExperimentConfig cfg;
    cfg.span = 0.5;
    cfg.dt = 0.05;
    cfg.n_train = 5;
    cfg.input_hi = 3.0;
    cfg.n_mc = 2;
    cfg.orders = {1, 2};
    cfg.seed = 3;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("prediction study artifacts") {
    TempDir tmp;
    const ExperimentConfig cfg = small_prediction_config(tmp.path);
    const StudyResult result = run_prediction_study(cfg);
    CHECK(result.runs == 2);
    CHECK(result.failed == 0);

    const auto fits = csv_rows(tmp.path / "prediction_fits.csv");
    REQUIRE(fits.size() == 1 + 2 * 2);  // header + n_mc * orders
    CHECK(fits[0] == std::vector<std::string>{"run", "M", "fit"});
    CHECK(fits[1][0] == "0");
    CHECK(fits[1][1] == "1");
    CHECK(fits[3][0] == "1");

    const auto summary = csv_rows(tmp.path / "prediction_summary.csv");
    REQUIRE(summary.size() == 3);  // header + one row per order
    CHECK(summary[0][0] == "M");
    CHECK(summary[1][1] == "2");  // n successful runs
}

TEST_CASE("single run and single order give one fit row") {
    TempDir tmp;
    ExperimentConfig cfg = small_prediction_config(tmp.path);
    cfg.n_mc = 1;
    cfg.orders = {1};
    const StudyResult result = run_prediction_study(cfg);
    CHECK(result.failed == 0);
    CHECK(csv_rows(tmp.path / "prediction_fits.csv").size() == 2);
}

TEST_CASE("failed runs are excluded from fits and counted in the summary") {
    TempDir tmp;
    ExperimentConfig cfg;
    cfg.span = 1.0;
    cfg.dt = 0.1;  // coarse grid with inputs up to 5: Euler can blow up
    cfg.n_train = 6;
    cfg.n_mc = 2;
    cfg.orders = {2, 3};
    cfg.seed = 3;
    cfg.out_dir = tmp.path;
    const StudyResult result = run_prediction_study(cfg);
    REQUIRE(result.failed == 1);  // run 0 blows up with this seed

    const auto fits = csv_rows(tmp.path / "prediction_fits.csv");
    REQUIRE(fits.size() == 1 + 2);  // only the surviving run's orders
    CHECK(fits[1][0] == "1");

    const auto summary = csv_rows(tmp.path / "prediction_summary.csv");
    CHECK(summary[1][1] == "1");  // n
    CHECK(summary[1][2] == "1");  // n_failed
}

TEST_CASE("control study artifacts") {
    TempDir tmp;
    ExperimentConfig cfg;
    cfg.span = 1.0;
    cfg.dt = 0.05;
    cfg.input_hi = 3.0;
    cfg.randomize_params = false;
    cfg.order = 3;
    cfg.n_train = 6;
    cfg.n_mc = 2;
    cfg.seed = 3;
    cfg.out_dir = tmp.path;
    const StudyResult result = run_control_study(cfg);
    CHECK(result.failed == 0);

    const auto fits = csv_rows(tmp.path / "control_fits.csv");
    REQUIRE(fits.size() == 1 + 2 * 4);  // header + n_mc * prefix fractions
    CHECK(fits[0] == std::vector<std::string>{"run", "fraction", "fit"});
    CHECK(fits[1][1] == "0.25");
    CHECK(fits[4][1] == "1");

    CHECK(fs::exists(tmp.path / "reports" / "run_000.csv"));
    CHECK(fs::exists(tmp.path / "reports" / "run_001.csv"));
    CHECK(fs::exists(tmp.path / "control_runs.csv"));
    CHECK(csv_rows(tmp.path / "control_summary.csv").size() == 5);
}

TEST_CASE("study configs overlay file values onto the defaults") {
    const Config file = Config::from_string("n_mc = 7\nT = 2.0\norders = 1,2\nseed = 9\n");
    const ExperimentConfig cfg = prediction_study_config(file);
    CHECK(cfg.n_mc == 7);
    CHECK(cfg.span == 2.0);
    CHECK(cfg.orders == std::vector<int>{1, 2});
    CHECK(cfg.seed == 9);
    CHECK(cfg.dt == 0.01);       // untouched defaults
    CHECK(cfg.input_hi == 5.0);
    CHECK(cfg.randomize_params);

    const Config cfile = Config::from_string("n_mc = 4\n");
    const ExperimentConfig ccfg = control_study_config(cfile);
    CHECK(ccfg.n_mc == 4);
    CHECK(ccfg.span == 1.0);
    CHECK(ccfg.dt == 0.05);
    CHECK(ccfg.input_hi == 3.0);
    CHECK(!ccfg.randomize_params);
    CHECK(ccfg.snr_db == 3.5);
}
