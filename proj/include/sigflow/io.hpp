#pragma once

#include "sigflow/control.hpp"
#include "sigflow/features.hpp"
#include "sigflow/paths.hpp"
#include "sigflow/tensor_series.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>

namespace sigflow {

// Shortest decimal string that round-trips the exact double.
std::string format_double(double x);

// Parse failure carrying file, line and column (all 1-based).
struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Path CSV: header "t,u1,...,ud", one row per grid point.
void write_path_csv(const std::filesystem::path& file, const SampledPath& u);
SampledPath read_path_csv(const std::filesystem::path& file);

// Trajectory CSV: header "t,u1,...,ud,z".
void write_trajectory_csv(const std::filesystem::path& file, const SampledPath& input,
                          const Eigen::VectorXd& output);
std::pair<SampledPath, Eigen::VectorXd> read_trajectory_csv(const std::filesystem::path& file);

// One trajectory CSV per file, traj_000.csv upward.
void write_dataset_csv(const std::filesystem::path& dir, const Dataset& data);
// All *.csv in the directory, in filename order.
Dataset read_dataset_dir(const std::filesystem::path& dir);

// Output CSV: header "t,z".
void write_output_csv(const std::filesystem::path& file, const TimeGrid& grid,
                      const Eigen::VectorXd& z);
std::pair<TimeGrid, Eigen::VectorXd> read_output_csv(const std::filesystem::path& file);

// Model CSV: "# key = value" metadata lines, then "index,beta" rows.
void write_model_csv(const std::filesystem::path& file, const SigModel& model);
SigModel read_model_csv(const std::filesystem::path& file);

// Signature CSV: words as digit strings (level 0 is the empty string),
// level-major order.
void write_signature_csv(std::ostream& os, const TruncatedTensorSeries& s);
void write_signature_csv(const std::filesystem::path& file, const TruncatedTensorSeries& s);
TruncatedTensorSeries read_signature_csv(const std::filesystem::path& file);

// Solver trace CSV: "iter,objective,grad_norm,lambda".
void write_solve_report_csv(const std::filesystem::path& file, const SolveReport& report);

}  // namespace sigflow
