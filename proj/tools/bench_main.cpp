#include "sigflow/features.hpp"
#include "sigflow/rng.hpp"
#include "sigflow/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace {

using namespace sigflow;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        f();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

bool same(const std::vector<FeatureMatrix>& a, const std::vector<FeatureMatrix>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t m = 0; m < a.size(); ++m)
        if (a[m].values != b[m].values) return false;
    return true;
}

bool same(const Dataset& a, const Dataset& b) {
    for (int m = 0; m < a.trajectories(); ++m) {
        if (a.inputs[static_cast<std::size_t>(m)].values != b.inputs[static_cast<std::size_t>(m)].values) return false;
        if (a.outputs[static_cast<std::size_t>(m)] != b.outputs[static_cast<std::size_t>(m)]) return false;
    }
    return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
    if (const char* env = std::getenv("SIGFLOW_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) omp_set_num_threads(threads);
    }
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

    const TimeGrid grid = TimeGrid::uniform(3.0, 0.01);
    const int n_paths = 64;
    const int order = 4;
    const VectorFieldSystem sys = langevin_system(LangevinParams{1.0, 1.0, 1.0});

    std::vector<AugmentedPath> paths;
    paths.reserve(n_paths);
    for (int m = 0; m < n_paths; ++m)
        paths.push_back(augment_with_time(
            random_piecewise_input(grid, 1, 0.0, 5.0, split_seed(42, static_cast<std::uint64_t>(m)))));

    std::printf("%-28s %10s %10s %8s %6s\n", "kernel", "serial ms", "omp ms", "speedup", "equal");

    std::vector<FeatureMatrix> serial_features, omp_features;
    const double t_serial_feat =
        time_best_of(3, [&] { serial_features = batch_feature_matrices_serial(paths, order); });
    const double t_omp_feat =
        time_best_of(3, [&] { omp_features = batch_feature_matrices(paths, order); });
    std::printf("%-28s %10.2f %10.2f %8.2f %6s\n", "batch_feature_matrices", t_serial_feat,
                t_omp_feat, t_serial_feat / t_omp_feat,
                same(serial_features, omp_features) ? "yes" : "NO");

    Dataset serial_data = generate_dataset_serial(sys, grid, n_paths, 0.0, 5.0, 0.0, 7);
    Dataset omp_data = serial_data;
    const double t_serial_data = time_best_of(
        3, [&] { serial_data = generate_dataset_serial(sys, grid, n_paths, 0.0, 5.0, 0.0, 7); });
    const double t_omp_data =
        time_best_of(3, [&] { omp_data = generate_dataset(sys, grid, n_paths, 0.0, 5.0, 0.0, 7); });
    std::printf("%-28s %10.2f %10.2f %8.2f %6s\n", "generate_dataset", t_serial_data, t_omp_data,
                t_serial_data / t_omp_data, same(serial_data, omp_data) ? "yes" : "NO");

    return 0;
}
