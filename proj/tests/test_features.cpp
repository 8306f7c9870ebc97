#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sigflow/features.hpp"
#include "sigflow/io.hpp"
#include "sigflow/sim.hpp"

#include <filesystem>

using namespace sigflow;

namespace {

// A small synthetic dataset whose outputs come from the Langevin system.
Dataset toy_dataset(int n_train, int segments, std::uint64_t seed) {
    const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / segments);
    const VectorFieldSystem sys = langevin_system(LangevinParams{1.0, 1.0, 1.0});
    return generate_dataset_serial(sys, grid, n_train, 0.0, 3.0, 0.0, seed);
}

}  // namespace

TEST_CASE("feature count formula matches direct word enumeration") {
    for (int d : {1, 2, 3})
        for (int order = 1; order <= 5; ++order) {
            const long expected = oracles::enumerate_word_count(d + 1, order);
            CHECK(feature_count(d, order) == expected);
            // closed form from the truncated-signature dimension
            long power = 1;
            for (int k = 0; k <= order; ++k) power *= d + 1;
            CHECK(feature_count(d, order) == (power - 1) / d - 1);
        }
    CHECK(feature_count(1, 4) == 30);
    CHECK(feature_count(1, 5) == 62);
}

TEST_CASE("feature matrix layout") {
    Rng rng(71);
    const AugmentedPath x = oracles::random_augmented_path(rng, 1, 5);
    const FeatureMatrix f = build_feature_matrix(x, 4);
    CHECK(f.values.rows() == 5);
    CHECK(f.values.cols() == 30);

    // last row reproduces the full-path signature, levels 1..M
    const auto sig = path_signature(x, 4);
    for (long c = 0; c < 30; ++c)
        CHECK(f.values(4, c) == sig.data()[static_cast<std::size_t>(c) + 1]);
}

TEST_CASE("single segment at order 1 gives the raw increments") {
    const SampledPath u{TimeGrid({0.0, 0.5}), Eigen::MatrixXd::Constant(2, 1, 0.0)};
    Eigen::MatrixXd values(2, 1);
    values << 1.0, 3.5;
    const SampledPath u2{u.grid, values};
    const FeatureMatrix f = build_feature_matrix(augment_with_time(u2), 1);
    REQUIRE(f.values.rows() == 1);
    REQUIRE(f.values.cols() == 2);
    CHECK(f.values(0, 0) == 0.5);   // time increment
    CHECK(f.values(0, 1) == 2.5);   // input increment
}

TEST_CASE("ridge fit analytic cases") {
    // identity features: beta = z / (1 + gamma) componentwise
    const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd z(4);
    z << 1.0, -2.0, 0.5, 3.0;
    for (double gamma : {0.0, 0.5, 2.0}) {
        const Eigen::VectorXd beta = oracles::ridge_normal_equations(s, z, gamma);
        for (int i = 0; i < 4; ++i) CHECK(beta[i] == doctest::Approx(z[i] / (1.0 + gamma)));
    }
}

TEST_CASE("ridge fit on simulated data") {
    const Dataset data = toy_dataset(6, 8, 123);
    const int order = 2;

    SUBCASE("normal equations hold") {
        for (double gamma : {1e-8, 1e-2}) {
            const SigModel model = ridge_fit(data, order, gamma);
            // rebuild the stacked system and check the optimality condition
            const int n = data.grid.segments();
            const long cols = feature_count(1, order);
            Eigen::MatrixXd stacked(static_cast<long>(n) * data.trajectories(), cols);
            Eigen::VectorXd targets(stacked.rows());
            for (int m = 0; m < data.trajectories(); ++m) {
                const auto f = build_feature_matrix(
                    augment_with_time(data.inputs[static_cast<std::size_t>(m)]), order);
                stacked.middleRows(static_cast<long>(m) * n, n) = f.values;
                targets.segment(static_cast<long>(m) * n, n) =
                    data.outputs[static_cast<std::size_t>(m)].tail(n).array() - data.z0;
            }
            Eigen::MatrixXd gram = stacked.transpose() * stacked;
            gram.diagonal().array() += gamma;
            const Eigen::VectorXd rhs = stacked.transpose() * targets;
            const double residual = (gram * model.beta - rhs).norm() / rhs.norm();
            CHECK(residual <= 1e-8);
        }
    }

    SUBCASE("large gamma shrinks beta") {
        const double small = ridge_fit(data, order, 1e-8).beta.norm();
        const double large = ridge_fit(data, order, 1e8).beta.norm();
        CHECK(large < 1e-4 * small);
    }

    SUBCASE("exact recovery of a planted readout with gamma = 0") {
        Rng rng(77);
        const long cols = feature_count(1, order);
        Eigen::VectorXd beta_star(cols);
        for (Eigen::Index i = 0; i < cols; ++i) beta_star[i] = rng.uniform(-1.0, 1.0);
        std::vector<Eigen::VectorXd> outputs;
        for (const auto& u : data.inputs) {
            const auto f = build_feature_matrix(augment_with_time(u), order);
            Eigen::VectorXd z(data.grid.size());
            z[0] = data.z0;
            z.tail(f.values.rows()) = (f.values * beta_star).array() + data.z0;
            outputs.push_back(std::move(z));
        }
        const Dataset planted(data.grid, data.inputs, std::move(outputs), data.z0);
        const SigModel model = ridge_fit(planted, order, 0.0);
        CHECK((model.beta - beta_star).norm() <= 1e-8 * beta_star.norm());
    }
}

TEST_CASE("rank deficiency with gamma = 0 is reported") {
    // one short trajectory, many features: columns cannot be independent
    const Dataset data = toy_dataset(1, 4, 321);
    CHECK_THROWS_WITH_AS(ridge_fit(data, 3, 0.0) /* L = 14 > 4 rows */,
                         doctest::Contains("rank deficient"), std::runtime_error);
}

TEST_CASE("prediction") {
    const Dataset data = toy_dataset(8, 10, 777);
    const SigModel model = ridge_fit(data, 3, 1e-8);

    SUBCASE("zero readout predicts the constant z0") {
        SigModel zero = model;
        zero.beta.setZero();
        const auto z = predict_outputs(zero, augment_with_time(data.inputs[0]));
        CHECK(z.isConstant(model.z0, 0.0));
    }

    SUBCASE("prediction starts exactly at z0 and is affine in beta") {
        const AugmentedPath x = augment_with_time(data.inputs[1]);
        const Eigen::VectorXd z1 = predict_outputs(model, x);
        CHECK(z1[0] == model.z0);
        SigModel doubled = model;
        doubled.beta *= 2.0;
        const Eigen::VectorXd z2 = predict_outputs(doubled, x);
        for (int k = 0; k < z1.size(); ++k)
            CHECK(z2[k] - model.z0 == doctest::Approx(2.0 * (z1[k] - model.z0)).epsilon(1e-12));
    }

    SUBCASE("channel mismatch is rejected") {
        Rng rng(3);
        const AugmentedPath wide = oracles::random_augmented_path(rng, 2, 10);
        CHECK_THROWS_AS(predict_outputs(model, wide), std::invalid_argument);
    }

    SUBCASE("training replay reproduces the training residuals") {
        const int n = data.grid.segments();
        for (int m = 0; m < data.trajectories(); ++m) {
            const AugmentedPath x = augment_with_time(data.inputs[static_cast<std::size_t>(m)]);
            const Eigen::VectorXd z_hat = predict_outputs(model, x);
            const auto f = build_feature_matrix(x, model.order);
            const Eigen::VectorXd residual =
                data.outputs[static_cast<std::size_t>(m)].tail(n).array() -
                (f.values * model.beta).array() - model.z0;
            const double direct =
                (z_hat.tail(n) - data.outputs[static_cast<std::size_t>(m)].tail(n)).norm();
            CHECK(direct == doctest::Approx(residual.norm()).epsilon(1e-12));
        }
    }
}

TEST_CASE("fit score") {
    Eigen::VectorXd z(3);
    z << 1.0, 2.0, -1.0;
    CHECK(fit_score(z, z) == 100.0);
    CHECK(fit_score(Eigen::VectorXd::Zero(3), z) == doctest::Approx(0.0));
    CHECK(fit_score(2.0 * z, z) == doctest::Approx(0.0));
    CHECK_THROWS_AS(fit_score(z, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(fit_score(z, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("features are invariant under midpoint refinement") {
    // refining the sampling of the same continuous path leaves the rows at
    // the original times unchanged, hence predictions and fit as well
    Rng rng(83);
    const AugmentedPath x = oracles::random_augmented_path(rng, 1, 6);
    const AugmentedPath refined = oracles::insert_midpoint(x, 2);
    const FeatureMatrix f = build_feature_matrix(x, 3);
    const FeatureMatrix g = build_feature_matrix(refined, 3);
    for (int j = 0; j < 6; ++j) {
        const int jr = j >= 2 ? j + 1 : j;  // rows after the insertion shift by one
        const double scale = std::max(1.0, f.values.row(j).cwiseAbs().maxCoeff());
        CHECK((g.values.row(jr) - f.values.row(j)).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    }
}

TEST_CASE("model csv round trip is exact") {
    const Dataset data = toy_dataset(5, 7, 999);
    const SigModel model = ridge_fit(data, 3, 1e-8);
    const auto file = std::filesystem::temp_directory_path() / "sigflow_model_roundtrip.csv";
    write_model_csv(file, model);
    const SigModel back = read_model_csv(file);
    CHECK(back.beta == model.beta);
    CHECK(back.order == model.order);
    CHECK(back.channels == model.channels);
    CHECK(back.z0 == model.z0);
    CHECK(back.gamma == model.gamma);
    CHECK(back.grid == model.grid);
    std::filesystem::remove(file);
}
