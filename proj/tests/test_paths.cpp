#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sigflow/paths.hpp"
#include "sigflow/signature.hpp"

using namespace sigflow;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("time grid invariants") {
    CHECK_THROWS_AS(TimeGrid({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 0.5}), std::invalid_argument);
    const TimeGrid g({0.0, 0.5, 2.0});
    CHECK(g.segments() == 2);
    CHECK(g.dt(1) == doctest::Approx(1.5));
}

TEST_CASE("uniform grid construction") {
    const TimeGrid g = TimeGrid::uniform(3.0, 0.01);
    CHECK(g.size() == 301);
    CHECK(g.span() == 3.0);
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("grid rescaling to the unit interval") {
    const TimeGrid g({0.0, 1.0, 4.0});
    const TimeGrid unit = rescaled_to_unit(g);
    CHECK(unit.time(0) == 0.0);
    CHECK(unit.time(1) == doctest::Approx(0.25));
    CHECK(unit.span() == 1.0);
}

TEST_CASE("time augmentation") {
    const SampledPath u{TimeGrid({0.0, 0.5, 1.0}), mat({{0.0}, {2.0}, {1.0}})};
    const AugmentedPath x = augment_with_time(u);
    CHECK(x.values == mat({{0.0, 0.0}, {0.5, 2.0}, {1.0, 1.0}}));

    const SampledPath u2{TimeGrid({0.0, 1.0}), mat({{1.0, 2.0}, {3.0, 4.0}})};
    CHECK(augment_with_time(u2).values.cols() == 3);

    CHECK_THROWS_AS(SampledPath(TimeGrid({0.1, 1.0}), mat({{0.0}, {1.0}})), std::invalid_argument);
}

TEST_CASE("augmented path rejects a broken time channel") {
    CHECK_THROWS_AS(AugmentedPath(TimeGrid({0.0, 1.0}), mat({{0.0, 0.0}, {0.9, 1.0}})),
                    std::invalid_argument);
}

TEST_CASE("path increments") {
    const AugmentedPath x{TimeGrid({0.0, 0.5, 1.0}), mat({{0.0, 0.0}, {0.5, 2.0}, {1.0, 1.0}})};
    const Eigen::MatrixXd inc = path_increments(x);
    CHECK(inc == mat({{0.5, 2.0}, {0.5, -1.0}}));

    // constant channel has zero increments
    const AugmentedPath c{TimeGrid({0.0, 1.0, 2.0}), mat({{0.0, 3.0}, {1.0, 3.0}, {2.0, 3.0}})};
    CHECK(path_increments(c).col(1).isZero(0.0));
}

TEST_CASE("increment telescoping is exact") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const AugmentedPath x = oracles::random_augmented_path(rng, 2, 8);
        const Eigen::MatrixXd inc = path_increments(x);
        const Eigen::RowVectorXd total = inc.colwise().sum();
        const Eigen::RowVectorXd span = x.values.row(x.values.rows() - 1) - x.values.row(0);
        CHECK((total - span).cwiseAbs().maxCoeff() <= 1e-15 * span.cwiseAbs().maxCoeff() + 1e-300);
    }
}

TEST_CASE("concatenation") {
    const Polyline a(mat({{0.0, 0.0}, {1.0, 0.0}}));
    const Polyline b(mat({{5.0, 5.0}, {5.0, 6.0}}));
    const Polyline l = concatenate(a, b);  // L-shaped: unit step in each channel
    CHECK(l.points == mat({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}));

    // single-point path is the neutral element
    const Polyline point(mat({{9.0, 9.0}}));
    CHECK(concatenate(a, point).points == a.points);

    // a then its reversal closes the path
    Rng rng(5);
    const Polyline p = oracles::random_polyline(rng, 3, 6);
    const Polyline closed = concatenate(p, reverse(p));
    CHECK((closed.points.row(closed.points.rows() - 1) - p.points.row(0)).norm() == 0.0);
}

TEST_CASE("reversal") {
    const Polyline seg(mat({{1.0, 2.0}, {3.0, 4.0}}));
    CHECK(reverse(seg).points == mat({{3.0, 4.0}, {1.0, 2.0}}));
    Rng rng(7);
    const Polyline p = oracles::random_polyline(rng, 2, 5);
    CHECK(reverse(reverse(p)).points == p.points);
}

TEST_CASE("dilation of the value sequence") {
    Rng rng(9);
    const Polyline p = oracles::random_polyline(rng, 2, 4);
    CHECK(dilate(p, 1.0).points == p.points);
    CHECK(dilate(p, 0.0).points.isZero(0.0));

    // level-k signature coefficients scale by lambda^k
    const int order = 3;
    const TruncatedTensorSeries sig = path_signature(p, order);
    const TruncatedTensorSeries sig2 = path_signature(dilate(p, 2.0), order);
    for (int k = 0; k <= order; ++k) {
        const double scale = std::pow(2.0, k);
        for (std::size_t i = 0; i < sig.level(k).size(); ++i)
            CHECK(sig2.level(k)[i] == doctest::Approx(scale * sig.level(k)[i]).epsilon(1e-12));
    }
}

TEST_CASE("midpoint insertion leaves the signature unchanged") {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const AugmentedPath x = oracles::random_augmented_path(rng, 1, 6);
        const int j = static_cast<int>(rng.next_u64() % 6);
        const AugmentedPath refined = oracles::insert_midpoint(x, j);
        const auto a = path_signature(x, 4);
        const auto b = path_signature(refined, 4);
        CHECK(oracles::rel_error(b, a) <= 1e-12);
    }
}
