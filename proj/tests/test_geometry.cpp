#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dqpt/geometry.hpp"
#include "dqpt/models.hpp"

using namespace dqpt;
using std::numbers::pi;

TEST_SUITE("geometry") {

TEST_CASE("unit_overlap examples") {
    CHECK(unit_overlap<double>({1, 0, 0}, {1, 0, 0}) == 1.0);
    CHECK(unit_overlap<double>({1, 0, 0}, {0, 5, 0}) == 0.0);

    const SshParams pi_{1.0, 0.5}, pf{1.0, 2.0};
    const DVectord di = d_ssh(pi, pi_);
    const DVectord df = d_ssh(pi, pf);
    CHECK(di.x() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(df.x() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(unit_overlap(di, df) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("unit_overlap rejects gapless vectors") {
    CHECK_THROWS_AS(unit_overlap<double>({0, 0, 0}, {1, 0, 0}), GapClosure);
    CHECK_THROWS_AS(unit_overlap<double>({1, 0, 0}, {1e-15, 0, 0}), GapClosure);
    CHECK_THROWS_AS(require_gapped<double>({0, 1e-16, 0}), GapClosure);
}

TEST_CASE("unit_overlap symmetry, scale invariance and bounds") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> scale(-50.0, 50.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const DVectord a(nd(rng), nd(rng), nd(rng));
        const DVectord b(nd(rng), nd(rng), nd(rng));
        CHECK(unit_overlap(a, b) == unit_overlap(b, a));
        const double g = unit_overlap(a, b);
        CHECK(std::abs(g) <= 1.0);
        double s = scale(rng);
        if (std::abs(s) < 1e-3) s = 1.0;
        const double self = unit_overlap(a, DVectord(s * a));
        CHECK(std::abs(self - (s > 0 ? 1.0 : -1.0)) <= 4 * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("unit_overlap is exactly bounded on grids") {
    const XyParams xi{0.2, 0.1}, xf{0.8, 0.1};
    for (double k : build_grid_1d(4096, false).k1d) {
        if (std::abs(k) < 1e-12) continue;
        const double g = unit_overlap(d_xy(k, xi), d_xy(k, xf));
        CHECK(std::abs(g) <= 1.0);
    }
}

TEST_CASE("wrap_momentum") {
    CHECK(wrap_momentum(pi) == doctest::Approx(-pi));
    CHECK(wrap_momentum(-pi) == doctest::Approx(-pi));
    CHECK(wrap_momentum(0.0) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double k = u(rng);
        const double w = wrap_momentum(k);
        CHECK(w >= -pi);
        CHECK(w < pi);
        const double turns = (k - w) / (2 * pi);
        CHECK(std::abs(turns - std::round(turns)) < 1e-12);
    }
}

TEST_CASE("1D grids") {
    const BrillouinGrid full = build_grid_1d(4, false);
    REQUIRE(full.k1d.size() == 4);
    CHECK(full.k1d[0] == doctest::Approx(-pi));
    CHECK(full.k1d[1] == doctest::Approx(-pi / 2));
    CHECK(full.k1d[2] == doctest::Approx(0.0));
    CHECK(full.k1d[3] == doctest::Approx(pi / 2));
    CHECK_FALSE(full.half_zone);

    const BrillouinGrid half = build_grid_1d(3, true);
    REQUIRE(half.k1d.size() == 3);
    CHECK(half.k1d[0] == doctest::Approx(pi / 4));
    CHECK(half.k1d[1] == doctest::Approx(pi / 2));
    CHECK(half.k1d[2] == doctest::Approx(3 * pi / 4));
    CHECK(half.half_zone);

    for (double k : build_grid_1d(1001, true).k1d) {
        CHECK(k > 0.0);
        CHECK(k < pi);
    }

    CHECK_THROWS_AS(build_grid_1d(1, false), InvalidGrid);
    CHECK_THROWS_AS(build_grid_1d(0, true), InvalidGrid);
}

TEST_CASE("2D grids") {
    const BrillouinGrid sq = build_grid_2d(Vec2(2 * pi, 0), Vec2(0, 2 * pi), 2, 2);
    REQUIRE(sq.size() == 4);
    const Vec2 expected[4] = {{0, 0}, {0, pi}, {pi, 0}, {pi, pi}};
    for (int i = 0; i < 4; ++i) CHECK((sq.k2d[i].cart - expected[i]).norm() < 1e-15);

    const ReciprocalCell cell = honeycomb::reciprocal_cell();
    const BrillouinGrid hc = build_grid_2d(cell.g1, cell.g2, 400, 400);
    CHECK(hc.size() == 160000);
    CHECK(hc.k2d[401].frac.isApprox(Vec2(1.0 / 400, 1.0 / 400)));

    CHECK_THROWS_AS(build_grid_2d(Vec2(1, 0), Vec2(2, 0), 4, 4), InvalidGrid);
    CHECK_THROWS_AS(build_grid_2d(Vec2(1, 0), Vec2(0, 1), 1, 4), InvalidGrid);
}

TEST_CASE("fractional and Cartesian coordinates agree") {
    const ReciprocalCell cell = honeycomb::reciprocal_cell();
    const BrillouinGrid grid = build_grid_2d(cell.g1, cell.g2, 64, 48);
    for (const Momentum2D& m : grid.k2d) {
        const Vec2 rebuilt = m.frac.x() * cell.g1 + m.frac.y() * cell.g2;
        CHECK((rebuilt - m.cart).norm() < 1e-12);
    }
}

}  // TEST_SUITE
