#include <doctest.h>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dqpt/critical.hpp"
#include "dqpt/entanglement.hpp"

using namespace dqpt;
using std::numbers::pi;

namespace {

QuenchSpec xy(double hi, double gi, double hf, double gf) {
    return {ModelSpec(XyParams{hi, gi}), ModelSpec(XyParams{hf, gf})};
}

// Roots of the XY overlap numerator, a quadratic in c = cos k:
// gi gf (1 - c^2) + (hi - c)(hf - c) = (1 - gi gf) c^2 - (hi + hf) c + hi hf + gi gf.
std::vector<double> xy_roots_oracle(double hi, double gi, double hf, double gf) {
    const double a = 1 - gi * gf, b = -(hi + hf), c = hi * hf + gi * gf;
    std::vector<double> out;
    auto push = [&](double x) {
        if (x > -1 && x < 1) out.push_back(std::acos(x));
    };
    if (std::abs(a) < 1e-15) {
        push(-c / b);
    } else {
        const double disc = b * b - 4 * a * c;
        if (disc >= 0) {
            push((-b + std::sqrt(disc)) / (2 * a));
            push((-b - std::sqrt(disc)) / (2 * a));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double wrapped_distance(const Vec2& a, const Vec2& b) {
    Vec2 d = a - b;
    for (int i = 0; i < 2; ++i) d(i) -= std::round(d(i));
    return d.norm();
}

const QuenchSpec hal_quench(ModelSpec(HaldaneParams{0.5, 1.0, 0.3}), ModelSpec(HaldaneParams{2.0, 1.0, 0.3}));

BrillouinGrid honeycomb_grid(int n) {
    const ReciprocalCell cell = honeycomb::reciprocal_cell();
    return build_grid_2d(cell.g1, cell.g2, n, n);
}

}  // namespace

TEST_SUITE("critical") {

TEST_CASE("SSH critical momentum") {
    const QuenchSpec q(ModelSpec(SshParams{1.0, 0.5}), ModelSpec(SshParams{1.0, 2.0}));
    const CriticalSet1D c = find_critical_momenta_1d(q);
    REQUIRE(c.roots.size() == 1);
    CHECK(std::abs(c.roots[0] - std::acos(-0.8)) < 1e-9);
    CHECK(c.residuals[0] < 1e-12);
    CHECK_FALSE(c.boundary_zero);
    CHECK_FALSE(c.boundary_pi);
}

TEST_CASE("SSH boundary-critical quench") {
    const QuenchSpec q(ModelSpec(SshParams{1.0, 0.5}), ModelSpec(SshParams{1.0, 1.0}));
    const CriticalSet1D c = find_critical_momenta_1d(q);
    CHECK(c.roots.empty());
    CHECK(c.boundary_pi);
    CHECK_FALSE(c.boundary_zero);
    CHECK(c.limit_pi < 1e-6);
}

TEST_CASE("XY roots match the quadratic") {
    const CriticalSet1D c = find_critical_momenta_1d(xy(0.2, 0.1, 0.8, 0.1));
    REQUIRE(c.roots.size() == 2);
    CHECK(c.roots[0] == doctest::Approx(0.6538140268316996).epsilon(1e-12));
    CHECK(c.roots[1] == doctest::Approx(1.3527412218909226).epsilon(1e-12));

    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> uh(-1.8, 1.8), ug(-1.5, 1.5);
    for (int i = 0; i < 300; ++i) {
        const double hi = uh(rng), gi = ug(rng), hf = uh(rng), gf = ug(rng);
        const QuenchSpec q = xy(hi, gi, hf, gf);
        const std::vector<double> expected = xy_roots_oracle(hi, gi, hf, gf);
        // Skip near-tangent roots, which no sign scan can see.
        bool separated = true;
        for (double r : expected) {
            if (r < 1e-3 || r > pi - 1e-3) separated = false;
            const double eps = 1e-3;
            if (overlap_at(q, r - eps) * overlap_at(q, r + eps) >= 0) separated = false;
        }
        if (expected.size() == 2 && expected[1] - expected[0] < 1e-2) separated = false;
        if (!separated) continue;
        const CriticalSet1D c2 = find_critical_momenta_1d(q);
        REQUIRE(c2.roots.size() == expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j) {
            CHECK(std::abs(c2.roots[j] - expected[j]) < 1e-9);
            CHECK(c2.residuals[j] < 1e-12);
        }
    }
}

TEST_CASE("root invariants") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> uh(-1.8, 1.8), ug(-1.5, 1.5);
    for (int i = 0; i < 200; ++i) {
        const QuenchSpec q = xy(uh(rng), ug(rng), uh(rng), ug(rng));
        const CriticalSet1D coarse = find_critical_momenta_1d(q, {512});
        const CriticalSet1D fine = find_critical_momenta_1d(q, {1024});
        for (std::size_t j = 0; j < coarse.roots.size(); ++j) {
            const double r = coarse.roots[j];
            CHECK(r > 0.0);
            CHECK(r < pi);
            if (j > 0) CHECK(r > coarse.roots[j - 1]);
            CHECK(coarse.residuals[j] < 1e-12);
            const double delta = pi / 512;
            CHECK(overlap_at(q, std::max(r - delta, 1e-9)) * overlap_at(q, std::min(r + delta, pi - 1e-9)) <= 0.0);
            bool kept = false;
            for (double s : fine.roots) kept = kept || std::abs(s - r) < 1e-9;
            CHECK(kept);
        }
        if (std::isfinite(coarse.limit_zero) && std::isfinite(coarse.limit_pi) && !coarse.boundary_zero &&
            !coarse.boundary_pi) {
            const bool same_sign = overlap_at(q, 1e-9) * overlap_at(q, pi - 1e-9) > 0;
            CHECK((coarse.roots.size() % 2 == 0) == same_sign);
        }
    }
}

TEST_CASE("Ising and anisotropic crossings") {
    const CriticalSet1D ising = find_critical_momenta_1d(xy(0.5, 1.0, 1.5, 1.0));
    REQUIRE(ising.roots.size() == 1);
    CHECK(ising.roots[0] == doctest::Approx(std::acos(0.875)).epsilon(1e-12));
    const CriticalSet1D aniso = find_critical_momenta_1d(xy(0.5, 1.0, 0.5, -1.0));
    REQUIRE(aniso.roots.size() == 2);
    CHECK(aniso.roots[0] == doctest::Approx(std::acos((1 + std::sqrt(7.0)) / 4)).epsilon(1e-12));
    CHECK(aniso.roots[1] == doctest::Approx(std::acos((1 - std::sqrt(7.0)) / 4)).epsilon(1e-12));
}

TEST_CASE("identity quench has no critical momenta") {
    const CriticalSet1D c = find_critical_momenta_1d(xy(0.3, 0.4, 0.3, 0.4));
    CHECK(c.roots.empty());
    CHECK_FALSE(c.boundary_zero);
    CHECK_FALSE(c.boundary_pi);
    const QuenchSpec hid(ModelSpec(HaldaneParams{0.5, 1.0, 0.3}), ModelSpec(HaldaneParams{0.5, 1.0, 0.3}));
    CHECK(find_critical_contours_2d(hid, honeycomb_grid(64)).lines.empty());
}

TEST_CASE("critical modes have maximal entropy") {
    for (const QuenchSpec& q : {xy(0.2, 0.1, 0.8, 0.1), xy(0.5, 1.0, 1.5, 1.0)}) {
        for (double r : find_critical_momenta_1d(q).roots) {
            const EntanglementRecord e = eigenbasis_record(mode_data(q, r));
            CHECK(std::abs(e.p - 0.5) < 1e-6);
            CHECK(std::abs(e.S - std::log(2.0)) < 1e-6);
        }
    }
}

TEST_CASE("Haldane contours") {
    const BrillouinGrid grid = honeycomb_grid(128);
    const CriticalContour2D c = find_critical_contours_2d(hal_quench, grid);
    REQUIRE_FALSE(c.lines.empty());
    const double diag = std::sqrt(2.0) / 128;
    for (const Polyline& line : c.lines) {
        CHECK(line.closed);
        REQUIRE(line.vertices.size() == line.residuals.size());
        for (std::size_t j = 0; j < line.vertices.size(); ++j) {
            const Momentum2D& v = line.vertices[j];
            CHECK(line.residuals[j] < 1e-8);
            CHECK(std::abs(overlap_at(hal_quench, v.cart)) < 1e-8);
            CHECK((grid.cell.at(v.frac).cart - v.cart).norm() < 1e-12);
            if (j > 0) CHECK(wrapped_distance(v.frac, line.vertices[j - 1].frac) <= diag + 1e-12);
        }
        if (line.closed) CHECK(wrapped_distance(line.vertices.front().frac, line.vertices.back().frac) <= diag + 1e-12);
    }
}

TEST_CASE("Haldane contours encircle the Dirac valleys") {
    // g changes sign only near the valley where d_z flips: the contour lies between the
    // valley and its surroundings, so it sits close to one Dirac point.
    const CriticalContour2D c = find_critical_contours_2d(hal_quench, honeycomb_grid(128));
    const ReciprocalCell cell = honeycomb::reciprocal_cell();
    Eigen::Matrix2d basis;
    basis << cell.g1, cell.g2;
    for (const Polyline& line : c.lines) {
        Vec2 mean = Vec2::Zero();
        for (const Momentum2D& v : line.vertices) mean += v.cart;
        mean /= double(line.vertices.size());
        double best = INFINITY;
        for (const Vec2& dirac : {honeycomb::dirac_k(), honeycomb::dirac_k_prime()}) {
            Vec2 frac = basis.inverse() * (mean - dirac);
            for (int i = 0; i < 2; ++i) frac(i) -= std::round(frac(i));
            best = std::min(best, (basis * frac).norm());
        }
        // Lines wrapping the cell boundary average across it; only check unwrapped loops.
        bool wraps = false;
        for (std::size_t j = 1; j < line.vertices.size(); ++j)
            wraps = wraps || (line.vertices[j].frac - line.vertices[j - 1].frac).cwiseAbs().maxCoeff() > 0.5;
        if (!wraps) CHECK(best < 0.5);
    }
}

TEST_CASE("contour vertex count grows linearly with resolution") {
    const std::size_t n64 = find_critical_contours_2d(hal_quench, honeycomb_grid(64)).vertex_count();
    const std::size_t n128 = find_critical_contours_2d(hal_quench, honeycomb_grid(128)).vertex_count();
    const std::size_t n256 = find_critical_contours_2d(hal_quench, honeycomb_grid(256)).vertex_count();
    CHECK(double(n128) / n64 == doctest::Approx(2.0).epsilon(0.15));
    CHECK(double(n256) / n128 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("contours respect periodic wrapping") {
    // d_i = z, d_f = (sin kx, 0, cos kx): g = cos kx vanishes on two lines that wrap in ky.
    const expr::ParamEnv env{};
    auto model = [&](const char* dx, const char* dz) {
        return ModelSpec(validate_model_def(expr::parse_expr(dx), expr::parse_expr("0"), expr::parse_expr(dz), 2, env));
    };
    const QuenchSpec q(model("0", "1"), model("sin(kx)", "cos(kx)"));
    const BrillouinGrid grid = build_grid_2d(Vec2(2 * pi, 0), Vec2(0, 2 * pi), 50, 50);
    const CriticalContour2D c = find_critical_contours_2d(q, grid);
    REQUIRE(c.lines.size() == 2);
    for (const Polyline& line : c.lines) {
        CHECK(line.closed);
        CHECK(line.vertices.size() == 50);
        for (const Momentum2D& v : line.vertices) CHECK(std::abs(std::cos(v.cart.x())) < 1e-8);
    }

    // g = 1 / sqrt(1 + cos^2 kx) never vanishes.
    const QuenchSpec none(model("1", "0"), model("1", "cos(kx)"));
    CHECK(find_critical_contours_2d(none, grid).lines.empty());
}

}  // TEST_SUITE
