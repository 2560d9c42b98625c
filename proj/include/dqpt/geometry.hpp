#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dqpt/errors.hpp"

namespace dqpt {

/// Real 3-vector whose contraction with the Pauli matrices gives a 2x2 Bloch Hamiltonian.
template <typename Scalar>
using DVector = Eigen::Matrix<Scalar, 3, 1>;
using DVectord = DVector<double>;

using Vec2 = Eigen::Vector2d;

inline constexpr double kGapThreshold = 1e-14;
inline constexpr double kClampTolerance = 1e-12;

/// Reduces k modulo 2pi into [-pi, pi).
template <typename Scalar>
Scalar wrap_momentum(Scalar k) {
    using std::floor;
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar r = k - two_pi * floor((k + std::numbers::pi_v<Scalar>) / two_pi);
    if (r >= std::numbers::pi_v<Scalar>) r -= two_pi;
    return r;
}

template <typename Scalar>
void require_gapped(const DVector<Scalar>& d) {
    if (!(d.norm() > Scalar(kGapThreshold))) throw GapClosure("|d| below gap threshold");
}

/// Cosine of the angle between two d-vectors, clamped to [-1, 1].
template <typename Scalar>
Scalar unit_overlap(const DVector<Scalar>& d_i, const DVector<Scalar>& d_f) {
    const Scalar ni = d_i.norm();
    const Scalar nf = d_f.norm();
    if (!(ni > Scalar(kGapThreshold)) || !(nf > Scalar(kGapThreshold)))
        throw GapClosure("unit_overlap: gapless mode");
    Scalar g = d_i.dot(d_f) / (ni * nf);
    if (g > Scalar(1) && g - Scalar(1) <= Scalar(kClampTolerance)) g = Scalar(1);
    if (g < Scalar(-1) && -g - Scalar(1) <= Scalar(kClampTolerance)) g = Scalar(-1);
    return g;
}

/// A point of a two-dimensional reciprocal cell in both representations:
/// cart = frac.x() * G1 + frac.y() * G2.
struct Momentum2D {
    Vec2 cart = Vec2::Zero();
    Vec2 frac = Vec2::Zero();
};

struct ReciprocalCell {
    Vec2 g1;
    Vec2 g2;

    Momentum2D at(double u, double v) const { return {u * g1 + v * g2, Vec2(u, v)}; }
    Momentum2D at(const Vec2& frac) const { return at(frac.x(), frac.y()); }
};

/// Sampled momentum domain. 1D grids fill k1d, 2D grids fill k2d in row-major
/// order (index = i * n2 + j, frac = (i/n1, j/n2)).
struct BrillouinGrid {
    int dimension = 1;
    int n1 = 0;
    int n2 = 1;
    bool half_zone = false;
    ReciprocalCell cell{Vec2::Zero(), Vec2::Zero()};
    std::vector<double> k1d;
    std::vector<Momentum2D> k2d;

    std::size_t size() const { return dimension == 1 ? k1d.size() : k2d.size(); }
};

/// Full zone: N samples of [-pi, pi). Half zone: N midpoint samples of (0, pi).
BrillouinGrid build_grid_1d(int n, bool half_zone);

BrillouinGrid build_grid_2d(const Vec2& g1, const Vec2& g2, int n1, int n2);

}  // namespace dqpt
