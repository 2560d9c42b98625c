#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "dqpt/expr.hpp"
#include "dqpt/geometry.hpp"

namespace dqpt {

struct SshParams {
    double t1 = 1.0;
    double t2 = 0.5;
};

struct XyParams {
    double h = 0.5;
    double gamma = 1.0;
};

enum class DzConvention { PaperCos, StandardSin };

struct HaldaneParams {
    double m = 0.0;
    double gamma1 = 1.0;
    double gamma2 = 0.3;
    double phi = std::numbers::pi / 2;
    DzConvention dz_convention = DzConvention::StandardSin;
};

/// Insulators bipartition a mode into sublattice orbitals; superconductors pair (k, -k).
enum class ModelClass { Insulator, Superconductor };

/// Which angle parametrizes the Bloch eigenvectors of a model.
enum class AngleKind {
    InPlane,     // atan2(dy, dx); planar d-vectors in the xy plane
    Bogoliubov,  // 0.5 * atan2(-dy, dz); BdG pseudospin in the yz plane
    Polar,       // arccos(dz / |d|) with azimuth atan2(dy, dx)
};

// --- honeycomb geometry -----------------------------------------------------

namespace honeycomb {

/// Nearest-neighbour bond vectors (unit bond length).
inline const Vec2& a(int j) {
    static const Vec2 v[3] = {Vec2(0.0, 1.0), Vec2(-std::sqrt(3.0) / 2, -0.5), Vec2(std::sqrt(3.0) / 2, -0.5)};
    return v[j];
}

/// Next-nearest-neighbour vectors b1 = a2 - a3, b2 = a3 - a1, b3 = a1 - a2.
inline Vec2 b(int j) { return a((j + 1) % 3) - a((j + 2) % 3); }

/// Reciprocal vectors dual to the lattice translations b1, b2: Gi . bj = 2 pi delta_ij.
ReciprocalCell reciprocal_cell();

/// Dirac points K and K'.
Vec2 dirac_k();
Vec2 dirac_k_prime();

}  // namespace honeycomb

// --- built-in d-vectors -----------------------------------------------------

template <typename Scalar>
DVector<Scalar> d_ssh(Scalar k, const SshParams& p) {
    using std::cos, std::sin;
    return {Scalar(p.t1) + Scalar(p.t2) * cos(k), Scalar(p.t2) * sin(k), Scalar(0)};
}

template <typename Scalar>
DVector<Scalar> d_xy(Scalar k, const XyParams& p) {
    using std::cos, std::sin;
    return {Scalar(0), -Scalar(p.gamma) * sin(k), Scalar(p.h) - cos(k)};
}

template <typename Scalar>
DVector<Scalar> d_haldane(const Eigen::Matrix<Scalar, 2, 1>& k, const HaldaneParams& p) {
    using std::cos, std::sin;
    Scalar dx(0), dy(0), nnn(0);
    for (int j = 0; j < 3; ++j) {
        const Scalar ka = k.dot(honeycomb::a(j).cast<Scalar>());
        dx += cos(ka);
        dy += sin(ka);
        const Scalar kb = k.dot(honeycomb::b(j).cast<Scalar>());
        nnn += p.dz_convention == DzConvention::StandardSin ? sin(kb) : cos(kb);
    }
    const Scalar g1(p.gamma1);
    return {g1 * dx, g1 * dy, Scalar(p.m) - Scalar(2 * p.gamma2 * std::sin(p.phi)) * nnn};
}

struct PolarAngles {
    double theta = 0.0;    // [0, pi]
    double azimuth = 0.0;  // (-pi, pi]
};

/// Spherical angles of d; the azimuth is also the in-plane angle of planar d-vectors.
PolarAngles polar_angles(const DVectord& d);

/// Bogoliubov angle theta with tan(2 theta) = -dy / dz, branch 0.5 * atan2(-dy, dz).
double bogoliubov_angle(const DVectord& d);

/// The basis angle of the given kind (in-plane, Bogoliubov or polar).
double basis_angle(const DVectord& d, AngleKind kind);

/// Phase boundary |m| = 3 sqrt(3) |gamma2 sin(phi)|.
double haldane_critical_mass(const HaldaneParams& p);

// --- model specification ----------------------------------------------------

/// A validated expression-defined model.
struct CustomModel {
    expr::Expression dx, dy, dz;
    expr::ParamEnv env;
    int dimension = 1;
    ModelClass model_class = ModelClass::Insulator;

    DVectord evaluate(double k1, double k2) const;

    // Compiled programs are built by validate_model_def.
    expr::Compiled cx, cy, cz;
    std::vector<double> slots;
};

/// Checks free variables against the dimension and parameter environment and
/// returns a ready-to-evaluate custom model.
CustomModel validate_model_def(const expr::Expression& dx, const expr::Expression& dy,
                               const expr::Expression& dz, int dimension, const expr::ParamEnv& env,
                               ModelClass model_class = ModelClass::Insulator);

class ModelSpec {
public:
    using Variant = std::variant<SshParams, XyParams, HaldaneParams, CustomModel>;

    ModelSpec(SshParams p) : model_(p) {}
    ModelSpec(XyParams p) : model_(p) {}
    ModelSpec(HaldaneParams p) : model_(p) {}
    ModelSpec(CustomModel m) : model_(std::move(m)) {}

    int dimension() const;
    ModelClass model_class() const;
    AngleKind angle_kind() const;
    std::string name() const;

    /// Equilibrium phase label derived from parameter inequalities.
    std::string phase_label() const;

    /// Throws DimensionMismatch when the momentum arity does not match.
    DVectord d(double k) const;
    DVectord d(const Vec2& k) const;

    const Variant& variant() const { return model_; }

private:
    Variant model_;
};

/// Sublattice-frame unit vector used for the A/B bipartition of an insulator.
/// Planar (in-plane) models map their angle onto the xz plane, (sin t, 0, cos t);
/// polar models use d / |d|.
DVectord sublattice_frame(const DVectord& d, AngleKind kind);

}  // namespace dqpt
