#include "dqpt/models.hpp"

#include <Eigen/LU>

namespace dqpt {

namespace honeycomb {

ReciprocalCell reciprocal_cell() {
    Eigen::Matrix2d lattice;
    lattice.row(0) = b(0).transpose();
    lattice.row(1) = b(1).transpose();
    const Eigen::Matrix2d dual = 2.0 * std::numbers::pi * lattice.inverse().transpose();
    return {dual.row(0).transpose(), dual.row(1).transpose()};
}

Vec2 dirac_k() { return {4.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), 0.0}; }
Vec2 dirac_k_prime() { return -dirac_k(); }

}  // namespace honeycomb

PolarAngles polar_angles(const DVectord& d) {
    const double n = d.norm();
    if (!(n > kGapThreshold)) throw GapClosure("polar_angles: |d| = 0");
    const double c = std::clamp(d.z() / n, -1.0, 1.0);
    return {std::acos(c), std::atan2(d.y(), d.x())};
}

double bogoliubov_angle(const DVectord& d) {
    if (!(d.norm() > kGapThreshold)) throw GapClosure("bogoliubov_angle: |d| = 0");
    return 0.5 * std::atan2(-d.y(), d.z());
}

double basis_angle(const DVectord& d, AngleKind kind) {
    switch (kind) {
        case AngleKind::InPlane: return polar_angles(d).azimuth;
        case AngleKind::Bogoliubov: return bogoliubov_angle(d);
        case AngleKind::Polar: return polar_angles(d).theta;
    }
    return 0.0;
}

double haldane_critical_mass(const HaldaneParams& p) {
    return 3.0 * std::sqrt(3.0) * std::abs(p.gamma2 * std::sin(p.phi));
}

DVectord sublattice_frame(const DVectord& d, AngleKind kind) {
    require_gapped(d);
    switch (kind) {
        case AngleKind::InPlane: return DVectord(d.y(), d.z(), d.x()).normalized();
        case AngleKind::Polar: return d.normalized();
        case AngleKind::Bogoliubov: break;
    }
    throw BasisUnavailable("sublattice basis is undefined for superconductor-class models");
}

// --- custom models ----------------------------------------------------------

DVectord CustomModel::evaluate(double k1, double k2) const {
    std::vector<double> s = slots;
    s[0] = k1;
    s[1] = k2;
    return {cx(s.data()), cy(s.data()), cz(s.data())};
}

CustomModel validate_model_def(const expr::Expression& dx, const expr::Expression& dy,
                               const expr::Expression& dz, int dimension, const expr::ParamEnv& env,
                               ModelClass model_class) {
    if (dimension != 1 && dimension != 2)
        throw DimensionMismatch("model dimension must be 1 or 2, got " + std::to_string(dimension));
    expr::validate_env(env);

    std::vector<std::string> slot_names =
        dimension == 1 ? std::vector<std::string>{"k", ""} : std::vector<std::string>{"kx", "ky"};
    for (const auto& [name, value] : env) slot_names.push_back(name);

    for (const expr::Expression* e : {&dx, &dy, &dz}) {
        std::function<void(const expr::Node&)> check = [&](const expr::Node& n) {
            if (n.op == expr::Op::Variable && expr::is_momentum_variable(n.name)) {
                const bool ok = dimension == 1 ? n.name == "k" : n.name != "k";
                if (!ok)
                    throw DimensionMismatch("momentum variable '" + n.name + "' at offset " +
                                            std::to_string(n.span.offset) + " in a " +
                                            std::to_string(dimension) + "D model");
            }
            for (const auto& a : n.args) check(*a);
        };
        check(e->root());
    }

    CustomModel m;
    m.dx = dx;
    m.dy = dy;
    m.dz = dz;
    m.env = env;
    m.dimension = dimension;
    m.model_class = model_class;
    m.cx = expr::Compiled(dx, slot_names);
    m.cy = expr::Compiled(dy, slot_names);
    m.cz = expr::Compiled(dz, slot_names);
    m.slots.assign(slot_names.size(), 0.0);
    std::size_t i = 2;
    for (const auto& [name, value] : env) m.slots[i++] = value;
    return m;
}

// --- ModelSpec --------------------------------------------------------------

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

int ModelSpec::dimension() const {
    return std::visit(overloaded{[](const SshParams&) { return 1; }, [](const XyParams&) { return 1; },
                                 [](const HaldaneParams&) { return 2; },
                                 [](const CustomModel& c) { return c.dimension; }},
                      model_);
}

ModelClass ModelSpec::model_class() const {
    if (const auto* c = std::get_if<CustomModel>(&model_)) return c->model_class;
    return std::holds_alternative<XyParams>(model_) ? ModelClass::Superconductor : ModelClass::Insulator;
}

AngleKind ModelSpec::angle_kind() const {
    return std::visit(overloaded{[](const SshParams&) { return AngleKind::InPlane; },
                                 [](const XyParams&) { return AngleKind::Bogoliubov; },
                                 [](const HaldaneParams&) { return AngleKind::Polar; },
                                 [](const CustomModel& c) {
                                     if (c.model_class == ModelClass::Superconductor)
                                         return AngleKind::Bogoliubov;
                                     return c.dimension == 2 ? AngleKind::Polar : AngleKind::InPlane;
                                 }},
                      model_);
}

std::string ModelSpec::name() const {
    return std::visit(overloaded{[](const SshParams&) { return std::string("ssh"); },
                                 [](const XyParams&) { return std::string("xy"); },
                                 [](const HaldaneParams&) { return std::string("haldane"); },
                                 [](const CustomModel&) { return std::string("custom"); }},
                      model_);
}

std::string ModelSpec::phase_label() const {
    return std::visit(
        overloaded{
            [](const SshParams& p) -> std::string {
                if (std::abs(p.t1) > std::abs(p.t2)) return "trivial";
                if (std::abs(p.t1) < std::abs(p.t2)) return "topological";
                return "critical";
            },
            [](const XyParams& p) -> std::string {
                if (std::abs(p.h) > 1.0) return "PM";
                if (std::abs(p.h) == 1.0 || p.gamma == 0.0) return "critical";
                return p.gamma > 0.0 ? "FM_x" : "FM_y";
            },
            [](const HaldaneParams& p) -> std::string {
                const double mc = haldane_critical_mass(p);
                if (std::abs(p.m) > mc) return "trivial";
                if (std::abs(p.m) < mc) return "topological";
                return "critical";
            },
            [](const CustomModel&) -> std::string { return "custom"; }},
        model_);
}

DVectord ModelSpec::d(double k) const {
    if (dimension() != 1) throw DimensionMismatch(name() + " is two-dimensional; got a 1D momentum");
    return std::visit(overloaded{[k](const SshParams& p) { return d_ssh(k, p); },
                                 [k](const XyParams& p) { return d_xy(k, p); },
                                 [](const HaldaneParams&) -> DVectord { return DVectord::Zero(); },
                                 [k](const CustomModel& c) { return c.evaluate(k, 0.0); }},
                      model_);
}

DVectord ModelSpec::d(const Vec2& k) const {
    if (dimension() != 2) throw DimensionMismatch(name() + " is one-dimensional; got a 2D momentum");
    return std::visit(overloaded{[](const SshParams&) -> DVectord { return DVectord::Zero(); },
                                 [](const XyParams&) -> DVectord { return DVectord::Zero(); },
                                 [&k](const HaldaneParams& p) { return d_haldane(k, p); },
                                 [&k](const CustomModel& c) { return c.evaluate(k.x(), k.y()); }},
                      model_);
}

}  // namespace dqpt
