#include "dqpt/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dqpt {

namespace {

using cd = std::complex<double>;

void require_insulator(const ModeData& md) {
    if (md.model_class == ModelClass::Superconductor || md.angle_kind == AngleKind::Bogoliubov)
        throw BasisUnavailable("sublattice basis is undefined for superconductor-class models");
}

double xlogx(double x) { return x < 1e-300 ? 0.0 : x * std::log(x); }

Eigen::Matrix2cd pauli_dot(const DVectord& d) {
    Eigen::Matrix2cd h;
    h << cd(d.z(), 0.0), cd(d.x(), -d.y()),
         cd(d.x(), d.y()), cd(-d.z(), 0.0);
    return h;
}

}  // namespace

double binary_entropy(double p) {
    p = std::clamp(p, 0.0, 1.0);
    return -xlogx(p) - xlogx(1.0 - p);
}

EntanglementRecord eigenbasis_record(const ModeData& md) {
    const double p = 0.5 * (1.0 + md.g);
    return {md.momentum, p, binary_entropy(p)};
}

SublatticeAmplitudes sublattice_amplitudes(const ModeData& md, double t) {
    require_insulator(md);
    const cd forward = std::polar(1.0, -md.eps_f * t);
    const cd backward = std::polar(1.0, md.eps_f * t);
    if (md.angle_kind == AngleKind::InPlane) {
        const double half_dt = 0.5 * (md.theta_f - md.theta_i);
        const double cf = std::cos(0.5 * md.theta_f), sf = std::sin(0.5 * md.theta_f);
        const double s = std::sin(half_dt), c = std::cos(half_dt);
        return {s * forward * cf - c * backward * sf, s * forward * sf + c * backward * cf};
    }
    // Spherical eigenvectors |+> = (cos t/2, sin t/2 e^{i phi}), |-> = (-sin t/2, cos t/2 e^{i phi}).
    auto eigvecs = [](const DVectord& d) {
        const PolarAngles ang = polar_angles(d);
        const cd phase = std::polar(1.0, ang.azimuth);
        const double c = std::cos(0.5 * ang.theta), s = std::sin(0.5 * ang.theta);
        return std::pair<Eigen::Vector2cd, Eigen::Vector2cd>{Eigen::Vector2cd(c, s * phase),
                                                              Eigen::Vector2cd(-s, c * phase)};
    };
    const auto [plus_f, minus_f] = eigvecs(md.d_f);
    const Eigen::Vector2cd psi0 = eigvecs(md.d_i).second;
    const cd c_plus = plus_f.dot(psi0);
    const cd c_minus = minus_f.dot(psi0);
    const Eigen::Vector2cd psi = c_plus * forward * plus_f + c_minus * backward * minus_f;
    return {psi(0), psi(1)};
}

double sublattice_occupation(const ModeData& md, double t) {
    require_insulator(md);
    const double two_et = 2.0 * md.eps_f * t;
    if (md.angle_kind == AngleKind::InPlane) {
        const double dtheta = md.theta_f - md.theta_i;
        return 0.5 - 0.5 * (std::cos(dtheta) * std::cos(md.theta_f) +
                            std::sin(dtheta) * std::sin(md.theta_f) * std::cos(two_et));
    }
    const DVectord n = md.d_f.normalized();
    const DVectord m = md.d_i.normalized();
    const double g = md.g;
    const double sz = -(g * n.z() + std::cos(two_et) * (m.z() - g * n.z()) + std::sin(two_et) * n.cross(m).z());
    return 0.5 * (1.0 + sz);
}

SublatticeSeries sublattice_entropy_series(const ModeData& md, const std::vector<double>& times) {
    require_insulator(md);
    SublatticeSeries out;
    out.momentum = md.momentum;
    out.t = times;
    out.a2.reserve(times.size());
    out.S.reserve(times.size());
    for (double t : times) {
        const double a2 = sublattice_occupation(md, t);
        out.a2.push_back(a2);
        out.S.push_back(binary_entropy(a2));
    }
    return out;
}

OracleResult ed_oracle(const QuenchSpec& q, const Momentum& k, double t, Bipartition basis) {
    DVectord d_i = k.dimension == 1 ? q.initial().d(k.k) : q.initial().d(k.point.cart);
    DVectord d_f = k.dimension == 1 ? q.final().d(k.k) : q.final().d(k.point.cart);
    require_gapped(d_i);
    require_gapped(d_f);
    const bool paired = q.is_superconductor();
    if (basis == Bipartition::Sublattice) {
        if (paired) throw BasisUnavailable("sublattice basis is undefined for superconductor-class models");
        const AngleKind kind = q.final().angle_kind();
        d_i = sublattice_frame(d_i, kind) * d_i.norm();
        d_f = sublattice_frame(d_f, kind) * d_f.norm();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> initial(pauli_dot(d_i));
    const Eigen::Vector2cd psi0 = initial.eigenvectors().col(0);

    const double eps = d_f.norm();
    const Eigen::Matrix2cd propagator = std::cos(eps * t) * Eigen::Matrix2cd::Identity() -
                                        cd(0.0, std::sin(eps * t)) * pauli_dot(d_f / eps);
    const Eigen::Vector2cd psi_t = propagator * psi0;

    // Components (first factor, second factor): lower/upper band or A/B sublattice.
    Eigen::Vector2cd coeff;
    if (basis == Bipartition::FinalEigen) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> fin(pauli_dot(d_f));
        coeff << fin.eigenvectors().col(0).dot(psi_t), fin.eigenvectors().col(1).dot(psi_t);
    } else {
        coeff = psi_t;
    }

    OracleResult r;
    r.rho_mode = coeff * coeff.adjoint();
    r.purity = (r.rho_mode * r.rho_mode).trace().real();

    // Fock space of two factors, index 2 * n_first + n_second. Insulators hold one
    // particle (|10>, |01>); superconductors hold pairs (|00>, |11>).
    Eigen::Vector4cd fock = Eigen::Vector4cd::Zero();
    if (paired) {
        fock(0) = coeff(0);
        fock(3) = coeff(1);
    } else {
        fock(2) = coeff(0);
        fock(1) = coeff(1);
    }
    const Eigen::Matrix4cd rho4 = fock * fock.adjoint();
    Eigen::Matrix2cd reduced = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s) reduced(a, b) += rho4(2 * a + s, 2 * b + s);

    r.rho_reduced = reduced.real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> red(reduced);
    r.spectrum << red.eigenvalues()(1), red.eigenvalues()(0);
    r.p = paired ? reduced(0, 0).real() : reduced(1, 1).real();
    r.entropy = 0.0;
    for (int i = 0; i < 2; ++i) r.entropy -= xlogx(std::max(0.0, r.spectrum(i)));
    return r;
}

}  // namespace dqpt
