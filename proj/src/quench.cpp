#include "dqpt/quench.hpp"

#include <cmath>
#include <string>

#include "dqpt/parallel.hpp"

namespace dqpt {

QuenchSpec::QuenchSpec(ModelSpec model_i, ModelSpec model_f)
    : QuenchSpec(model_i, model_f, model_i.model_class() == ModelClass::Superconductor) {}

QuenchSpec::QuenchSpec(ModelSpec model_i, ModelSpec model_f, bool half_zone)
    : model_i_(std::move(model_i)), model_f_(std::move(model_f)), half_zone_(half_zone) {
    if (model_i_.dimension() != model_f_.dimension())
        throw DimensionMismatch("quench between models of different dimension");
    if (model_i_.model_class() != model_f_.model_class())
        throw DimensionMismatch("quench between an insulator and a superconductor");
}

bool QuenchSpec::is_superconductor() const { return model_i_.model_class() == ModelClass::Superconductor; }

namespace {

ModeData assemble(const QuenchSpec& q, const Momentum& k, const DVectord& d_i, const DVectord& d_f) {
    ModeData md;
    md.momentum = k;
    md.d_i = d_i;
    md.d_f = d_f;
    md.g = unit_overlap(d_i, d_f);
    md.eps_f = d_f.norm();
    md.angle_kind = q.final().angle_kind();
    md.model_class = q.final().model_class();
    md.theta_i = basis_angle(d_i, md.angle_kind);
    md.theta_f = basis_angle(d_f, md.angle_kind);
    return md;
}

}  // namespace

ModeData mode_data(const QuenchSpec& q, double k) {
    return assemble(q, Momentum::of(k), q.initial().d(k), q.final().d(k));
}

ModeData mode_data(const QuenchSpec& q, const Momentum2D& k) {
    return assemble(q, Momentum::of(k), q.initial().d(k.cart), q.final().d(k.cart));
}

ModeData mode_data(const QuenchSpec& q, const Momentum& k) {
    return k.dimension == 1 ? mode_data(q, k.k) : mode_data(q, k.point);
}

double overlap_at(const QuenchSpec& q, double k) { return unit_overlap(q.initial().d(k), q.final().d(k)); }

double overlap_at(const QuenchSpec& q, const Vec2& k) {
    return unit_overlap(q.initial().d(k), q.final().d(k));
}

std::complex<double> loschmidt_mode(const ModeData& md, std::complex<double> t) {
    // cos(x + iy) = cos x cosh y - i sin x sinh y;  sin(x + iy) = sin x cosh y + i cos x sinh y
    const double x = md.eps_f * t.real();
    const double y = md.eps_f * t.imag();
    const std::complex<double> c(std::cos(x) * std::cosh(y), -std::sin(x) * std::sinh(y));
    const std::complex<double> s(std::sin(x) * std::cosh(y), std::cos(x) * std::sinh(y));
    return c + std::complex<double>(0.0, md.g) * s;
}

std::complex<double> loschmidt_at_fisher_point(const ModeData& md, std::complex<double> z) {
    // exp(-z H) = exp(-i t_c H) with complex time t_c = -i z.
    return loschmidt_mode(md, std::complex<double>(z.imag(), -z.real()));
}

double echo_mode(const ModeData& md, double t) {
    const double s = std::sin(md.eps_f * t);
    return 1.0 - (1.0 - md.g * md.g) * s * s;
}

RateSeries rate_function(const QuenchSpec& q, const BrillouinGrid& grid, const std::vector<double>& times) {
    if (grid.dimension != q.dimension()) throw DimensionMismatch("grid and quench dimensions differ");
    const std::size_t n = grid.size();
    std::vector<ModeData> modes(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            modes[i] = grid.dimension == 1 ? mode_data(q, grid.k1d[i]) : mode_data(q, grid.k2d[i]);
    });

    RateSeries out;
    out.modes = n;
    out.t = times;
    out.lambda.resize(times.size());
    std::vector<double> logs(n);
    for (std::size_t it = 0; it < times.size(); ++it) {
        const double t = times[it];
        parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) logs[i] = std::log(echo_mode(modes[i], t));
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(logs[i])) {
                const double k = grid.dimension == 1 ? grid.k1d[i] : grid.k2d[i].cart.x();
                throw NonFiniteRate("Loschmidt amplitude vanishes at t = " + std::to_string(t) +
                                        ", k = " + std::to_string(k),
                                    t, k);
            }
        }
        out.lambda[it] = -pairwise_sum(logs) / static_cast<double>(n);
    }
    return out;
}

std::vector<FisherZero> fisher_zeros(const ModeData& md, IntRange n_range, FisherConvention convention) {
    if (!(md.eps_f > 0.0)) throw GapClosure("fisher_zeros: eps_f = 0");
    std::vector<FisherZero> out;
    double shift = 0.0;
    if (convention == FisherConvention::Exact) {
        if (std::abs(md.g) >= 1.0) return out;
        shift = std::atanh(md.g);
    } else {
        shift = std::atan(md.g);
    }
    // Critical modes sit exactly on the imaginary axis.
    const double re = std::abs(md.g) < kClampTolerance ? 0.0 : -shift / md.eps_f;
    for (int n = n_range.first; n <= n_range.last; ++n)
        out.push_back({n, {re, std::numbers::pi * (n + 0.5) / md.eps_f}});
    return out;
}

std::vector<double> dqpt_times(const QuenchSpec& q, const Momentum& k_star, IntRange n_range, double tol) {
    const ModeData md = mode_data(q, k_star);
    if (!(std::abs(md.g) < tol))
        throw NotCritical("|g(k*)| = " + std::to_string(std::abs(md.g)) + " is not below tolerance");
    std::vector<double> out;
    for (int n = n_range.first; n <= n_range.last; ++n) out.push_back(std::numbers::pi * (n + 0.5) / md.eps_f);
    return out;
}

std::vector<double> linspace(double first, double last, int samples) {
    std::vector<double> out;
    if (samples <= 0) return out;
    if (samples == 1) return {first};
    out.reserve(static_cast<std::size_t>(samples));
    const double step = (last - first) / (samples - 1);
    for (int i = 0; i < samples; ++i) out.push_back(i == samples - 1 ? last : first + step * i);
    return out;
}

}  // namespace dqpt
