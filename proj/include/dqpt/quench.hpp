#pragma once

#include <complex>
#include <vector>

#include "dqpt/models.hpp"

namespace dqpt {

/// A momentum of either arity.
struct Momentum {
    int dimension = 1;
    double k = 0.0;
    Momentum2D point;

    static Momentum of(double k) { return {1, k, {}}; }
    static Momentum of(const Momentum2D& p) { return {2, 0.0, p}; }
};

/// Sudden switch from model_i to model_f at t = 0, starting in the ground state of model_i.
class QuenchSpec {
public:
    /// Throws DimensionMismatch when the two models differ in dimension.
    QuenchSpec(ModelSpec model_i, ModelSpec model_f);
    QuenchSpec(ModelSpec model_i, ModelSpec model_f, bool half_zone);

    const ModelSpec& initial() const { return model_i_; }
    const ModelSpec& final() const { return model_f_; }
    int dimension() const { return model_i_.dimension(); }
    bool half_zone() const { return half_zone_; }
    bool is_superconductor() const;

private:
    ModelSpec model_i_;
    ModelSpec model_f_;
    bool half_zone_;
};

struct ModeData {
    Momentum momentum;
    DVectord d_i = DVectord::Zero();
    DVectord d_f = DVectord::Zero();
    double g = 1.0;      // d_i . d_f / (|d_i| |d_f|)
    double eps_f = 0.0;  // |d_f|
    double theta_i = 0.0;
    double theta_f = 0.0;
    AngleKind angle_kind = AngleKind::Polar;
    ModelClass model_class = ModelClass::Insulator;
};

ModeData mode_data(const QuenchSpec& q, double k);
ModeData mode_data(const QuenchSpec& q, const Momentum2D& k);
ModeData mode_data(const QuenchSpec& q, const Momentum& k);

/// Per-mode overlap only; cheaper than mode_data for root scans.
double overlap_at(const QuenchSpec& q, double k);
double overlap_at(const QuenchSpec& q, const Vec2& k);

/// cos(eps t) + i g sin(eps t), analytically continued to complex t.
std::complex<double> loschmidt_mode(const ModeData& md, std::complex<double> t);
inline std::complex<double> loschmidt_mode(const ModeData& md, double t) {
    return loschmidt_mode(md, std::complex<double>(t, 0.0));
}

/// Amplitude at a point z = tau + i t of the complex-time (Fisher) plane,
/// i.e. the boundary partition function <psi| exp(-z H_f) |psi>.
std::complex<double> loschmidt_at_fisher_point(const ModeData& md, std::complex<double> z);

/// |cos(eps t) + i g sin(eps t)|^2 = 1 - (1 - g^2) sin^2(eps t).
double echo_mode(const ModeData& md, double t);

struct RateSeries {
    std::vector<double> t;
    std::vector<double> lambda;
    std::size_t modes = 0;
};

/// lambda(t) = -(1/N) sum_k ln |G_k(t)|^2 over the grid modes. Summation order is
/// fixed by the grid, so results are identical for any worker count.
RateSeries rate_function(const QuenchSpec& q, const BrillouinGrid& grid, const std::vector<double>& times);

struct FisherZero {
    int n = 0;
    std::complex<double> z;  // real part tau, imaginary part t
};

enum class FisherConvention {
    Exact,        // Re z = -artanh(g) / eps: the true zeros of the mode amplitude
    PaperArctan,  // Re z = -arctan(g) / eps
};

struct IntRange {
    int first = 0;
    int last = 4;
};

/// z_n = i pi (n + 1/2) / eps - f(g) / eps for n in [first, last]. In the exact
/// convention modes with |g| = 1 never vanish and yield no zeros. Modes with
/// |g| below 1e-12 get Re z = 0 exactly.
std::vector<FisherZero> fisher_zeros(const ModeData& md, IntRange n_range = {},
                                     FisherConvention convention = FisherConvention::Exact);

inline constexpr double kCriticalOverlapTolerance = 1e-8;

/// t_n = pi (n + 1/2) / eps_f(k*). Throws NotCritical if |g(k*)| >= tol.
std::vector<double> dqpt_times(const QuenchSpec& q, const Momentum& k_star, IntRange n_range = {},
                               double tol = kCriticalOverlapTolerance);

/// Uniform time samples on [t_min, t_max].
std::vector<double> linspace(double first, double last, int samples);

}  // namespace dqpt
