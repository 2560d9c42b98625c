#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "dqpt/quench.hpp"

namespace dqpt {

/// -p ln p - (1 - p) ln(1 - p) in nats, with 0 ln 0 = 0.
double binary_entropy(double p);

struct EntanglementRecord {
    Momentum momentum;
    double p = 1.0;  // (1 + g) / 2
    double S = 0.0;
};

/// Spectrum {p, 1 - p} in the post-quench eigenbasis; independent of time.
EntanglementRecord eigenbasis_record(const ModeData& md);

/// Sublattice (A, B) components of the evolved state, a|A> + b|B>.
struct SublatticeAmplitudes {
    std::complex<double> a;
    std::complex<double> b;
};

/// Throws BasisUnavailable for superconductor-class modes.
SublatticeAmplitudes sublattice_amplitudes(const ModeData& md, double t);

/// |a(t)|^2. Planar models use
///   1/2 - 1/2 [cos(dtheta) cos(theta_f) + sin(dtheta) sin(theta_f) cos(2 eps t)];
/// two-dimensional models use the Bloch-vector precession of the same state,
/// which reduces to the planar expression when both frames share an azimuth.
double sublattice_occupation(const ModeData& md, double t);

struct SublatticeSeries {
    Momentum momentum;
    std::vector<double> t;
    std::vector<double> a2;
    std::vector<double> S;
};

SublatticeSeries sublattice_entropy_series(const ModeData& md, const std::vector<double>& times);

enum class Bipartition { FinalEigen, Sublattice };

struct OracleResult {
    Eigen::Matrix2cd rho_mode;     // single-mode density matrix in the chosen basis
    Eigen::Matrix2d rho_reduced;   // after tracing out the partner factor, occupation basis (0, 1)
    Eigen::Vector2d spectrum;      // eigenvalues of rho_reduced, descending
    double p = 0.0;                // weight carried by the post-quench lower band / sublattice A
    double entropy = 0.0;
    double purity = 0.0;           // Tr rho_mode^2
};

/// Exact 2x2 diagonalization and evolution, embedding the mode state in the
/// two-factor Fock space and tracing out one factor numerically.
OracleResult ed_oracle(const QuenchSpec& q, const Momentum& k, double t, Bipartition basis);

}  // namespace dqpt
