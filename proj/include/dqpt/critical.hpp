#pragma once

#include <vector>

#include "dqpt/quench.hpp"

namespace dqpt {

struct CriticalSet1D {
    std::vector<double> roots;      // strictly increasing, in (0, pi)
    std::vector<double> residuals;  // |g(root)|
    bool boundary_zero = false;     // |g(0+)| below the limit tolerance
    bool boundary_pi = false;       // |g(pi-)| below the limit tolerance
    double limit_zero = 0.0;        // |g(0+)|, NaN if gapless there
    double limit_pi = 0.0;          // |g(pi-)|, NaN if gapless there
};

struct CriticalOptions1D {
    int scan_n = 4096;
    double tol = 1e-12;
    double limit_tol = 1e-6;
    double limit_offset = 1e-9;  // k = offset and pi - offset stand in for the endpoint limits
};

/// Roots of g(k) on (0, pi): uniform sign scan followed by bisection, plus
/// endpoint-limit checks for critical momenta sitting on k = 0 or pi.
CriticalSet1D find_critical_momenta_1d(const QuenchSpec& q, const CriticalOptions1D& opts = {});

struct Polyline {
    std::vector<Momentum2D> vertices;
    std::vector<double> residuals;  // |g| at each refined vertex
    bool closed = false;
};

struct CriticalContour2D {
    std::vector<Polyline> lines;
    std::size_t vertex_count() const;
};

/// Zero level set of g over a periodic 2D grid by marching squares. Vertices are
/// refined along their cell edge until |g| < tol; ambiguous cells are resolved by
/// the sign at the cell centre.
CriticalContour2D find_critical_contours_2d(const QuenchSpec& q, const BrillouinGrid& grid, double tol = 1e-8);

}  // namespace dqpt
