#include "dqpt/geometry.hpp"

#include <string>

namespace dqpt {

BrillouinGrid build_grid_1d(int n, bool half_zone) {
    if (n < 2) throw InvalidGrid("1D grid needs N >= 2, got " + std::to_string(n));
    BrillouinGrid grid;
    grid.dimension = 1;
    grid.n1 = n;
    grid.half_zone = half_zone;
    grid.k1d.reserve(static_cast<std::size_t>(n));
    const double pi = std::numbers::pi;
    for (int j = 0; j < n; ++j) {
        if (half_zone)
            grid.k1d.push_back(pi * (j + 1) / (n + 1));
        else
            grid.k1d.push_back(-pi + 2.0 * pi * j / n);
    }
    return grid;
}

BrillouinGrid build_grid_2d(const Vec2& g1, const Vec2& g2, int n1, int n2) {
    if (n1 < 2 || n2 < 2) throw InvalidGrid("2D grid needs N1, N2 >= 2");
    const double cross = g1.x() * g2.y() - g1.y() * g2.x();
    if (std::abs(cross) <= 1e-12 * g1.norm() * g2.norm())
        throw InvalidGrid("reciprocal vectors are collinear");
    BrillouinGrid grid;
    grid.dimension = 2;
    grid.n1 = n1;
    grid.n2 = n2;
    grid.cell = {g1, g2};
    grid.k2d.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            grid.k2d.push_back(grid.cell.at(static_cast<double>(i) / n1, static_cast<double>(j) / n2));
    return grid;
}

}  // namespace dqpt
