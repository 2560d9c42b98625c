#include "dqpt/critical.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "dqpt/parallel.hpp"

namespace dqpt {

namespace {

std::optional<double> try_overlap(const QuenchSpec& q, double k) {
    try {
        return overlap_at(q, k);
    } catch (const GapClosure&) {
        return std::nullopt;
    }
}

// Bisection on [a, b] with g(a) g(b) < 0; returns the best point seen.
template <typename F>
std::pair<double, double> bisect(F&& g, double a, double ga, double b, double tol) {
    double best = a;
    double best_res = std::abs(ga);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double gm = g(mid);
        if (std::abs(gm) < best_res) {
            best = mid;
            best_res = std::abs(gm);
        }
        if (std::abs(gm) < tol) break;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return {best, best_res};
}

}  // namespace

CriticalSet1D find_critical_momenta_1d(const QuenchSpec& q, const CriticalOptions1D& opts) {
    if (q.dimension() != 1) throw DimensionMismatch("find_critical_momenta_1d needs a 1D quench");
    if (opts.scan_n < 64) throw InvalidGrid("scan_N must be at least 64");

    const double pi = std::numbers::pi;
    const int n = opts.scan_n;
    std::vector<double> ks(static_cast<std::size_t>(n) + 1);
    std::vector<std::optional<double>> gs(ks.size());
    for (int j = 0; j <= n; ++j) ks[j] = pi * j / n;
    ks.front() = opts.limit_offset;
    ks.back() = pi - opts.limit_offset;
    for (std::size_t j = 0; j < ks.size(); ++j) gs[j] = try_overlap(q, ks[j]);

    CriticalSet1D out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.limit_zero = gs.front() ? std::abs(*gs.front()) : nan;
    out.limit_pi = gs.back() ? std::abs(*gs.back()) : nan;
    out.boundary_zero = gs.front() && out.limit_zero < opts.limit_tol;
    out.boundary_pi = gs.back() && out.limit_pi < opts.limit_tol;

    auto g = [&](double k) { return overlap_at(q, k); };
    for (std::size_t j = 1; j + 1 < ks.size(); ++j) {
        if (gs[j] && *gs[j] == 0.0) {
            out.roots.push_back(ks[j]);
            out.residuals.push_back(0.0);
        }
    }
    for (std::size_t j = 0; j + 1 < ks.size(); ++j) {
        if (!gs[j] || !gs[j + 1]) continue;
        const double ga = *gs[j], gb = *gs[j + 1];
        if (ga == 0.0 || gb == 0.0 || (ga < 0.0) == (gb < 0.0)) continue;
        const auto [root, res] = bisect(g, ks[j], ga, ks[j + 1], opts.tol);
        out.roots.push_back(root);
        out.residuals.push_back(res);
    }
    // Sort roots and residuals together.
    std::vector<std::size_t> order(out.roots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.roots[a] < out.roots[b]; });
    CriticalSet1D sorted = out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.roots[i] = out.roots[order[i]];
        sorted.residuals[i] = out.residuals[order[i]];
    }
    return sorted;
}

std::size_t CriticalContour2D::vertex_count() const {
    std::size_t n = 0;
    for (const auto& l : lines) n += l.vertices.size();
    return n;
}

namespace {

// Crossing edges of the periodic lattice. Edge (i, j, dir): dir 0 runs from
// node (i, j) to (i+1, j), dir 1 from (i, j) to (i, j+1).
struct EdgeKey {
    int i, j, dir;
};

class ContourBuilder {
public:
    ContourBuilder(const QuenchSpec& q, const BrillouinGrid& grid, double tol)
        : q_(q), grid_(grid), tol_(tol), n1_(grid.n1), n2_(grid.n2) {}

    CriticalContour2D run() {
        sample();
        classify();
        return stitch();
    }

private:
    double g_frac(const Vec2& frac) const { return overlap_at(q_, grid_.cell.at(frac).cart); }
    double node(int i, int j) const { return values_[idx(wrap1(i), wrap2(j))]; }
    int wrap1(int i) const { return ((i % n1_) + n1_) % n1_; }
    int wrap2(int j) const { return ((j % n2_) + n2_) % n2_; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n2_ + j; }
    std::size_t edge_id(const EdgeKey& e) const { return 2 * idx(wrap1(e.i), wrap2(e.j)) + e.dir; }
    bool positive(double v) const { return v > 0.0; }

    void sample() {
        values_.resize(grid_.k2d.size());
        parallel_for(values_.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) values_[i] = overlap_at(q_, grid_.k2d[i].cart);
        });
    }

    // Per cell, up to two segments joining crossing edges.
    void classify() {
        const std::size_t cells = values_.size();
        segments_.assign(cells, {});
        parallel_for(cells, [&](std::size_t b, std::size_t e) {
            for (std::size_t c = b; c < e; ++c) segments_[c] = cell_segments(static_cast<int>(c / n2_),
                                                                             static_cast<int>(c % n2_));
        });
    }

    struct CellSegments {
        int count = 0;
        std::array<std::array<EdgeKey, 2>, 2> seg{};
    };

    CellSegments cell_segments(int i, int j) const {
        const bool s0 = positive(node(i, j)), s1 = positive(node(i + 1, j));
        const bool s2 = positive(node(i + 1, j + 1)), s3 = positive(node(i, j + 1));
        // bottom, right, top, left
        const std::array<EdgeKey, 4> edges{EdgeKey{i, j, 0}, EdgeKey{i + 1, j, 1}, EdgeKey{i, j + 1, 0},
                                           EdgeKey{i, j, 1}};
        const std::array<bool, 4> cut{s0 != s1, s1 != s2, s3 != s2, s0 != s3};
        CellSegments out;
        const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
        if (ncut == 2) {
            std::array<EdgeKey, 2> pair{};
            int m = 0;
            for (int e = 0; e < 4; ++e)
                if (cut[e]) pair[m++] = edges[e];
            out.seg[0] = pair;
            out.count = 1;
        } else if (ncut == 4) {
            const Vec2 centre((i + 0.5) / n1_, (j + 0.5) / n2_);
            const bool sc = positive(g_frac(centre));
            if (sc == s0) {
                // corners 0 and 2 connect through the centre; isolate corners 1 and 3
                out.seg[0] = {edges[0], edges[1]};
                out.seg[1] = {edges[2], edges[3]};
            } else {
                out.seg[0] = {edges[0], edges[3]};
                out.seg[1] = {edges[1], edges[2]};
            }
            out.count = 2;
        }
        return out;
    }

    // Refines the crossing on an edge, returning the vertex and |g| there.
    std::pair<Momentum2D, double> refine(const EdgeKey& e) const {
        const Vec2 start(static_cast<double>(e.i) / n1_, static_cast<double>(e.j) / n2_);
        const Vec2 step = e.dir == 0 ? Vec2(1.0 / n1_, 0.0) : Vec2(0.0, 1.0 / n2_);
        const double ga = node(e.i, e.j);
        const double gb = e.dir == 0 ? node(e.i + 1, e.j) : node(e.i, e.j + 1);
        auto along = [&](double s) { return g_frac(start + s * step); };
        double s_best = ga / (ga - gb);
        double res = std::abs(along(s_best));
        if (res >= tol_) {
            const auto [s, r] = bisect(along, 0.0, ga, 1.0, tol_);
            if (r < res) {
                s_best = s;
                res = r;
            }
        }
        Vec2 frac = start + s_best * step;
        frac.x() -= std::floor(frac.x());
        frac.y() -= std::floor(frac.y());
        return {grid_.cell.at(frac), res};
    }

    CriticalContour2D stitch() {
        // Each crossing edge is shared by exactly two cells; link the cells' segments.
        const std::size_t nedges = 2 * values_.size();
        std::vector<std::array<std::size_t, 2>> link(nedges, {npos, npos});
        std::vector<EdgeKey> keys(nedges);
        auto attach = [&](const EdgeKey& a, const EdgeKey& b) {
            const std::size_t ia = edge_id(a), ib = edge_id(b);
            keys[ia] = a;
            keys[ib] = b;
            (link[ia][0] == npos ? link[ia][0] : link[ia][1]) = ib;
            (link[ib][0] == npos ? link[ib][0] : link[ib][1]) = ia;
        };
        for (const auto& cs : segments_)
            for (int s = 0; s < cs.count; ++s) attach(cs.seg[s][0], cs.seg[s][1]);

        CriticalContour2D out;
        std::vector<char> visited(nedges, 0);
        for (std::size_t start = 0; start < nedges; ++start) {
            if (link[start][0] == npos || visited[start]) continue;
            std::vector<std::size_t> chain{start};
            visited[start] = 1;
            std::size_t prev = npos, cur = start;
            bool closed = false;
            while (true) {
                std::size_t next = link[cur][0] != prev ? link[cur][0] : link[cur][1];
                if (link[cur][0] == link[cur][1]) next = link[cur][0];
                if (next == npos) break;
                if (next == start) {
                    closed = true;
                    break;
                }
                if (visited[next]) break;
                visited[next] = 1;
                chain.push_back(next);
                prev = cur;
                cur = next;
            }
            Polyline line;
            line.closed = closed;
            line.vertices.resize(chain.size());
            line.residuals.resize(chain.size());
            parallel_for(chain.size(), [&](std::size_t b, std::size_t e) {
                for (std::size_t v = b; v < e; ++v) {
                    auto [pt, res] = refine(keys[chain[v]]);
                    line.vertices[v] = pt;
                    line.residuals[v] = res;
                }
            });
            out.lines.push_back(std::move(line));
        }
        return out;
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    const QuenchSpec& q_;
    const BrillouinGrid& grid_;
    double tol_;
    int n1_, n2_;
    std::vector<double> values_;
    std::vector<CellSegments> segments_;
};

}  // namespace

CriticalContour2D find_critical_contours_2d(const QuenchSpec& q, const BrillouinGrid& grid, double tol) {
    if (q.dimension() != 2 || grid.dimension != 2)
        throw DimensionMismatch("find_critical_contours_2d needs a 2D quench and grid");
    return ContourBuilder(q, grid, tol).run();
}

}  // namespace dqpt
