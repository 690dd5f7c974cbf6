#pragma once

// 3D inversion from spherical means (or wave traces): temporal filter, vector backprojection
// over the replicated face planes, then a discrete divergence.

#include "polymean/data.hpp"
#include "polymean/grid.hpp"
#include "polymean/replication.hpp"

namespace polymean {

/// Per physical detector, a function of t on t_k = k * dt.
struct FilteredProfiles3D {
    std::size_t detectors = 0;
    std::size_t n_t = 0;
    double dt = 0.0;
    std::vector<double> values;  // detector-major
    bool divide_by_t = false;  // backprojection uses value(t) / t instead of value(t)

    const double* row(std::size_t det) const { return values.data() + det * n_t; }
    double t_max() const { return dt * static_cast<double>(n_t - 1); }

    /// Radius beyond which every row is identically zero (including interpolation stencils).
    double support() const {
        std::size_t last = 0;
        for (std::size_t det = 0; det < detectors; ++det) {
            const double* r = row(det);
            for (std::size_t k = n_t; k-- > last;)
                if (r[k] != 0.0) {
                    last = k;
                    break;
                }
        }
        return dt * static_cast<double>(last + 2);
    }
};

/// g(t) = (1/t) d/dt (t M(t)); g(0) = 0.
inline FilteredProfiles3D filter_3d(const Dataset& M, unsigned threads = 0) {
    detail::check_kind(M, DataKind::means, 3);
    require(M.n_r >= 5, ErrorKind::invalid_argument, "need at least 5 time samples");
    const Dataset P = means_to_wave_3d(M, threads);
    FilteredProfiles3D g;
    g.detectors = M.detectors;
    g.n_t = M.n_r;
    g.dt = M.dr();
    g.values = P.values;
    for (std::size_t det = 0; det < g.detectors; ++det) {
        double* r = g.values.data() + det * g.n_t;
        r[0] = 0.0;
        for (std::size_t k = 1; k < g.n_t; ++k) r[k] /= g.dt * static_cast<double>(k);
    }
    return g;
}

/// Wave traces used directly: the backprojection divides P(|x - y|) by |x - y|.
inline FilteredProfiles3D wave_profiles_3d(const Dataset& P) {
    detail::check_kind(P, DataKind::wave, 3);
    require(P.n_r >= 4, ErrorKind::invalid_argument, "need at least 4 time samples");
    FilteredProfiles3D g;
    g.detectors = P.detectors;
    g.n_t = P.n_r;
    g.dt = P.dr();
    g.values = P.values;
    g.divide_by_t = true;
    return g;
}

struct VectorField {
    GridSpec<3> spec;
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(const GridSpec<3>& s) : spec(s) {
        for (auto& c : comp) c.assign(s.size(), 0.0);
    }
};

/// V(x) = (1/2pi) sum over replicated detectors y with |x - y| < T of w sigma n g(y_src, |x - y|).
/// The grid is processed in cubic blocks; each block owns its output, so results do not depend
/// on the thread count.
inline VectorField backproject_3d(const FilteredProfiles3D& g, const Domain<3>& d, double T,
                                  const GridSpec<3>& grid, unsigned threads = 0) {
    require(g.detectors == d.detector_count(), ErrorKind::dimension_mismatch,
            "profiles do not match the domain's detector count");
    if (T <= 0.0) T = d.diam;
    require(T <= g.t_max() * (1.0 + 1e-12), ErrorKind::out_of_range, "T exceeds the time range of the data");
    const double t_cut = std::min(T, g.support());
    VectorField V(grid);
    if (t_cut <= 0.0) return V;

    const Vec<3> lo = grid.origin, hi = grid.upper();
    const Vec<3> mid = 0.5 * (lo + hi);
    const auto nodes = replicated_nodes(d, mid, t_cut + norm(hi - mid));

    // Each node only sees the shell of radii where its source row (with the interpolation
    // stencil) is nonzero.
    struct Packed {
        double x, y, z, nx, ny, nz, lo2, hi2;
        const double* row;
    };
    std::vector<std::pair<double, double>> shell(g.detectors);
    for (std::size_t det = 0; det < g.detectors; ++det) {
        const double* r = g.row(det);
        std::size_t first = g.n_t, last = 0;
        for (std::size_t k = 0; k < g.n_t; ++k)
            if (r[k] != 0.0) {
                first = std::min(first, k);
                last = k;
            }
        if (first == g.n_t) {
            shell[det] = {1.0, 0.0};
            continue;
        }
        const double lo = first >= 3 ? g.dt * static_cast<double>(first - 2) : 0.0;
        const double hi = std::min(t_cut, g.dt * static_cast<double>(last + 2));
        shell[det] = {lo, hi};
    }
    std::vector<Packed> packed;
    packed.reserve(nodes.size());
    const double scale = 1.0 / (2.0 * kPi);
    for (const auto& nd : nodes) {
        const auto [lo, hi] = shell[nd.detector];
        if (hi <= lo) continue;
        const double c = scale * nd.weight;
        packed.push_back({nd.position[0], nd.position[1], nd.position[2], c * nd.normal[0], c * nd.normal[1],
                          c * nd.normal[2], lo * lo, hi * hi, g.row(nd.detector)});
    }

    constexpr std::size_t B = 8;
    std::array<std::size_t, 3> nb{};
    for (std::size_t a = 0; a < 3; ++a) nb[a] = (grid.count[a] + B - 1) / B;
    const std::size_t blocks = nb[0] * nb[1] * nb[2];
    const std::size_t n1 = grid.count[1], n2 = grid.count[2];
    const double inv_dt = 1.0 / g.dt;
    const int last_start = static_cast<int>(g.n_t) - 4;
    const double divide = g.divide_by_t ? 1.0 : 0.0, keep = 1.0 - divide;

    parallel_for(blocks, resolve_threads(static_cast<int>(threads)), [&](std::size_t b) {
        const std::size_t b0 = b / (nb[1] * nb[2]), b1 = (b / nb[2]) % nb[1], b2 = b % nb[2];
        std::array<std::size_t, 3> start{b0 * B, b1 * B, b2 * B}, stop{};
        for (std::size_t a = 0; a < 3; ++a) stop[a] = std::min(grid.count[a], start[a] + B);
        std::vector<double> px, py, pz;
        std::vector<std::size_t> flat;
        for (std::size_t i = start[0]; i < stop[0]; ++i)
            for (std::size_t j = start[1]; j < stop[1]; ++j)
                for (std::size_t k = start[2]; k < stop[2]; ++k) {
                    px.push_back(grid.origin[0] + grid.spacing[0] * static_cast<double>(i));
                    py.push_back(grid.origin[1] + grid.spacing[1] * static_cast<double>(j));
                    pz.push_back(grid.origin[2] + grid.spacing[2] * static_cast<double>(k));
                    flat.push_back((i * n1 + j) * n2 + k);
                }
        const std::size_t np = flat.size();
        const Vec<3> blo{px.front(), py.front(), pz.front()}, bhi{px.back(), py.back(), pz.back()};
        std::vector<double> ax(np, 0.0), ay(np, 0.0), az(np, 0.0);
        const double* X = px.data();
        const double* Y = py.data();
        const double* Z = pz.data();
        double* AX = ax.data();
        double* AY = ay.data();
        double* AZ = az.data();
        for (const auto& nd : packed) {
            // nearest and farthest distance from the node to the block's bounding box
            const Vec<3> c{nd.x, nd.y, nd.z};
            double near2 = 0.0, far2 = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                const double e = c[a] < blo[a] ? blo[a] - c[a] : (c[a] > bhi[a] ? c[a] - bhi[a] : 0.0);
                const double f = std::max(std::abs(c[a] - blo[a]), std::abs(c[a] - bhi[a]));
                near2 += e * e;
                far2 += f * f;
            }
            if (near2 >= nd.hi2 || far2 < nd.lo2) continue;
            const double* row = nd.row;
            const double lo2 = std::max(nd.lo2, 1e-300), hi2 = nd.hi2;
            const double nx = nd.nx, ny = nd.ny, nz = nd.nz, x0 = nd.x, y0 = nd.y, z0 = nd.z;
            // branch-free so the loop vectorizes; out-of-shell points are masked, not skipped
#pragma GCC ivdep
            for (std::size_t p = 0; p < np; ++p) {
                const double dx = X[p] - x0, dy = Y[p] - y0, dz = Z[p] - z0;
                const double d2 = dx * dx + dy * dy + dz * dz;
                const double mask = static_cast<double>((d2 >= lo2) & (d2 < hi2));
                const double t = std::sqrt(d2);
                const double u = t * inv_dt;
                const int i = std::min(std::max(static_cast<int>(u) - 1, 0), last_start);
                const double s = u - static_cast<double>(i);
                const double s1 = s - 1.0, s2 = s - 2.0, s3 = s - 3.0;
                double v = (-row[i] * s1 * s2 * s3 + row[i + 3] * s * s1 * s2) * (1.0 / 6.0) +
                           (row[i + 1] * s * s2 * s3 - row[i + 2] * s * s1 * s3) * 0.5;
                v *= mask * (keep + divide / std::max(t, 1e-300));
                AX[p] += nx * v;
                AY[p] += ny * v;
                AZ[p] += nz * v;
            }
        }
        for (std::size_t p = 0; p < np; ++p) {
            V.comp[0][flat[p]] = ax[p];
            V.comp[1][flat[p]] = ay[p];
            V.comp[2][flat[p]] = az[p];
        }
    });
    return V;
}

/// 4th-order divergence: central differences inside, one-sided 5-point stencils at the two
/// outermost layers of each axis.
inline ImageGrid<3> divergence(const VectorField& V, unsigned threads = 0) {
    const auto& g = V.spec;
    for (auto c : g.count) require(c >= 5, ErrorKind::invalid_argument, "divergence needs >= 5 points per axis");
    ImageGrid<3> out(g);
    const std::array<std::size_t, 3> stride{g.count[1] * g.count[2], g.count[2], 1};
    parallel_for(g.count[0], resolve_threads(static_cast<int>(threads)), [&](std::size_t i) {
        std::array<std::size_t, 3> idx{i, 0, 0};
        for (idx[1] = 0; idx[1] < g.count[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < g.count[2]; ++idx[2]) {
                const std::size_t at = idx[0] * stride[0] + idx[1] * stride[1] + idx[2];
                double s = 0.0;
                for (std::size_t a = 0; a < 3; ++a) {
                    const double* f = V.comp[a].data();
                    const std::size_t n = g.count[a], k = idx[a], st = stride[a];
                    auto F = [&](long off) { return f[at + static_cast<std::size_t>(static_cast<long>(st) * off)]; };
                    const double c = 1.0 / (12.0 * g.spacing[a]);
                    double dv;
                    if (k >= 2 && k + 2 < n)
                        dv = c * (-F(2) + 8.0 * F(1) - 8.0 * F(-1) + F(-2));
                    else if (k == 0)
                        dv = c * (-25.0 * F(0) + 48.0 * F(1) - 36.0 * F(2) + 16.0 * F(3) - 3.0 * F(4));
                    else if (k == 1)
                        dv = c * (-3.0 * F(-1) - 10.0 * F(0) + 18.0 * F(1) - 6.0 * F(2) + F(3));
                    else if (k + 2 == n)
                        dv = c * (3.0 * F(1) + 10.0 * F(0) - 18.0 * F(-1) + 6.0 * F(-2) - F(-3));
                    else
                        dv = c * (25.0 * F(0) - 48.0 * F(-1) + 36.0 * F(-2) - 16.0 * F(-3) + 3.0 * F(-4));
                    s += dv;
                }
                out.values[at] = s;
            }
    });
    return out;
}

inline ImageGrid<3> invert_means_3d(const Dataset& M, const Domain<3>& d, const GridSpec<3>& grid, double T = 0.0,
                                    unsigned threads = 0) {
    return divergence(backproject_3d(filter_3d(M, threads), d, T, grid, threads), threads);
}

inline ImageGrid<3> invert_wave_3d(const Dataset& P, const Domain<3>& d, const GridSpec<3>& grid, double T = 0.0,
                                   unsigned threads = 0) {
    return divergence(backproject_3d(wave_profiles_3d(P), d, T, grid, threads), threads);
}

}  // namespace polymean
