#pragma once

// Tilings of space by mirrored copies of a domain, and the integration sets (lines in 2D,
// plane pieces in 3D) that the replicated boundary data lives on.

#include <cstdint>
#include <deque>
#include <map>
#include <tuple>

#include "polymean/geometry.hpp"

namespace polymean {

/// x -> linear * x + shift. `sign` is the reflection parity (determinant of `linear`).
template <std::size_t D>
struct Isometry {
    Mat<D> linear = identity_matrix<D>();
    Vec<D> shift{};
    int sign = 1;

    Vec<D> operator()(const Vec<D>& x) const { return apply(linear, x) + shift; }
    Vec<D> rotate(const Vec<D>& v) const { return apply(linear, v); }
};

template <std::size_t D>
Isometry<D> reflection_across(const Vec<D>& n, double offset) {
    Isometry<D> r;
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) r.linear[i * D + j] -= 2.0 * n[i] * n[j];
    r.shift = (2.0 * offset) * n;
    r.sign = -1;
    return r;
}

/// outer o inner
template <std::size_t D>
Isometry<D> compose(const Isometry<D>& outer, const Isometry<D>& inner) {
    Isometry<D> r;
    r.linear = matmul<D>(outer.linear, inner.linear);
    r.shift = outer(inner.shift);
    r.sign = outer.sign * inner.sign;
    return r;
}

template <std::size_t D>
Vec<D> reflect_point(const Vec<D>& x, const Vec<D>& n, double offset) {
    return x - (2.0 * (dot(n, x) - offset)) * n;
}

template <std::size_t D>
struct Tile {
    Isometry<D> map;  // fundamental domain -> this tile
    Vec<D> centroid{};
};

template <std::size_t D>
struct Tessellation {
    std::vector<Tile<D>> tiles;
    bool consistent = true;  // false if two paths reached the same cell with different maps
};

namespace detail {

template <std::size_t D>
Vec<D> vertex_centroid(const Domain<D>& d) {
    Vec<D> c{};
    for (const auto& v : d.vertices) c = c + v;
    return (1.0 / static_cast<double>(d.vertices.size())) * c;
}

template <std::size_t D>
auto quantize(const Vec<D>& x, double scale) {
    std::array<std::int64_t, D> k{};
    for (std::size_t i = 0; i < D; ++i) k[i] = std::llround(x[i] / (1e-7 * scale));
    return k;
}

template <std::size_t D>
bool same_map(const Isometry<D>& a, const Isometry<D>& b, double scale) {
    for (std::size_t i = 0; i < D * D; ++i)
        if (std::abs(a.linear[i] - b.linear[i]) > 1e-8) return false;
    for (std::size_t i = 0; i < D; ++i)
        if (std::abs(a.shift[i] - b.shift[i]) > 1e-8 * scale) return false;
    return a.sign == b.sign;
}

// Breadth-first reflection across the faces of `cell`, keeping tiles that can meet the ball.
template <std::size_t D>
Tessellation<D> reflect_fill(const std::vector<Vec<D>>& cell_vertices,
                             const std::vector<std::pair<Vec<D>, double>>& cell_planes, const Vec<D>& center,
                             double radius, double scale) {
    Vec<D> c0{};
    for (const auto& v : cell_vertices) c0 = c0 + v;
    c0 = (1.0 / static_cast<double>(cell_vertices.size())) * c0;
    double r0 = 0.0;
    for (const auto& v : cell_vertices) r0 = std::max(r0, norm(v - c0));

    Tessellation<D> out;
    std::map<std::array<std::int64_t, D>, std::size_t> seen;
    std::deque<Isometry<D>> queue{Isometry<D>{}};
    seen[quantize(c0, scale)] = 0;
    out.tiles.push_back({Isometry<D>{}, c0});
    while (!queue.empty()) {
        const Isometry<D> g = queue.front();
        queue.pop_front();
        for (const auto& [n, off] : cell_planes) {
            const Vec<D> gn = g.rotate(n);
            const double goff = dot(gn, g(cell_vertices[0])) + off - dot(n, cell_vertices[0]);
            const Isometry<D> h = compose(reflection_across(gn, goff), g);
            const Vec<D> c = h(c0);
            if (norm(c - center) > radius + r0) continue;
            const auto key = quantize(c, scale);
            if (auto it = seen.find(key); it != seen.end()) {
                if (!same_map(out.tiles[it->second].map, h, scale)) out.consistent = false;
                continue;
            }
            seen[key] = out.tiles.size();
            out.tiles.push_back({h, c});
            queue.push_back(h);
        }
    }
    return out;
}

}  // namespace detail

/// Mirrored copies of the pyramid's construction cell: the trirectangular tetrahedron is first
/// mirrored in its two vertical faces (x1 = 0, x2 = 0) into a square pyramid with apex (0,0,a),
/// which is then mirrored in each of its four slanted faces. Those 20 maps are intended to fill
/// the cube [-a,a]^2 x [0,2a], which is in turn tiled by box reflections.
inline std::vector<Isometry<3>> pyramid_cell_maps(double a) {
    std::vector<Isometry<3>> stage1;
    const Isometry<3> id{};
    const auto rx = reflection_across<3>({1, 0, 0}, 0.0);
    const auto ry = reflection_across<3>({0, 1, 0}, 0.0);
    stage1 = {id, rx, ry, compose(rx, ry)};
    std::vector<Isometry<3>> maps = stage1;
    for (double sx : {1.0, -1.0})
        for (double sy : {1.0, -1.0}) {
            const Vec<3> n = normalized(Vec<3>{sx, sy, 1.0});
            const auto r = reflection_across(n, a / std::sqrt(3.0));
            for (const auto& g : stage1) maps.push_back(compose(r, g));
        }
    return maps;
}

/// Tiles whose closure may meet the ball B(center, radius).
template <std::size_t D>
Tessellation<D> enumerate_tiles(const Domain<D>& d, const Vec<D>& center, double radius) {
    const double scale = d.diam;
    if constexpr (D == 3) {
        if (d.spec.kind == DomainKind::pyramid) {
            const double a = d.spec.a;
            const std::vector<Vec<3>> cube{{-a, -a, 0}, {a, -a, 0}, {-a, a, 0}, {a, a, 0},
                                           {-a, -a, 2 * a}, {a, -a, 2 * a}, {-a, a, 2 * a}, {a, a, 2 * a}};
            const std::vector<std::pair<Vec<3>, double>> planes{{{1, 0, 0}, a},  {{-1, 0, 0}, a}, {{0, 1, 0}, a},
                                                                {{0, -1, 0}, a}, {{0, 0, 1}, 2 * a}, {{0, 0, -1}, 0.0}};
            const auto cells = detail::reflect_fill<3>(cube, planes, center, radius + d.diam, scale);
            const auto inner = pyramid_cell_maps(a);
            const Vec<3> c0 = detail::vertex_centroid(d);
            Tessellation<3> out;
            // The inner maps do not close up into the cube, so the construction is never a
            // consistent tiling; see generates_reflection_group().
            out.consistent = false;
            for (const auto& cell : cells.tiles)
                for (const auto& g : inner) {
                    const auto h = compose(cell.map, g);
                    const Vec<3> c = h(c0);
                    if (norm(c - center) <= radius + d.diam) out.tiles.push_back({h, c});
                }
            return out;
        }
    }
    std::vector<std::pair<Vec<D>, double>> planes;
    for (const auto& f : d.faces) planes.emplace_back(f.normal, f.offset);
    return detail::reflect_fill<D>(d.vertices, planes, center, radius, scale);
}

/// Fixed direction used to pick one side of every skeleton face: a face is taken from the tile
/// whose outward normal has a positive component along it.
template <std::size_t D>
constexpr Vec<D> orientation_probe() {
    if constexpr (D == 2)
        return {0.872342, 0.412307};
    else
        return {0.831104, 0.427511, 0.262747};
}

/// One face of one tile in the skeleton, oriented by `orientation_probe`.
template <std::size_t D>
struct SkeletonFace {
    int face = 0;  // fundamental face it is a copy of
    std::size_t tile = 0;
    Vec<D> normal{};
    double offset = 0.0;  // normal . y == offset on the face plane
};

template <std::size_t D>
std::vector<SkeletonFace<D>> skeleton_faces(const Domain<D>& d, const Tessellation<D>& t) {
    std::vector<SkeletonFace<D>> out;
    const Vec<D> probe = orientation_probe<D>();
    for (std::size_t k = 0; k < t.tiles.size(); ++k) {
        const auto& g = t.tiles[k].map;
        for (const auto& f : d.faces) {
            const Vec<D> n = g.rotate(f.normal);
            if (dot(n, probe) <= 0.0) continue;
            out.push_back({f.id, k, n, dot(n, g(f.vertices[0]))});
        }
    }
    return out;
}

/// A segment of one line of the 2D integration set.
struct LineSegment {
    int face = 0;
    Vec<2> origin{};  // point on the line closest to the domain center
    Vec<2> tangent{};
    Vec<2> normal{};
    double t0 = 0.0, t1 = 0.0;  // arc-parameter interval, clipped to the truncation disk
    double offset = 0.0;  // normal . y on the line
};

/// Truncated line families: every skeleton edge clipped to the disk of radius `r_trunc` about
/// the domain center. Collinear edges of the same family are merged into one segment per line.
struct IntegrationSet2D {
    double r_trunc = 0.0;
    Vec<2> center{};
    std::vector<LineSegment> lines;

    /// Distinct line offsets for face `j`, measured along that face's exterior normal.
    std::vector<double> line_positions(const Domain<2>& d, int j) const {
        std::vector<double> pos;
        for (const auto& l : lines)
            if (l.face == j) pos.push_back(l.offset * dot(l.normal, d.faces[j].normal));
        std::sort(pos.begin(), pos.end());
        return pos;
    }
};

inline IntegrationSet2D integration_set_2d(const Domain<2>& d, double r_trunc) {
    require(r_trunc > 0.0, ErrorKind::invalid_argument, "truncation radius must be positive");
    IntegrationSet2D set;
    set.r_trunc = r_trunc;
    set.center = d.center;
    const auto tess = enumerate_tiles(d, d.center, r_trunc);
    const auto faces = skeleton_faces(d, tess);
    struct Key {
        int face;
        std::int64_t nx, ny, off;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, LineSegment> merged;
    const double q = 1e-7 * d.diam;
    for (const auto& sf : faces) {
        const auto& g = tess.tiles[sf.tile].map;
        const auto& f = d.faces[sf.face];
        const Vec<2> p0 = g(f.vertices[0]), p1 = g(f.vertices[1]);
        const Vec<2> tangent{-sf.normal[1], sf.normal[0]};
        const Vec<2> foot = d.center + (sf.offset - dot(sf.normal, d.center)) * sf.normal;
        const double dist = std::abs(sf.offset - dot(sf.normal, d.center));
        if (dist >= r_trunc) continue;
        const double half = std::sqrt(r_trunc * r_trunc - dist * dist);
        double s0 = dot(p0 - foot, tangent), s1 = dot(p1 - foot, tangent);
        if (s0 > s1) std::swap(s0, s1);
        s0 = std::max(s0, -half);
        s1 = std::min(s1, half);
        if (s1 <= s0) continue;
        const Key key{sf.face, std::llround(sf.normal[0] * 1e9), std::llround(sf.normal[1] * 1e9),
                      std::llround(sf.offset / q)};
        auto [it, fresh] = merged.try_emplace(key, LineSegment{sf.face, foot, tangent, sf.normal, s0, s1, sf.offset});
        if (!fresh) {
            it->second.t0 = std::min(it->second.t0, s0);
            it->second.t1 = std::max(it->second.t1, s1);
        }
    }
    for (auto& [k, seg] : merged) set.lines.push_back(seg);
    return set;
}

/// Footprint of B(x, T) on one skeleton plane.
struct PlaneFootprint {
    int face = 0;
    Vec<3> normal{};
    double offset = 0.0;
    double distance = 0.0;  // |normal . x - offset|
    double radius = 0.0;  // sqrt(T^2 - distance^2)
    std::vector<std::size_t> tiles;  // tiles whose copy of `face` meets the footprint disk
};

struct IntegrationSet3D {
    Vec<3> x{};
    double T = 0.0;
    std::vector<PlaneFootprint> planes;
    std::vector<Tile<3>> tiles;

    /// Planes of face family `j`, as offsets along the fundamental face normal.
    std::vector<double> plane_positions(const Domain<3>& d, int j) const {
        std::vector<double> pos;
        for (const auto& p : planes)
            if (p.face == j) pos.push_back(p.offset * dot(p.normal, d.faces[j].normal));
        std::sort(pos.begin(), pos.end());
        return pos;
    }
};

namespace detail {

// Does the convex polygon `poly` (in a plane) meet the disk centered at `c` of radius r in that plane?
inline bool polygon_meets_disk(const std::vector<Vec<3>>& poly, const Vec<3>& n, const Vec<3>& c, double r) {
    bool inside = true;
    const std::size_t m = poly.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        const Vec<3> p = poly[k], q = poly[(k + 1) % m], e = q - p;
        if (dot(cross(e, c - p), n) < 0.0) inside = false;
        const double t = std::clamp(dot(c - p, e) / dot(e, e), 0.0, 1.0);
        best = std::min(best, norm(c - (p + t * e)));
    }
    return best <= r || inside;
}

}  // namespace detail

inline IntegrationSet3D integration_set_3d(const Domain<3>& d, const Vec<3>& x, double T) {
    require(T > 0.0, ErrorKind::invalid_argument, "T must be positive");
    IntegrationSet3D set;
    set.x = x;
    set.T = T;
    const auto tess = enumerate_tiles(d, x, T);
    set.tiles = tess.tiles;
    std::map<std::tuple<int, std::int64_t, std::int64_t, std::int64_t, std::int64_t>, std::size_t> index;
    const double q = 1e-7 * d.diam;
    for (const auto& sf : skeleton_faces(d, tess)) {
        const double dist = std::abs(dot(sf.normal, x) - sf.offset);
        if (dist >= T) continue;
        const double radius = std::sqrt(T * T - dist * dist);
        const auto& g = tess.tiles[sf.tile].map;
        std::vector<Vec<3>> poly;
        for (const auto& v : d.faces[sf.face].vertices) poly.push_back(g(v));
        const Vec<3> foot = x - (dot(sf.normal, x) - sf.offset) * sf.normal;
        if (!detail::polygon_meets_disk(poly, sf.normal, foot, radius)) continue;
        const auto key = std::make_tuple(sf.face, std::llround(sf.normal[0] * 1e9), std::llround(sf.normal[1] * 1e9),
                                         std::llround(sf.normal[2] * 1e9), std::llround(sf.offset / q));
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, set.planes.size()).first;
            set.planes.push_back({sf.face, sf.normal, sf.offset, dist, radius, {}});
        }
        set.planes[it->second].tiles.push_back(sf.tile);
    }
    return set;
}

}  // namespace polymean
