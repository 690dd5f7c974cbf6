#pragma once

// Odd-reflection extension of boundary data. Closed forms for boxes, a generic fold for every
// supported domain, and the list of replicated detector copies used by the backprojections.

#include <functional>
#include <optional>

#include "polymean/tessellation.hpp"

namespace polymean {

struct Replicated1D {
    double source = 0.0;  // in (-a, a)
    int sign = 0;  // 0 on the reflection points (2m+1)a
};

inline Replicated1D replicate_1d(double a, double x) {
    require(a > 0.0, ErrorKind::invalid_argument, "half-width must be positive");
    const double n = std::round(x / (2.0 * a));
    const double r = x - 2.0 * a * n;
    if (std::abs(std::abs(r) - a) <= 1e-12 * a) return {r, 0};
    const bool odd = std::fmod(std::abs(n), 2.0) == 1.0;
    return odd ? Replicated1D{-r, -1} : Replicated1D{r, 1};
}

struct Replicated2D {
    std::array<double, 2> source{};
    int sign = 0;
};

inline Replicated2D replicate_2d(double a2, double a3, double x2, double x3) {
    const auto u = replicate_1d(a2, x2), v = replicate_1d(a3, x3);
    return {{u.source, v.source}, u.sign * v.sign};
}

/// Discrete version on a cell-centered lattice of n cells per period half: index i (any integer)
/// maps to a physical index in [0, n) with the reflection sign.
struct LatticeSource {
    long index = 0;
    int sign = 1;
};

inline LatticeSource replicate_lattice(long i, long n) {
    const long t = i >= 0 ? i / n : -((-i + n - 1) / n);
    const long src = (t % 2 == 0) ? i - t * n : (t + 1) * n - 1 - i;
    return {src, (t % 2 == 0) ? 1 : -1};
}

/// Which detector value a point of the replicated boundary carries.
template <std::size_t D>
struct SourceRef {
    int face = -1;
    std::array<double, D - 1> coords{};  // in-face coordinates on the physical face
    int sign = 0;
};

template <std::size_t D>
struct FoldResult {
    Vec<D> point{};
    int sign = 0;
    int reflections = 0;
};

/// Chooses which violated face to reflect across; receives the list of violated face ids.
using FacePicker = std::function<int(const std::vector<int>&)>;

namespace detail {

template <std::size_t D>
FoldResult<D> fold_into(const std::vector<std::pair<Vec<D>, double>>& planes, Vec<D> x, int sign, double tol,
                        const FacePicker& pick, int cap) {
    int steps = 0;
    std::vector<int> violated;
    for (;;) {
        violated.clear();
        for (std::size_t j = 0; j < planes.size(); ++j)
            if (dot(planes[j].first, x) - planes[j].second > tol) violated.push_back(static_cast<int>(j));
        if (violated.empty()) break;
        require(steps < cap, ErrorKind::geometry, "fold did not terminate");
        const int j = pick ? pick(violated) : violated.front();
        x = reflect_point(x, planes[j].first, planes[j].second);
        sign = -sign;
        ++steps;
    }
    for (const auto& [n, c] : planes)
        if (std::abs(dot(n, x) - c) <= tol) return {x, 0, steps};
    return {x, sign, steps};
}

template <std::size_t D>
std::vector<std::pair<Vec<D>, double>> face_planes(const Domain<D>& d) {
    std::vector<std::pair<Vec<D>, double>> p;
    for (const auto& f : d.faces) p.emplace_back(f.normal, f.offset);
    return p;
}

}  // namespace detail

/// Reflect x across violated face planes of the domain until it lies in the closure, flipping
/// the sign each time. Points that end on the boundary get sign 0. The pyramid is first folded
/// into its construction cube [-a,a]^2 x [0,2a] by per-axis reflections.
template <std::size_t D>
FoldResult<D> fold_point(const Domain<D>& d, const Vec<D>& x, const FacePicker& pick = {}, int cap = 100000) {
    const double tol = 1e-12 * d.diam;
    Vec<D> y = x;
    int sign = 1;
    int steps = 0;
    if constexpr (D == 3) {
        if (d.spec.kind == DomainKind::pyramid) {
            const double a = d.spec.a;
            const Vec<3> c{0.0, 0.0, a};
            for (std::size_t i = 0; i < 3; ++i) {
                const auto r = replicate_1d(a, y[i] - c[i]);
                const double n = std::round((y[i] - c[i]) / (2.0 * a));
                steps += static_cast<int>(std::abs(n));
                y[i] = r.source + c[i];
                sign *= r.sign == 0 ? 1 : r.sign;
                if (r.sign == 0) sign = 0;
            }
            if (sign == 0) return {y, 0, steps};
        }
    }
    auto r = detail::fold_into<D>(detail::face_planes(d), y, sign, tol, pick, cap);
    r.reflections += steps;
    if (sign == 0) r.sign = 0;
    return r;
}

/// Source of a point on the replicated boundary. `n` is the normal of the skeleton face through
/// y; the fold is applied to a point nudged off the face so the correct side is chosen.
template <std::size_t D>
SourceRef<D> source_on_face(const Domain<D>& d, const Vec<D>& y, const Vec<D>& n) {
    const double delta = 1e-9 * d.diam;
    const auto r = fold_point(d, y - delta * n);
    SourceRef<D> s;
    if (r.sign == 0) return s;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : d.faces) {
        const double dist = std::abs(f.signed_distance(r.point));
        if (dist < best) {
            best = dist;
            s.face = f.id;
        }
    }
    const auto& f = d.faces[s.face];
    s.coords = f.in_face(r.point - f.signed_distance(r.point) * f.normal);
    s.sign = r.sign;
    return s;
}

/// Closed-form replication for boxes: point on the face family j (any position in the
/// replicated plane or line) to in-face coordinates of face j.
template <std::size_t D>
SourceRef<D> box_source(const Domain<D>& d, int face, const Vec<D>& y) {
    require(d.is_box(), ErrorKind::invalid_argument, "closed-form replication needs a box domain");
    const Vec<D> h = d.box_half_widths();
    const auto& f = d.faces[face];
    SourceRef<D> s;
    s.face = face;
    s.sign = 1;
    Vec<D> p{};
    std::size_t axis = 0;
    for (std::size_t i = 0; i < D; ++i)
        if (std::abs(f.normal[i]) > 0.5) axis = i;
    for (std::size_t i = 0; i < D; ++i) {
        if (i == axis) {
            p[i] = f.offset * f.normal[i];
            continue;
        }
        const auto r = replicate_1d(h[i], y[i]);
        p[i] = r.source;
        s.sign *= r.sign;
    }
    s.coords = f.in_face(p);
    return s;
}

/// A replicated copy of a physical detector.
template <std::size_t D>
struct ReplicatedNode {
    Vec<D> position{};
    Vec<D> normal{};
    std::uint32_t detector = 0;  // flattened physical detector index
    float face = 0;
    double weight = 0.0;  // quadrature weight times reflection sign
};

/// Copies of every physical detector on skeleton faces whose position lies within `radius` of
/// `center`. Each skeleton face is taken once, from the tile on the side given by
/// orientation_probe(); the opposite choice flips both normal and sign, so the product is the same.
template <std::size_t D>
std::vector<ReplicatedNode<D>> replicated_nodes(const Domain<D>& d, const Vec<D>& center, double radius) {
    const auto tess = enumerate_tiles(d, center, radius);
    std::vector<ReplicatedNode<D>> out;
    for (const auto& sf : skeleton_faces(d, tess)) {
        const auto& g = tess.tiles[sf.tile].map;
        const auto& f = d.faces[sf.face];
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Vec<D> y = g(f.nodes[i]);
            if (norm(y - center) > radius) continue;
            out.push_back({y, sf.normal, static_cast<std::uint32_t>(d.face_offsets[sf.face] + i),
                           static_cast<float>(sf.face), g.sign * f.weights[i]});
        }
    }
    return out;
}

}  // namespace polymean
