#pragma once

// Acquisition domains: polygons and polyhedra whose boundaries carry detector lattices.

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polymean/core.hpp"

namespace polymean {

enum class DomainKind {
    square,
    rectangle,
    tri_equilateral,
    tri_right_isosceles,
    tri_30_60_90,
    cube,
    cuboid,
    prism,
    pyramid,
};

inline std::string_view to_string(DomainKind k) {
    switch (k) {
        case DomainKind::square: return "square";
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::tri_equilateral: return "tri_equilateral";
        case DomainKind::tri_right_isosceles: return "tri_right_isosceles";
        case DomainKind::tri_30_60_90: return "tri_30_60_90";
        case DomainKind::cube: return "cube";
        case DomainKind::cuboid: return "cuboid";
        case DomainKind::prism: return "prism";
        case DomainKind::pyramid: return "pyramid";
    }
    return "?";
}

inline DomainKind domain_kind_from_string(std::string_view s) {
    for (auto k : {DomainKind::square, DomainKind::rectangle, DomainKind::tri_equilateral,
                   DomainKind::tri_right_isosceles, DomainKind::tri_30_60_90, DomainKind::cube,
                   DomainKind::cuboid, DomainKind::prism, DomainKind::pyramid})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::invalid_argument, "unsupported domain kind '" + std::string(s) + "'");
}

inline bool is_triangle(DomainKind k) {
    return k == DomainKind::tri_equilateral || k == DomainKind::tri_right_isosceles || k == DomainKind::tri_30_60_90;
}

inline std::size_t dimension_of(DomainKind k) {
    switch (k) {
        case DomainKind::cube:
        case DomainKind::cuboid:
        case DomainKind::prism:
        case DomainKind::pyramid: return 3;
        default: return 2;
    }
}

/// Parameters of a domain. Boxes use half-widths (one value for square/cube); triangles and the
/// pyramid use the edge length `a`; prisms combine a triangle `base` with `height`.
/// `detectors` is the lattice count along the longest face edge; shorter edges scale down.
struct DomainSpec {
    DomainKind kind = DomainKind::square;
    std::vector<double> half_widths{1.0};
    double a = 1.0;
    DomainKind base = DomainKind::tri_equilateral;
    double height = 1.0;
    int detectors = 16;
};

enum class FaceShape { segment, rectangle, triangle };

template <std::size_t D>
struct Face {
    int id = 0;
    FaceShape shape = FaceShape::segment;
    std::vector<Vec<D>> vertices;
    Vec<D> normal{};  // exterior unit normal
    double offset = 0.0;  // normal . x == offset on the face plane
    Vec<D> origin{};  // in-face coordinates are measured from here along `axes`
    std::array<Vec<D>, D - 1> axes{};
    int rows = 0;
    int cols = 0;
    std::vector<Vec<D>> nodes;  // detector positions, row-major
    std::vector<double> weights;  // quadrature weight (length or area) per node

    std::size_t size() const { return nodes.size(); }

    std::array<double, D - 1> in_face(const Vec<D>& x) const {
        std::array<double, D - 1> c{};
        for (std::size_t k = 0; k + 1 < D; ++k) c[k] = dot(x - origin, axes[k]);
        return c;
    }

    double signed_distance(const Vec<D>& x) const { return dot(normal, x) - offset; }
};

template <std::size_t D>
struct Domain {
    DomainSpec spec;
    std::vector<Vec<D>> vertices;
    std::vector<Face<D>> faces;
    Vec<D> center{};  // bounding-box center
    double diam = 0.0;
    double circumradius = 0.0;  // max vertex distance from `center`
    std::vector<std::size_t> face_offsets;  // first flattened detector index of each face

    bool is_box() const { return spec.kind == DomainKind::square || spec.kind == DomainKind::rectangle ||
                                 spec.kind == DomainKind::cube || spec.kind == DomainKind::cuboid; }

    /// Half-widths per axis for boxes (centered at the origin).
    Vec<D> box_half_widths() const {
        Vec<D> h{};
        for (std::size_t i = 0; i < D; ++i)
            h[i] = spec.half_widths.size() == 1 ? spec.half_widths[0] : spec.half_widths.at(i);
        return h;
    }

    std::size_t detector_count() const { return face_offsets.empty() ? 0 : face_offsets.back() + faces.back().size(); }

    bool contains(const Vec<D>& x, double tol = 0.0) const {
        for (const auto& f : faces)
            if (f.signed_distance(x) > tol) return false;
        return true;
    }

    double distance_to(const Vec<D>& x) const;

    /// Position and weight of a flattened detector index.
    std::pair<int, std::size_t> locate(std::size_t flat) const {
        std::size_t j = faces.size() - 1;
        while (face_offsets[j] > flat) --j;
        return {static_cast<int>(j), flat - face_offsets[j]};
    }
};

namespace detail {

inline int scaled_count(int n, double length, double ref) {
    return std::max(2, static_cast<int>(std::lround(n * length / ref)));
}

template <std::size_t D>
void fill_segment_lattice(Face<D>& f, int n) {
    const Vec<D> p0 = f.vertices[0], p1 = f.vertices[1];
    const double len = norm(p1 - p0);
    f.rows = 1;
    f.cols = n;
    f.origin = 0.5 * (p0 + p1);
    f.axes[0] = normalized(p1 - p0);
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) / n;
        f.nodes.push_back(p0 + s * (p1 - p0));
        f.weights.push_back(len / n);
    }
}

// Cell-centered lattice on the parallelogram p0 + u*(p1-p0) + v*(p3-p0).
inline void fill_rect_lattice(Face<3>& f, int nu, int nv) {
    const Vec<3> p0 = f.vertices[0], eu = f.vertices[1] - p0, ev = f.vertices[3] - p0;
    f.rows = nu;
    f.cols = nv;
    f.origin = p0 + 0.5 * eu + 0.5 * ev;
    f.axes = {normalized(eu), normalized(ev)};
    const double w = norm(eu) * norm(ev) / (static_cast<double>(nu) * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            f.nodes.push_back(p0 + ((i + 0.5) / nu) * eu + ((j + 0.5) / nv) * ev);
            f.weights.push_back(w);
        }
}

// n^2 congruent sub-triangles, one node at each centroid.
inline void fill_triangle_lattice(Face<3>& f, int n) {
    const Vec<3> a = f.vertices[0], eb = f.vertices[1] - a, ec = f.vertices[2] - a;
    f.rows = 1;
    f.cols = n * n;
    f.origin = a + (1.0 / 3.0) * (eb + ec);
    f.axes[0] = normalized(eb);
    f.axes[1] = normalized(cross(f.normal, f.axes[0]));
    const double area = 0.5 * norm(cross(eb, ec));
    const double w = area / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) {
            f.nodes.push_back(a + ((i + 1.0 / 3.0) / n) * eb + ((j + 1.0 / 3.0) / n) * ec);
            f.weights.push_back(w);
            if (i + j < n - 1) {
                f.nodes.push_back(a + ((i + 2.0 / 3.0) / n) * eb + ((j + 2.0 / 3.0) / n) * ec);
                f.weights.push_back(w);
            }
        }
}

inline std::vector<Vec<2>> triangle_vertices(DomainKind k, double a) {
    switch (k) {
        case DomainKind::tri_equilateral: return {{0.0, 0.0}, {a, 0.0}, {0.5 * a, 0.5 * std::sqrt(3.0) * a}};
        case DomainKind::tri_right_isosceles: return {{0.0, 0.0}, {a, 0.0}, {0.0, a}};
        case DomainKind::tri_30_60_90: return {{0.0, 0.0}, {a, 0.0}, {0.0, std::sqrt(3.0) * a}};
        default: throw Error(ErrorKind::invalid_argument, "not a triangle kind");
    }
}

template <std::size_t D>
void finish_domain(Domain<D>& d) {
    Vec<D> lo = d.vertices[0], hi = d.vertices[0];
    for (const auto& v : d.vertices)
        for (std::size_t i = 0; i < D; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    d.center = 0.5 * (lo + hi);
    d.diam = 0.0;
    d.circumradius = 0.0;
    for (const auto& v : d.vertices) {
        d.circumradius = std::max(d.circumradius, norm(v - d.center));
        for (const auto& w : d.vertices) d.diam = std::max(d.diam, norm(v - w));
    }
    std::size_t off = 0;
    for (std::size_t j = 0; j < d.faces.size(); ++j) {
        d.faces[j].id = static_cast<int>(j);
        d.faces[j].offset = dot(d.faces[j].normal, d.faces[j].vertices[0]);
        d.face_offsets.push_back(off);
        off += d.faces[j].size();
    }
}

inline void validate(const DomainSpec& s) {
    require(s.detectors >= 2, ErrorKind::invalid_argument, "detector count must be >= 2");
    switch (s.kind) {
        case DomainKind::square:
        case DomainKind::cube:
            require(!s.half_widths.empty() && s.half_widths[0] > 0.0, ErrorKind::invalid_argument,
                    "half-width must be positive");
            break;
        case DomainKind::rectangle:
        case DomainKind::cuboid: {
            const std::size_t want = dimension_of(s.kind);
            require(s.half_widths.size() == want, ErrorKind::invalid_argument,
                    "expected " + std::to_string(want) + " half-widths");
            for (double h : s.half_widths) require(h > 0.0, ErrorKind::invalid_argument, "half-widths must be positive");
            break;
        }
        case DomainKind::prism:
            require(is_triangle(s.base), ErrorKind::invalid_argument, "prism base must be a supported triangle");
            require(s.height > 0.0, ErrorKind::invalid_argument, "prism height must be positive");
            [[fallthrough]];
        default:
            require(s.a > 0.0, ErrorKind::invalid_argument, "edge length must be positive");
    }
}

}  // namespace detail

inline Domain<2> build_domain_2d(const DomainSpec& spec) {
    detail::validate(spec);
    require(dimension_of(spec.kind) == 2, ErrorKind::dimension_mismatch,
            std::string(to_string(spec.kind)) + " is not a 2D domain");
    Domain<2> d;
    d.spec = spec;
    if (spec.kind == DomainKind::square || spec.kind == DomainKind::rectangle) {
        const double a1 = spec.half_widths[0];
        const double a2 = spec.half_widths.size() > 1 ? spec.half_widths[1] : a1;
        d.vertices = {{a1, -a2}, {a1, a2}, {-a1, a2}, {-a1, -a2}};
        // Faces: x1 = +a1, x1 = -a1, x2 = +a2, x2 = -a2.
        const std::array<std::array<Vec<2>, 2>, 4> ends{{{{{a1, -a2}, {a1, a2}}},
                                                         {{{-a1, -a2}, {-a1, a2}}},
                                                         {{{-a1, a2}, {a1, a2}}},
                                                         {{{-a1, -a2}, {a1, -a2}}}}};
        const std::array<Vec<2>, 4> normals{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        const double ref = 2.0 * std::max(a1, a2);
        for (int j = 0; j < 4; ++j) {
            Face<2> f;
            f.vertices = {ends[j][0], ends[j][1]};
            f.normal = normals[j];
            detail::fill_segment_lattice(f, detail::scaled_count(spec.detectors, norm(ends[j][1] - ends[j][0]), ref));
            d.faces.push_back(std::move(f));
        }
    } else {
        d.vertices = detail::triangle_vertices(spec.kind, spec.a);
        double ref = 0.0;
        for (int j = 0; j < 3; ++j) ref = std::max(ref, norm(d.vertices[(j + 1) % 3] - d.vertices[j]));
        for (int j = 0; j < 3; ++j) {
            Face<2> f;
            const Vec<2> p0 = d.vertices[j], p1 = d.vertices[(j + 1) % 3];
            f.vertices = {p0, p1};
            f.normal = normalized(Vec<2>{p1[1] - p0[1], p0[0] - p1[0]});  // counter-clockwise boundary
            detail::fill_segment_lattice(f, detail::scaled_count(spec.detectors, norm(p1 - p0), ref));
            d.faces.push_back(std::move(f));
        }
    }
    detail::finish_domain(d);
    return d;
}

inline Domain<3> build_domain_3d(const DomainSpec& spec) {
    detail::validate(spec);
    require(dimension_of(spec.kind) == 3, ErrorKind::dimension_mismatch,
            std::string(to_string(spec.kind)) + " is not a 3D domain");
    Domain<3> d;
    d.spec = spec;
    std::vector<std::vector<Vec<3>>> polys;
    if (spec.kind == DomainKind::cube || spec.kind == DomainKind::cuboid) {
        const double a1 = spec.half_widths[0];
        const double a2 = spec.half_widths.size() > 1 ? spec.half_widths[1] : a1;
        const double a3 = spec.half_widths.size() > 2 ? spec.half_widths[2] : a1;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0})
                for (double sz : {-1.0, 1.0}) d.vertices.push_back({sx * a1, sy * a2, sz * a3});
        // Faces: +x1, -x1, +x2, -x2, +x3, -x3. In-face axes follow the remaining coordinates in order.
        polys = {{{a1, -a2, -a3}, {a1, a2, -a3}, {a1, a2, a3}, {a1, -a2, a3}},
                 {{-a1, -a2, -a3}, {-a1, a2, -a3}, {-a1, a2, a3}, {-a1, -a2, a3}},
                 {{-a1, a2, -a3}, {a1, a2, -a3}, {a1, a2, a3}, {-a1, a2, a3}},
                 {{-a1, -a2, -a3}, {a1, -a2, -a3}, {a1, -a2, a3}, {-a1, -a2, a3}},
                 {{-a1, -a2, a3}, {a1, -a2, a3}, {a1, a2, a3}, {-a1, a2, a3}},
                 {{-a1, -a2, -a3}, {a1, -a2, -a3}, {a1, a2, -a3}, {-a1, a2, -a3}}};
        const std::array<Vec<3>, 6> normals{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
        const double ref = 2.0 * std::max({a1, a2, a3});
        for (int j = 0; j < 6; ++j) {
            Face<3> f;
            f.shape = FaceShape::rectangle;
            f.vertices = polys[j];
            f.normal = normals[j];
            detail::fill_rect_lattice(f, detail::scaled_count(spec.detectors, norm(f.vertices[1] - f.vertices[0]), ref),
                                      detail::scaled_count(spec.detectors, norm(f.vertices[3] - f.vertices[0]), ref));
            d.faces.push_back(std::move(f));
        }
        detail::finish_domain(d);
        return d;
    }

    if (spec.kind == DomainKind::prism) {
        const auto base = detail::triangle_vertices(spec.base, spec.a);
        const double h = spec.height;
        for (const auto& v : base) d.vertices.push_back({v[0], v[1], 0.0});
        for (const auto& v : base) d.vertices.push_back({v[0], v[1], h});
        double ref = h;
        for (int j = 0; j < 3; ++j) ref = std::max(ref, norm(base[(j + 1) % 3] - base[j]));
        for (int j = 0; j < 3; ++j) {
            const Vec<3> p0{base[j][0], base[j][1], 0.0}, p1{base[(j + 1) % 3][0], base[(j + 1) % 3][1], 0.0};
            Face<3> f;
            f.shape = FaceShape::rectangle;
            f.vertices = {p0, p1, p1 + Vec<3>{0, 0, h}, p0 + Vec<3>{0, 0, h}};
            f.normal = normalized(Vec<3>{p1[1] - p0[1], p0[0] - p1[0], 0.0});
            detail::fill_rect_lattice(f, detail::scaled_count(spec.detectors, norm(p1 - p0), ref),
                                      detail::scaled_count(spec.detectors, h, ref));
            d.faces.push_back(std::move(f));
        }
        double base_edge = 0.0;
        for (int j = 0; j < 3; ++j) base_edge = std::max(base_edge, norm(base[(j + 1) % 3] - base[j]));
        const int nt = detail::scaled_count(spec.detectors, base_edge, ref);
        {
            Face<3> f;  // bottom, z = 0
            f.shape = FaceShape::triangle;
            f.vertices = {d.vertices[0], d.vertices[2], d.vertices[1]};
            f.normal = {0, 0, -1};
            detail::fill_triangle_lattice(f, nt);
            d.faces.push_back(std::move(f));
        }
        {
            Face<3> f;  // top, z = h
            f.shape = FaceShape::triangle;
            f.vertices = {d.vertices[3], d.vertices[4], d.vertices[5]};
            f.normal = {0, 0, 1};
            detail::fill_triangle_lattice(f, nt);
            d.faces.push_back(std::move(f));
        }
        detail::finish_domain(d);
        return d;
    }

    // Trirectangular pyramid with vertices O, a e1, a e2, a e3.
    const double a = spec.a;
    const Vec<3> o{0, 0, 0}, e1{a, 0, 0}, e2{0, a, 0}, e3{0, 0, a};
    d.vertices = {o, e1, e2, e3};
    const std::array<std::array<Vec<3>, 3>, 4> tris{{{{o, e2, e3}}, {{o, e3, e1}}, {{o, e1, e2}}, {{e1, e3, e2}}}};
    const std::array<Vec<3>, 4> normals{{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}, normalized(Vec<3>{1, 1, 1})}};
    const double ref = std::sqrt(2.0) * a;
    for (int j = 0; j < 4; ++j) {
        Face<3> f;
        f.shape = FaceShape::triangle;
        f.vertices = {tris[j][0], tris[j][1], tris[j][2]};
        f.normal = normals[j];
        double edge = 0.0;
        for (int k = 0; k < 3; ++k) edge = std::max(edge, norm(tris[j][(k + 1) % 3] - tris[j][k]));
        detail::fill_triangle_lattice(f, detail::scaled_count(spec.detectors, edge, ref));
        d.faces.push_back(std::move(f));
    }
    detail::finish_domain(d);
    return d;
}

template <std::size_t D>
Domain<D> build_domain(const DomainSpec& spec) {
    if constexpr (D == 2)
        return build_domain_2d(spec);
    else
        return build_domain_3d(spec);
}

/// Euclidean distance from x to the closed domain (0 inside).
template <std::size_t D>
double Domain<D>::distance_to(const Vec<D>& x) const {
    if (contains(x)) return 0.0;
    // Closest point on the boundary: check each face polygon by projection, then edges/vertices.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) best = std::min(best, norm(x - v));
    auto seg_dist = [&](const Vec<D>& p, const Vec<D>& q) {
        const Vec<D> e = q - p;
        const double t = std::clamp(dot(x - p, e) / dot(e, e), 0.0, 1.0);
        return norm(x - (p + t * e));
    };
    for (const auto& f : faces) {
        const std::size_t nv = f.vertices.size();
        for (std::size_t k = 0; k < nv; ++k) best = std::min(best, seg_dist(f.vertices[k], f.vertices[(k + 1) % nv]));
        if constexpr (D == 3) {
            const double sd = f.signed_distance(x);
            const Vec<3> p = x - sd * f.normal;
            bool inside = true;
            for (std::size_t k = 0; k < nv && inside; ++k) {
                const Vec<3> e = f.vertices[(k + 1) % nv] - f.vertices[k];
                if (dot(cross(e, p - f.vertices[k]), f.normal) < 0.0) inside = false;
            }
            if (inside) best = std::min(best, std::abs(sd));
        }
    }
    return best;
}

/// Interior angle pi/k test for every pair of adjacent faces; true when the domain is the
/// fundamental cell of a reflection group, so odd reflections tile space consistently.
template <std::size_t D>
bool generates_reflection_group(const Domain<D>& d, double tol = 1e-9) {
    auto is_pi_over_k = [&](double angle) {
        const double k = kPi / angle;
        return std::abs(k - std::round(k)) < tol * std::max(1.0, k) && std::round(k) >= 2.0;
    };
    for (std::size_t i = 0; i < d.faces.size(); ++i)
        for (std::size_t j = i + 1; j < d.faces.size(); ++j) {
            int shared = 0;
            for (const auto& u : d.faces[i].vertices)
                for (const auto& v : d.faces[j].vertices)
                    if (norm(u - v) < 1e-12 * d.diam) ++shared;
            if (shared < static_cast<int>(D) - 1) continue;
            const double c = std::clamp(dot(d.faces[i].normal, d.faces[j].normal), -1.0, 1.0);
            if (!is_pi_over_k(kPi - std::acos(c))) return false;
        }
    return true;
}

}  // namespace polymean
