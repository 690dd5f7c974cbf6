#pragma once

// Uniform Cartesian image grids and comparison metrics.

#include <vector>

#include "polymean/core.hpp"

namespace polymean {

/// Axis-aligned lattice origin + i * spacing, i in [0, count). The first axis varies slowest.
template <std::size_t D>
struct GridSpec {
    Vec<D> origin{};
    Vec<D> spacing{};
    std::array<std::size_t, D> count{};

    std::size_t size() const {
        std::size_t n = 1;
        for (auto c : count) n *= c;
        return n;
    }

    std::array<std::size_t, D> unflatten(std::size_t flat) const {
        std::array<std::size_t, D> idx{};
        for (std::size_t a = D; a-- > 0;) {
            idx[a] = flat % count[a];
            flat /= count[a];
        }
        return idx;
    }

    Vec<D> point(std::size_t flat) const {
        const auto idx = unflatten(flat);
        Vec<D> x{};
        for (std::size_t a = 0; a < D; ++a) x[a] = origin[a] + spacing[a] * static_cast<double>(idx[a]);
        return x;
    }

    Vec<D> upper() const {
        Vec<D> x{};
        for (std::size_t a = 0; a < D; ++a) x[a] = origin[a] + spacing[a] * static_cast<double>(count[a] - 1);
        return x;
    }

    /// n points per axis spanning [lo, hi] inclusive.
    static GridSpec covering(const Vec<D>& lo, const Vec<D>& hi, std::size_t n) {
        require(n >= 2, ErrorKind::invalid_argument, "grid needs at least 2 points per axis");
        GridSpec g;
        for (std::size_t a = 0; a < D; ++a) {
            g.origin[a] = lo[a];
            g.spacing[a] = (hi[a] - lo[a]) / static_cast<double>(n - 1);
            g.count[a] = n;
        }
        return g;
    }

    bool same_shape(const GridSpec& o) const { return count == o.count; }
};

template <std::size_t D>
struct ImageGrid {
    GridSpec<D> spec;
    std::vector<double> values;

    ImageGrid() = default;
    explicit ImageGrid(const GridSpec<D>& s) : spec(s), values(s.size(), 0.0) {}
};

template <std::size_t D, class Fn>
ImageGrid<D> sample(const GridSpec<D>& g, Fn&& f) {
    ImageGrid<D> img(g);
    for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = f(g.point(i));
    return img;
}

struct Metrics {
    double linf = 0.0;  // relative to max |B| unless `relative` is false
    double l2 = 0.0;
    double max_abs = 0.0;
    std::size_t argmax = 0;  // flat index of the largest |A - B|
    std::size_t compared = 0;
    bool relative = true;
};

/// Errors of A against reference B over points where mask is nonzero (all points if empty).
/// An all-zero reference falls back to absolute norms.
inline Metrics metrics(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<char>& mask = {}) {
    require(a.size() == b.size(), ErrorKind::dimension_mismatch, "grids differ in size");
    require(mask.empty() || mask.size() == a.size(), ErrorKind::dimension_mismatch, "mask size mismatch");
    Metrics m;
    double ref_inf = 0.0, ref_l2 = 0.0, err_l2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        const double e = std::abs(a[i] - b[i]);
        if (e > m.max_abs) {
            m.max_abs = e;
            m.argmax = i;
        }
        err_l2 += e * e;
        ref_inf = std::max(ref_inf, std::abs(b[i]));
        ref_l2 += b[i] * b[i];
        ++m.compared;
    }
    if (ref_inf == 0.0) {
        m.relative = false;
        m.linf = m.max_abs;
        m.l2 = std::sqrt(err_l2);
    } else {
        m.linf = m.max_abs / ref_inf;
        m.l2 = std::sqrt(err_l2 / ref_l2);
    }
    return m;
}

template <std::size_t D>
Metrics metrics(const ImageGrid<D>& a, const ImageGrid<D>& b, const std::vector<char>& mask = {}) {
    require(a.spec.same_shape(b.spec), ErrorKind::dimension_mismatch, "grids differ in shape");
    return metrics(a.values, b.values, mask);
}

/// Cubic Lagrange interpolation of samples f[0..n) spaced h at t >= 0 using the 4 nearest
/// samples. Beyond the last sample the value is 0 (profiles are compactly supported).
inline double lagrange4(const double* f, std::size_t n, double h, double t) {
    const double u = t / h;
    if (u >= static_cast<double>(n - 1)) return u == static_cast<double>(n - 1) ? f[n - 1] : 0.0;
    long i = static_cast<long>(u) - 1;
    i = std::clamp<long>(i, 0, static_cast<long>(n) - 4);
    const double x = u - static_cast<double>(i);  // position relative to f[i], in [0, 3]
    const double x0 = x, x1 = x - 1.0, x2 = x - 2.0, x3 = x - 3.0;
    return -f[i] * x1 * x2 * x3 / 6.0 + f[i + 1] * x0 * x2 * x3 / 2.0 - f[i + 2] * x0 * x1 * x3 / 2.0 +
           f[i + 3] * x0 * x1 * x2 / 6.0;
}

}  // namespace polymean
