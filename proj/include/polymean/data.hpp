#pragma once

// Boundary datasets (means m / M or wave traces P on a detector x radius grid), forward
// simulation from phantoms, and the conversions between means and wave data.

#include <string>

#include "polymean/geometry.hpp"
#include "polymean/phantom.hpp"

namespace polymean {

enum class DataKind { means, wave };

inline std::string_view to_string(DataKind k) { return k == DataKind::means ? "means" : "wave"; }

inline DataKind data_kind_from_string(std::string_view s) {
    if (s == "means") return DataKind::means;
    if (s == "wave") return DataKind::wave;
    throw Error(ErrorKind::malformed_manifest, "unknown data kind '" + std::string(s) + "'");
}

/// Values for every physical detector (faces in order, lattice row-major) at radii
/// r_k = k * r_max / (n_r - 1). Storage is detector-major: values[det * n_r + k].
struct Dataset {
    DomainSpec domain;
    DataKind kind = DataKind::means;
    std::size_t n_r = 0;
    double r_max = 0.0;
    std::size_t detectors = 0;
    std::vector<double> values;

    double dr() const { return r_max / static_cast<double>(n_r - 1); }
    double* row(std::size_t det) { return values.data() + det * n_r; }
    const double* row(std::size_t det) const { return values.data() + det * n_r; }
    std::size_t dimension() const { return dimension_of(domain.kind); }
};

template <std::size_t D>
Dataset make_dataset(const Domain<D>& d, DataKind kind, std::size_t n_r, double r_max) {
    require(n_r >= 2, ErrorKind::invalid_argument, "need at least 2 radii");
    require(r_max > 0.0, ErrorKind::invalid_argument, "r_max must be positive");
    Dataset ds;
    ds.domain = d.spec;
    ds.kind = kind;
    ds.n_r = n_r;
    ds.r_max = r_max;
    ds.detectors = d.detector_count();
    ds.values.assign(ds.detectors * n_r, 0.0);
    return ds;
}

/// Exact means of the phantom on every detector; r_max defaults to diam.
template <std::size_t D>
Dataset forward_means(const Phantom<D>& ph, const Domain<D>& d, std::size_t n_r, double r_max = 0.0,
                      unsigned threads = 0) {
    if (r_max <= 0.0) r_max = d.diam;
    Dataset ds = make_dataset(d, DataKind::means, n_r, r_max);
    const double h = ds.dr();
    parallel_for(ds.detectors, resolve_threads(static_cast<int>(threads)), [&](std::size_t det) {
        const auto [j, i] = d.locate(det);
        const Vec<D> y = d.faces[j].nodes[i];
        double* out = ds.row(det);
        for (std::size_t k = 0; k < n_r; ++k) out[k] = mean(ph, y, h * static_cast<double>(k));
    });
    return ds;
}

/// Reflection parity of a sampled function about r = 0, used to supply ghost values.
enum class Parity { even, odd, none };

/// 4th-order first derivative on a uniform grid. Ghost values at the left end come from the
/// parity; otherwise (and always at the right end) one-sided 5-point stencils are used.
inline void derivative_4th(const double* f, std::size_t n, double h, Parity parity, double* out) {
    require(n >= 5, ErrorKind::invalid_argument, "need at least 5 samples for 4th-order differences");
    const double s = parity == Parity::even ? 1.0 : -1.0;
    auto at = [&](long k) { return k >= 0 ? f[k] : s * f[-k]; };
    const double c = 1.0 / (12.0 * h);
    for (std::size_t k = 0; k < n; ++k) {
        const long kk = static_cast<long>(k);
        if (k + 2 < n && (k >= 2 || parity != Parity::none)) {
            out[k] = c * (-at(kk + 2) + 8.0 * at(kk + 1) - 8.0 * at(kk - 1) + at(kk - 2));
        } else if (k == 0) {
            out[k] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
        } else if (k == 1) {
            out[k] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
        } else if (k + 2 == n) {
            out[k] = c * (3.0 * f[k + 1] + 10.0 * f[k] - 18.0 * f[k - 1] + 6.0 * f[k - 2] - f[k - 3]);
        } else {
            out[k] = c * (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] - 16.0 * f[k - 3] + 3.0 * f[k - 4]);
        }
    }
}

namespace detail {

// W(k, j): weight of nodal value v_j in  int_0^{x_k} v(u) / sqrt(x_k^2 - u^2) du  when v is
// interpolated piecewise linearly on the uniform grid x_j = j h. Antiderivatives are exact.
struct AbelWeights {
    std::size_t n = 0;
    std::vector<double> w;  // lower triangular, row k has entries j = 0..k

    AbelWeights(std::size_t n_, double h) : n(n_), w(n_ * n_, 0.0) {
        for (std::size_t k = 1; k < n; ++k) {
            const double x = h * static_cast<double>(k);
            auto base = [&](double u) { return std::asin(std::min(1.0, u / x)); };  // int 1/sqrt
            auto first = [&](double u) { return -std::sqrt(std::max(0.0, x * x - u * u)); };  // int u/sqrt
            for (std::size_t j = 0; j < k; ++j) {
                const double u0 = h * static_cast<double>(j), u1 = u0 + h;
                const double m0 = base(u1) - base(u0), m1 = first(u1) - first(u0);
                // v = v_j (u1 - u)/h + v_{j+1} (u - u0)/h
                w[k * n + j] += (u1 * m0 - m1) / h;
                w[k * n + j + 1] += (m1 - u0 * m0) / h;
            }
        }
    }

    void apply(const double* v, double* out) const {
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            const double* wk = w.data() + k * n;
            for (std::size_t j = 0; j <= k; ++j) s += wk[j] * v[j];
            out[k] = s;
        }
    }
};

inline void check_kind(const Dataset& ds, DataKind want, std::size_t dim) {
    require(ds.kind == want, ErrorKind::invalid_argument,
            "expected " + std::string(to_string(want)) + " data, got " + std::string(to_string(ds.kind)));
    require(ds.dimension() == dim, ErrorKind::dimension_mismatch,
            "expected " + std::to_string(dim) + "D data, got " + std::to_string(ds.dimension()) + "D");
    require(ds.values.size() == ds.detectors * ds.n_r, ErrorKind::dimension_mismatch, "payload size mismatch");
}

}  // namespace detail

/// P(t) = t * int_0^t m'(r) / sqrt(t^2 - r^2) dr.
inline Dataset means_to_wave_2d(const Dataset& m, unsigned threads = 0) {
    detail::check_kind(m, DataKind::means, 2);
    Dataset p = m;
    p.kind = DataKind::wave;
    const double h = m.dr();
    const detail::AbelWeights W(m.n_r, h);
    parallel_for(m.detectors, resolve_threads(static_cast<int>(threads)), [&](std::size_t det) {
        std::vector<double> dm(m.n_r);
        derivative_4th(m.row(det), m.n_r, h, Parity::even, dm.data());
        double* out = p.row(det);
        W.apply(dm.data(), out);
        for (std::size_t k = 0; k < m.n_r; ++k) out[k] *= h * static_cast<double>(k);
    });
    return p;
}

/// m(r) = (2/pi) int_0^r P(t) / sqrt(r^2 - t^2) dt.
inline Dataset wave_to_means_2d(const Dataset& p, unsigned threads = 0) {
    detail::check_kind(p, DataKind::wave, 2);
    Dataset m = p;
    m.kind = DataKind::means;
    const detail::AbelWeights W(p.n_r, p.dr());
    parallel_for(p.detectors, resolve_threads(static_cast<int>(threads)), [&](std::size_t det) {
        double* out = m.row(det);
        W.apply(p.row(det), out);
        for (std::size_t k = 0; k < p.n_r; ++k) out[k] *= 2.0 / kPi;
        out[0] = p.row(det)[0];  // limit r -> 0 of the integral
    });
    return m;
}

/// P = d/dt (t M).
inline Dataset means_to_wave_3d(const Dataset& M, unsigned threads = 0) {
    detail::check_kind(M, DataKind::means, 3);
    require(M.n_r >= 5, ErrorKind::invalid_argument, "need at least 5 time samples");
    Dataset P = M;
    P.kind = DataKind::wave;
    const double h = M.dr();
    parallel_for(M.detectors, resolve_threads(static_cast<int>(threads)), [&](std::size_t det) {
        std::vector<double> tm(M.n_r);
        const double* in = M.row(det);
        for (std::size_t k = 0; k < M.n_r; ++k) tm[k] = h * static_cast<double>(k) * in[k];
        derivative_4th(tm.data(), M.n_r, h, Parity::odd, P.row(det));
    });
    return P;
}

/// M(t) = (1/t) int_0^t P, cumulative trapezoid; M(0) by quadratic extrapolation.
inline Dataset wave_to_means_3d(const Dataset& P, unsigned threads = 0) {
    detail::check_kind(P, DataKind::wave, 3);
    require(P.n_r >= 4, ErrorKind::invalid_argument, "need at least 4 time samples");
    Dataset M = P;
    M.kind = DataKind::means;
    const double h = P.dr();
    parallel_for(P.detectors, resolve_threads(static_cast<int>(threads)), [&](std::size_t det) {
        const double* in = P.row(det);
        double* out = M.row(det);
        double acc = 0.0;
        out[0] = 0.0;
        for (std::size_t k = 1; k < P.n_r; ++k) {
            acc += 0.5 * h * (in[k - 1] + in[k]);
            out[k] = acc / (h * static_cast<double>(k));
        }
        out[0] = 3.0 * out[1] - 3.0 * out[2] + out[3];
    });
    return M;
}

/// Largest |value| among the last `tail` radii of every row; should vanish for interior objects.
inline double tail_magnitude(const Dataset& ds, std::size_t tail = 1) {
    double worst = 0.0;
    for (std::size_t det = 0; det < ds.detectors; ++det)
        for (std::size_t k = ds.n_r - std::min(tail, ds.n_r); k < ds.n_r; ++k)
            worst = std::max(worst, std::abs(ds.row(det)[k]));
    return worst;
}

}  // namespace polymean
