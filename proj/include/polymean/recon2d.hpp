#pragma once

// 2D inversion from circular means: principal-value filter per detector, then backprojection
// over the truncated, replicated line families.

#include <complex>
#include <cstdlib>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "polymean/data.hpp"
#include "polymean/grid.hpp"
#include "polymean/replication.hpp"

namespace polymean {

/// Q(y_i, s_k) = d/ds PV int r m(y_i, r) / (r^2 - s^2) dr on s_k = k * ds, with ds = dr.
struct FilteredProfiles2D {
    std::size_t detectors = 0;
    std::size_t n_s = 0;
    double ds = 0.0;
    std::vector<double> values;  // detector-major

    const double* row(std::size_t det) const { return values.data() + det * n_s; }
    double s_max() const { return ds * static_cast<double>(n_s - 1); }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// FFTW may take different SIMD paths depending on the address modulo 64, which changes the
// last bits of the result; pinning the alignment keeps output independent of the allocator.
struct AlignedFree {
    void operator()(void* p) const { std::free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], AlignedFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    const std::size_t bytes = (sizeof(T) * n + 63) / 64 * 64;
    return FftwBuffer<T>(static_cast<T*>(std::aligned_alloc(64, bytes)));
}

inline std::size_t fft_size(std::size_t n) {
    std::size_t best = 1;
    while (best < n) best *= 2;
    for (std::size_t a = 1; a <= best; a *= 2)
        for (std::size_t b = a; b <= best; b *= 3)
            for (std::size_t c = b; c <= best; c *= 5)
                if (c >= n && c < best) best = c;
    return best;
}

// Samples of the band-limited kernel of d/ds PV int g(r)/(r - s) dr / 2 with spacing h:
// c_0 = -pi^2/(4h), c_l = 1/(h l^2) for odd l, 0 for even l.
inline double pv_kernel(long l, double h) {
    if (l == 0) return -kPi * kPi / (4.0 * h);
    if (l % 2 == 0) return 0.0;
    return 1.0 / (h * static_cast<double>(l) * static_cast<double>(l));
}

// Linear convolution of each odd-extended row with the kernel via one shared kernel spectrum.
class PvFilter {
public:
    PvFilter(std::size_t n_r, std::size_t n_s, double h) : n_(n_r), ns_(n_s), h_(h) {
        const std::size_t lg = 2 * n_ - 1, lc = ns_ + 2 * n_ - 2;
        N_ = fft_size(lg + lc - 1);
        auto in = fftw_buffer<double>(N_);
        auto out = fftw_buffer<fftw_complex>(N_ / 2 + 1);
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(N_), in.get(), out.get(), FFTW_ESTIMATE);
            inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(N_), out.get(), in.get(), FFTW_ESTIMATE);
        }
        std::fill(in.get(), in.get() + N_, 0.0);
        for (std::size_t q = 0; q < lc; ++q) in[q] = pv_kernel(static_cast<long>(q) - static_cast<long>(n_ - 1), h_);
        fftw_execute_dft_r2c(fwd_, in.get(), out.get());
        kernel_.resize(N_ / 2 + 1);
        for (std::size_t k = 0; k < kernel_.size(); ++k) kernel_[k] = {out[k][0], out[k][1]};
    }
    ~PvFilter() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    PvFilter(const PvFilter&) = delete;
    PvFilter& operator=(const PvFilter&) = delete;

    void apply(const double* m, double* q) const {
        auto in = fftw_buffer<double>(N_);
        auto spec = fftw_buffer<fftw_complex>(N_ / 2 + 1);
        std::fill(in.get(), in.get() + N_, 0.0);
        // G[p] = g_{p-(n-1)}, g_j = sgn(j) m_|j|
        for (std::size_t j = 1; j < n_; ++j) {
            in[n_ - 1 + j] = m[j];
            in[n_ - 1 - j] = -m[j];
        }
        fftw_execute_dft_r2c(fwd_, in.get(), spec.get());
        for (std::size_t k = 0; k < kernel_.size(); ++k) {
            const std::complex<double> v = std::complex<double>(spec[k][0], spec[k][1]) * kernel_[k];
            spec[k][0] = v.real();
            spec[k][1] = v.imag();
        }
        fftw_execute_dft_c2r(inv_, spec.get(), in.get());
        const double scale = 1.0 / static_cast<double>(N_);
        for (std::size_t k = 0; k < ns_; ++k) q[k] = in[k + 2 * n_ - 2] * scale;
    }

private:
    std::size_t n_, ns_, N_ = 0;
    double h_;
    fftw_plan fwd_ = nullptr, inv_ = nullptr;
    std::vector<std::complex<double>> kernel_;
};

}  // namespace detail

/// Same quantity as filter_2d by direct O(n * n_s) summation of the kernel.
inline std::vector<double> pv_filter_direct(const double* m, std::size_t n_r, std::size_t n_s, double h) {
    std::vector<double> q(n_s, 0.0);
    for (std::size_t k = 0; k < n_s; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < n_r; ++j) {
            const long kk = static_cast<long>(k), jj = static_cast<long>(j);
            s += m[j] * (detail::pv_kernel(kk - jj, h) - detail::pv_kernel(kk + jj, h));
        }
        q[k] = s;
    }
    return q;
}

/// Filter every detector row; s_max is rounded up to a whole number of radius steps.
inline FilteredProfiles2D filter_2d(const Dataset& m, double s_max, unsigned threads = 0) {
    detail::check_kind(m, DataKind::means, 2);
    require(m.n_r >= 5, ErrorKind::invalid_argument, "need at least 5 radii");
    require(s_max > 0.0, ErrorKind::invalid_argument, "s_max must be positive");
    FilteredProfiles2D out;
    out.detectors = m.detectors;
    out.ds = m.dr();
    out.n_s = static_cast<std::size_t>(std::ceil(s_max / out.ds)) + 3;
    out.values.assign(out.detectors * out.n_s, 0.0);
    const detail::PvFilter filter(m.n_r, out.n_s, out.ds);
    parallel_for(m.detectors, resolve_threads(static_cast<int>(threads)),
                 [&](std::size_t det) { filter.apply(m.row(det), out.values.data() + det * out.n_s); });
    return out;
}

/// Default truncation radius: every line point within diam of the domain is kept.
template <std::size_t D>
double default_truncation(const Domain<D>& d) {
    return d.circumradius + d.diam;
}

/// f(x) = (1/pi) sum over replicated detectors y with |y - c| <= r_trunc of
///        w sigma n.(x - y)/|x - y| Q(y_src, |x - y|).
inline ImageGrid<2> backproject_2d(const FilteredProfiles2D& q, const Domain<2>& d, double r_trunc,
                                   const GridSpec<2>& grid, unsigned threads = 0) {
    require(q.detectors == d.detector_count(), ErrorKind::dimension_mismatch,
            "profiles do not match the domain's detector count");
    const auto nodes = replicated_nodes(d, d.center, r_trunc);
    double reach = 0.0;
    for (const Vec<2>& corner : {grid.origin, grid.upper(), Vec<2>{grid.origin[0], grid.upper()[1]},
                                 Vec<2>{grid.upper()[0], grid.origin[1]}})
        reach = std::max(reach, norm(corner - d.center));
    require(r_trunc + reach <= q.s_max(), ErrorKind::out_of_range,
            "filtered profiles do not reach the largest detector distance");
    ImageGrid<2> img(grid);
    const std::size_t nx = grid.count[0], ny = grid.count[1];
    parallel_for(nx, resolve_threads(static_cast<int>(threads)), [&](std::size_t ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const Vec<2> x{grid.origin[0] + grid.spacing[0] * static_cast<double>(ix),
                           grid.origin[1] + grid.spacing[1] * static_cast<double>(iy)};
            double acc = 0.0;
            for (const auto& nd : nodes) {
                const double dx = x[0] - nd.position[0], dy = x[1] - nd.position[1];
                const double s = std::sqrt(dx * dx + dy * dy);
                if (s < 1e-14) continue;
                const double proj = (nd.normal[0] * dx + nd.normal[1] * dy) / s;
                acc += nd.weight * proj * lagrange4(q.row(nd.detector), q.n_s, q.ds, s);
            }
            img.values[ix * ny + iy] = acc / kPi;
        }
    });
    return img;
}

inline ImageGrid<2> invert_means_2d(const Dataset& m, const Domain<2>& d, const GridSpec<2>& grid,
                                    double r_trunc = 0.0, unsigned threads = 0) {
    if (r_trunc <= 0.0) r_trunc = default_truncation(d);
    double reach = 0.0;
    for (const Vec<2>& corner : {grid.origin, grid.upper(), Vec<2>{grid.origin[0], grid.upper()[1]},
                                 Vec<2>{grid.upper()[0], grid.origin[1]}})
        reach = std::max(reach, norm(corner - d.center));
    const auto q = filter_2d(m, r_trunc + reach, threads);
    return backproject_2d(q, d, r_trunc, grid, threads);
}

/// Wave data are first converted to circular means; the filtered backprojection is unchanged.
inline ImageGrid<2> invert_wave_2d(const Dataset& p, const Domain<2>& d, const GridSpec<2>& grid,
                                   double r_trunc = 0.0, unsigned threads = 0) {
    return invert_means_2d(wave_to_means_2d(p, threads), d, grid, r_trunc, threads);
}

}  // namespace polymean
