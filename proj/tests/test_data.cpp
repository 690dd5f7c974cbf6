#include <gtest/gtest.h>

#include "polymean/polymean.hpp"

using namespace polymean;

namespace {

// One-detector dataset with the given profile.
template <class F>
Dataset profile(DomainKind k, DataKind kind, std::size_t n, double r_max, F&& f) {
    Dataset ds;
    ds.domain.kind = k;
    ds.kind = kind;
    ds.n_r = n;
    ds.r_max = r_max;
    ds.detectors = 1;
    ds.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.values[i] = f(ds.dr() * i);
    return ds;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += (a[i] - b[i]) * (a[i] - b[i]);
        r += b[i] * b[i];
    }
    return std::sqrt(e / r);
}

Dataset smooth_means(std::size_t dim, std::size_t n) {
    DomainSpec s;
    s.detectors = 6;
    if (dim == 2) {
        const auto d = build_domain_2d(s);
        return forward_means(smooth_phantom_2d(), d, n, d.diam, 1);
    }
    s.kind = DomainKind::cube;
    const auto d = build_domain_3d(s);
    return forward_means(smooth_phantom_3d(), d, n, d.diam, 1);
}

}  // namespace

TEST(Data, DerivativeIsFourthOrder) {
    double prev = 0.0;
    for (std::size_t n : {41u, 81u, 161u}) {
        const double h = 2.0 / (n - 1);
        std::vector<double> f(n), df(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(1.3 * h * i);
        derivative_4th(f.data(), n, h, Parity::odd, df.data());
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(df[i] - 1.3 * std::cos(1.3 * h * i)));
        if (prev > 0.0) EXPECT_GT(prev / err, 12.0) << n;
        prev = err;
    }
    std::vector<double> tiny(4), out(4);
    EXPECT_THROW(derivative_4th(tiny.data(), 4, 0.1, Parity::none, out.data()), Error);
}

TEST(Data, KirchhoffExamples) {
    const auto c = means_to_wave_3d(profile(DomainKind::cube, DataKind::means, 33, 2.0, [](double) { return 0.7; }));
    for (double v : c.values) EXPECT_NEAR(v, 0.7, 1e-12);
    // M = t is not an even profile, so the parity ghosts at t = 0 do not apply there
    const auto lin = means_to_wave_3d(profile(DomainKind::cube, DataKind::means, 33, 2.0, [](double t) { return t; }));
    for (std::size_t k = 2; k < lin.n_r; ++k) EXPECT_NEAR(lin.values[k], 2.0 * lin.dr() * k, 1e-11);

    const auto pc = wave_to_means_3d(profile(DomainKind::cube, DataKind::wave, 33, 2.0, [](double) { return 0.7; }));
    for (double v : pc.values) EXPECT_NEAR(v, 0.7, 1e-12);
    const auto pt = wave_to_means_3d(profile(DomainKind::cube, DataKind::wave, 33, 2.0, [](double t) { return 2.0 * t; }));
    for (std::size_t k = 0; k < pt.n_r; ++k) EXPECT_NEAR(pt.values[k], pt.dr() * k, 1e-12);
    EXPECT_THROW(means_to_wave_3d(profile(DomainKind::cube, DataKind::means, 4, 1.0, [](double) { return 1.0; })),
                 Error);
}

TEST(Data, AbelQuadratureOracle) {
    // d/dt int_0^t r^3 / sqrt(t^2 - r^2) dr with r = t sin(theta), then a centered difference
    auto I = [](double t) {
        const int n = 4000;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double th = 0.5 * kPi * (k + 0.5) / n;
            s += std::pow(t * std::sin(th), 3);
        }
        return s * 0.5 * kPi / n;
    };
    for (double t : {0.3, 0.8, 1.5}) {
        const double h = 1e-4;
        EXPECT_NEAR((I(t + h) - I(t - h)) / (2.0 * h), 2.0 * t * t, 1e-6);
    }
}

TEST(Data, AbelExamples) {
    const auto p = means_to_wave_2d(profile(DomainKind::square, DataKind::means, 65, 2.0, [](double r) { return r * r; }));
    for (std::size_t k = 0; k < p.n_r; ++k) EXPECT_NEAR(p.values[k], 2.0 * std::pow(p.dr() * k, 2), 1e-11);

    const auto m = wave_to_means_2d(profile(DomainKind::square, DataKind::wave, 513, 2.0, [](double t) { return 2.0 * t * t; }));
    std::vector<double> want(m.n_r);
    for (std::size_t k = 0; k < m.n_r; ++k) want[k] = std::pow(m.dr() * k, 2);
    EXPECT_LT(rel_l2(m.values, want), 1e-5);

    const auto z = means_to_wave_2d(profile(DomainKind::square, DataKind::means, 16, 1.0, [](double) { return 0.0; }));
    for (double v : z.values) EXPECT_EQ(v, 0.0);
}

TEST(Data, RoundTripsOnSmoothPhantoms) {
    const auto m2 = smooth_means(2, 512);
    EXPECT_LT(rel_l2(wave_to_means_2d(means_to_wave_2d(m2)).values, m2.values), 1e-3);
    const auto m3 = smooth_means(3, 512);
    EXPECT_LT(rel_l2(wave_to_means_3d(means_to_wave_3d(m3)).values, m3.values), 1e-3);
}

TEST(Data, ConversionsAreLinear) {
    auto a = smooth_means(2, 128), b = a;
    for (std::size_t i = 0; i < b.values.size(); ++i) b.values[i] = std::cos(0.01 * i) * a.values[i];
    auto ab = a;
    for (std::size_t i = 0; i < ab.values.size(); ++i) ab.values[i] = a.values[i] + 2.0 * b.values[i];
    const auto pa = means_to_wave_2d(a), pb = means_to_wave_2d(b), pab = means_to_wave_2d(ab);
    for (std::size_t i = 0; i < pab.values.size(); ++i)
        EXPECT_NEAR(pab.values[i], pa.values[i] + 2.0 * pb.values[i], 1e-12);
}

TEST(Data, WaveVanishesAtZeroForInteriorObjects) {
    const auto p = means_to_wave_3d(smooth_means(3, 128));
    for (std::size_t det = 0; det < p.detectors; ++det) EXPECT_NEAR(p.row(det)[0], 0.0, 1e-14);
    EXPECT_EQ(tail_magnitude(smooth_means(2, 128)), 0.0);
}

TEST(Data, ConversionChecksKindAndDimension) {
    const auto m2 = smooth_means(2, 32);
    EXPECT_THROW(means_to_wave_3d(m2), Error);
    EXPECT_THROW(wave_to_means_2d(m2), Error);
    try {
        data_kind_from_string("pressure");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::malformed_manifest);
    }
}

TEST(Data, ThreadCountDoesNotChangeResults) {
    DomainSpec s;
    s.kind = DomainKind::tri_equilateral;
    s.detectors = 12;
    const auto d = build_domain_2d(s);
    const auto ph = smooth_phantom_triangle(d.vertices[0], d.vertices[1], d.vertices[2]);
    const auto a = forward_means(ph, d, 96, d.diam, 1), b = forward_means(ph, d, 96, d.diam, 4);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(means_to_wave_2d(a, 1).values, means_to_wave_2d(a, 3).values);
}
