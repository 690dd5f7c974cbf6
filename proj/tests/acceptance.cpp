// End-to-end acceptance runs. One PASS/FAIL line per criterion, details indented below it.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "polymean/polymean.hpp"
#include "replication_props.hpp"

using namespace polymean;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Report {
    std::vector<std::string> details;
    bool ok = true;

    void check(bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        details.push_back(std::string(pass ? "ok   " : "MISS ") + buf);
        ok = ok && pass;
    }
    void note(const std::string& s) { details.push_back("     " + s); }
};

int failures = 0;

void emit(int id, const char* title, const Report& r) {
    std::printf("%s criterion %d: %s\n", r.ok ? "PASS" : "FAIL", id, title);
    for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!r.ok) ++failures;
}

template <std::size_t D>
std::vector<char> interior(const Domain<D>& d, const GridSpec<D>& g) {
    std::vector<char> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = d.contains(g.point(i), -1e-12);
    return m;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += (a[i] - b[i]) * (a[i] - b[i]);
        r += b[i] * b[i];
    }
    return std::sqrt(e / r);
}

DomainSpec spec(DomainKind k, int detectors) {
    DomainSpec s;
    s.kind = k;
    s.detectors = detectors;
    return s;
}

void square_2d() {
    Report r;
    const auto t0 = Clock::now();
    const auto d = build_domain_2d(spec(DomainKind::square, 256));
    const auto ph = smooth_phantom_2d();
    const auto m = forward_means(ph, d, 1024, 2.0 * std::sqrt(2.0), 1);
    const auto g = GridSpec<2>::covering({-1, -1}, {1, 1}, 129);
    const auto img = invert_means_2d(m, d, g, 3.0 * std::sqrt(2.0), 1);
    const double secs = since(t0);
    const auto truth = sample(g, [&](const Vec<2>& x) { return eval(ph, x); });
    const double e = metrics(img, truth).linf;
    const double e6 = metrics(invert_means_2d(m, d, g, 6.0, 1), truth).linf;
    const double e10 = metrics(invert_means_2d(m, d, g, 10.0, 1), truth).linf;
    r.check(e <= 2e-2, "relative Linf %.3e at R_trunc = 3 sqrt 2 (limit 2e-2)", e);
    r.check(e <= 1.5 * e6, "Linf at R_trunc = 6 is %.3e; ratio %.2f (limit 1.5)", e6, e / e6);
    r.note("Linf at R_trunc = 10 is " + std::to_string(e10) + "; the error is dominated by truncation");
    r.check(secs <= 120.0, "forward + inversion %.1f s on 1 thread (limit 120 s)", secs);
    emit(1, "2D square, 256 detectors/side, 1024 radii, 129^2 grid", r);
}

struct Run3D {
    double linf = 0.0, secs = 0.0;
};

Run3D cube_run(int n, unsigned threads) {
    const auto d = build_domain_3d(spec(DomainKind::cube, n));
    const auto ph = smooth_phantom_3d();
    const auto t0 = Clock::now();
    const auto M = forward_means(ph, d, 257, 2.0 * std::sqrt(3.0), threads);
    const auto g = GridSpec<3>::covering({-1, -1, -1}, {1, 1, 1}, static_cast<std::size_t>(n));
    const auto img = invert_means_3d(M, d, g, 0.0, threads);
    const double secs = since(t0);
    return {metrics(img, sample(g, [&](const Vec<3>& x) { return eval(ph, x); })).linf, secs};
}

void cube_3d() {
    Report r;
    const unsigned threads = 8;
    const auto fine = cube_run(65, threads), coarse = cube_run(33, threads);
    r.check(fine.linf <= 5e-2, "relative Linf %.3e at 65^3 (limit 5e-2)", fine.linf);
    r.check(coarse.linf >= 1.5 * fine.linf, "33^3 Linf %.3e; reduction %.1fx (need 1.5x)", coarse.linf,
            coarse.linf / fine.linf);
    r.check(fine.secs <= 600.0, "65^3 forward + inversion %.1f s with %u threads on %u core(s) (limit 600 s)",
            fine.secs, threads, std::max(1u, std::thread::hardware_concurrency()));
    emit(2, "3D cube, 65^2 detectors/face, 257 radii, 65^3 grid", r);
}

// Reconstruction of the exterior ball alone equals the difference with and without it (the
// pipeline is linear), evaluated at grid points strictly inside the cube.
double exterior_effect(int n, double& reference) {
    const auto d = build_domain_3d(spec(DomainKind::cube, n));
    const auto g = GridSpec<3>::covering({-1, -1, -1}, {1, 1, 1}, static_cast<std::size_t>(n));
    const auto M = forward_means(Phantom<3>{{exterior_ball()}}, d, 257, 2.0 * std::sqrt(3.0), 8);
    const auto img = invert_means_3d(M, d, g, 0.0, 8);
    const auto ph = smooth_phantom_3d();
    double worst = 0.0;
    reference = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        reference = std::max(reference, std::abs(eval(ph, x)));
        if (d.contains(x, -1e-12)) worst = std::max(worst, std::abs(img.values[i]));
    }
    return worst;
}

void exterior() {
    Report r;
    double ref65 = 0.0, ref33 = 0.0;
    const double e65 = exterior_effect(65, ref65), e33 = exterior_effect(33, ref33);
    const double rel65 = e65 / ref65, rel33 = e33 / ref33;
    r.check(rel65 <= 0.10, "max |difference| inside the cube %.4f, relative %.2f%% at 65^3 (limit 10%%)", e65,
            100.0 * rel65);
    r.check(rel65 < rel33, "relative %.2f%% at 33^3, %.2f%% at 65^3", 100.0 * rel33, 100.0 * rel65);
    emit(3, "exterior ball r = 0.08 at (1.1, 0, 0) does not affect the interior", r);
}

void equivalence() {
    Report r;
    {
        const auto d = build_domain_2d(spec(DomainKind::square, 128));
        const auto m = forward_means(smooth_phantom_2d(), d, 512, d.diam, 1);
        const auto g = GridSpec<2>::covering({-1, -1}, {1, 1}, 65);
        const auto a = invert_means_2d(m, d, g, 0.0, 1);
        const auto b = invert_wave_2d(means_to_wave_2d(m, 1), d, g, 0.0, 1);
        const double e = metrics(b, a).max_abs;
        r.check(e <= 1e-3, "2D square: Linf difference %.3e (limit 1e-3)", e);
    }
    {
        const auto d = build_domain_3d(spec(DomainKind::cube, 33));
        const auto M = forward_means(smooth_phantom_3d(), d, 257, d.diam, 8);
        const auto g = GridSpec<3>::covering({-1, -1, -1}, {1, 1, 1}, 33);
        const auto a = invert_means_3d(M, d, g, 0.0, 8);
        const auto b = invert_wave_3d(means_to_wave_3d(M, 8), d, g, 0.0, 8);
        const double e = metrics(b, a).max_abs;
        r.check(e <= 1e-3, "3D cube: Linf difference %.3e (limit 1e-3)", e);
    }
    emit(4, "wave-data inversion equals means inversion", r);
}

double circle_brute(const Phantom<2>& ph, const Vec<2>& y, double rad, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * kPi * (k + 0.5) / n;
        s += eval(ph, Vec<2>{y[0] + rad * std::cos(t), y[1] + rad * std::sin(t)});
    }
    return s / n;
}

void oracles() {
    Report r;
    {
        // (a) disk means against a 10^6-angle brute force, ball means against Monte Carlo
        const Phantom<2> disk{{{{0.6, 0.0}, 0.3, 1.0, Profile::indicator}}};
        const Phantom<2> smooth = smooth_phantom_2d();
        double worst = 0.0;
        worst = std::max(worst, std::abs(circular_mean(disk, {0, 0}, 0.6) - circle_brute(disk, {0, 0}, 0.6, 1000000)));
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0), ur(0.0, 2.8);
        for (int k = 0; k < 20; ++k) {
            const Vec<2> y{u(rng), u(rng)};
            const double rad = ur(rng);
            worst = std::max(worst, std::abs(circular_mean(smooth, y, rad) - circle_brute(smooth, y, rad, 1000000)));
            // a jump costs at most half a sample per crossing, so indicators get more angles
            worst = std::max(worst, std::abs(circular_mean(disk, y, rad) - circle_brute(disk, y, rad, 4000000)));
        }
        r.check(worst <= 1e-6, "(a) circular means vs angular brute force: max deviation %.2e (limit 1e-6)", worst);

        const double d = 1.0, R = 0.5, rad = 1.2;
        const Phantom<3> ball{{{{d, 0.0, 0.0}, R, 1.0, Profile::indicator}}};
        const double exact = spherical_mean(ball, {0, 0, 0}, rad);
        std::normal_distribution<double> gauss;
        const std::size_t N = 10000000;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < N; ++i) {
            Vec<3> w{gauss(rng), gauss(rng), gauss(rng)};
            w = (rad / norm(w)) * w;
            hits += norm(w - Vec<3>{d, 0.0, 0.0}) < R;
        }
        const double p = static_cast<double>(hits) / N, sigma = std::sqrt(exact * (1 - exact) / N);
        r.check(std::abs(p - exact) <= 3.0 * sigma, "(a) ball cap fraction %.6f vs Monte Carlo %.6f, %.2f sigma", exact,
                p, std::abs(p - exact) / sigma);
    }
    {
        // (b) conversion round trips
        const auto sq = build_domain_2d(spec(DomainKind::square, 16));
        const auto m = forward_means(smooth_phantom_2d(), sq, 512, sq.diam, 1);
        const double abel = rel_l2(wave_to_means_2d(means_to_wave_2d(m)).values, m.values);
        const auto cu = build_domain_3d(spec(DomainKind::cube, 8));
        const auto M = forward_means(smooth_phantom_3d(), cu, 512, cu.diam, 1);
        const double kirch = rel_l2(wave_to_means_3d(means_to_wave_3d(M)).values, M.values);
        r.check(abel <= 1e-3, "(b) Abel round trip relative L2 %.2e (limit 1e-3)", abel);
        r.check(kirch <= 1e-3, "(b) Kirchhoff round trip relative L2 %.2e (limit 1e-3)", kirch);
    }
    {
        // (c) FFT principal-value filter vs the direct O(n^2) sum
        const auto d = build_domain_2d(spec(DomainKind::square, 32));
        const auto m = forward_means(smooth_phantom_2d(), d, 1024, d.diam, 1);
        const auto q = filter_2d(m, default_truncation(d) + d.circumradius, 1);
        double worst = 0.0;
        for (std::size_t det = 0; det < m.detectors; det += 9) {
            const auto direct = pv_filter_direct(m.row(det), m.n_r, q.n_s, m.dr());
            worst = std::max(worst, rel_l2(std::vector<double>(q.row(det), q.row(det) + q.n_s), direct));
        }
        r.check(worst <= 1e-6, "(c) PV filter vs direct sum: relative L2 %.2e (limit 1e-6)", worst);
    }
    {
        // (d) divergence stencil convergence on an analytic field
        std::vector<double> errs;
        for (std::size_t n : {33u, 65u, 129u}) {
            const auto g = GridSpec<3>::covering({-1, -1, -1}, {1, 1, 1}, n);
            VectorField V(g);
            double err = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto x = g.point(i);
                V.comp[0][i] = std::sin(2 * x[0]) * x[1];
                V.comp[1][i] = std::cos(x[1]) * x[2];
                V.comp[2][i] = std::exp(x[2]) * x[0];
            }
            const auto div = divergence(V, 1);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto x = g.point(i);
                const double want = 2 * std::cos(2 * x[0]) * x[1] - std::sin(x[1]) * x[2] + std::exp(x[2]) * x[0];
                err = std::max(err, std::abs(div.values[i] - want));
            }
            errs.push_back(err);
        }
        const double order = std::log2(errs[1] / errs[2]);
        r.check(order >= 3.75,
                "(d) divergence max errors %.2e, %.2e, %.2e at 33^3, 65^3, 129^3; order %.2f (formal 4, need 3.75)",
                errs[0], errs[1], errs[2], order);
    }
    emit(5, "oracle suites", r);
}

void replication() {
    Report r;
    for (const auto& s : props::all_domains()) {
        const auto c = dimension_of(s.kind) == 2 ? props::check(build_domain_2d(s), 10000, 1234)
                                                  : props::check(build_domain_3d(s), 10000, 1234);
        const bool pass = c.odd_fail == 0 && c.path_fail == 0 && c.closed_fail == 0;
        r.check(pass, "%-36s %s", props::label(s).c_str(), props::describe(c).c_str());
    }
    emit(6, "replication algebra on 10^4 random points per domain", r);
}

void triangles() {
    Report r;
    for (auto k : {DomainKind::tri_right_isosceles, DomainKind::tri_equilateral, DomainKind::tri_30_60_90}) {
        const auto d = build_domain_2d(spec(k, 256));
        const auto ph = smooth_phantom_triangle(d.vertices[0], d.vertices[1], d.vertices[2]);
        const auto t0 = Clock::now();
        const auto m = forward_means(ph, d, 1024, d.diam, 1);
        Vec<2> lo = d.vertices[0], hi = d.vertices[0];
        for (const auto& v : d.vertices)
            for (std::size_t a = 0; a < 2; ++a) {
                lo[a] = std::min(lo[a], v[a]);
                hi[a] = std::max(hi[a], v[a]);
            }
        const auto g = GridSpec<2>::covering(lo, hi, 129);
        const auto img = invert_means_2d(m, d, g, 0.0, 1);
        const double secs = since(t0);
        const auto e = metrics(img, sample(g, [&](const Vec<2>& x) { return eval(ph, x); }), interior(d, g));
        if (k == DomainKind::tri_right_isosceles)
            r.check(e.linf <= 5e-2, "%-20s relative Linf %.3e (limit 5e-2), %.1f s", std::string(to_string(k)).c_str(),
                    e.linf, secs);
        else
            r.check(e.l2 <= 1e-1, "%-20s relative L2 %.3e (limit 1e-1), Linf %.3e, %.1f s",
                    std::string(to_string(k)).c_str(), e.l2, e.linf, secs);
        const auto c = props::check(d, 10000, 99);
        r.check(c.odd_fail == 0 && c.path_fail == 0, "%-20s %s", std::string(to_string(k)).c_str(),
                props::describe(c).c_str());
    }
    emit(7, "triangle domains, 129^2 grid", r);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    square_2d();
    cube_3d();
    exterior();
    equivalence();
    oracles();
    replication();
    triangles();
    std::printf("%d of 7 criteria failed; total %.0f s\n", failures, since(t0));
    return failures == 0 ? 0 : 1;
}
