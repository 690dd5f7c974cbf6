// Command line front end: phantom, forward, convert, invert, compare, study.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "polymean/polymean.hpp"

using namespace polymean;
namespace fs = std::filesystem;

namespace {

enum Exit : int {
    ok = 0,
    failure = 1,
    usage = 2,
    malformed_manifest = 3,
    dimension_mismatch = 4,
    missing_file = 5,
    geometry_error = 6,
    out_of_range = 7,
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::malformed_manifest: return malformed_manifest;
        case ErrorKind::dimension_mismatch: return dimension_mismatch;
        case ErrorKind::io: return missing_file;
        case ErrorKind::geometry: return geometry_error;
        case ErrorKind::out_of_range: return out_of_range;
        default: return failure;
    }
}

struct DomainArgs {
    std::string domain = "square";
    std::vector<double> size;
    double height = 1.0;
    std::string base = "tri_equilateral";
    int detectors = 64;
};

void add_domain_options(CLI::App* app, DomainArgs& a) {
    app->add_option("--domain", a.domain, "domain kind or JSON file with a domain object");
    app->add_option("--size", a.size, "half-widths (boxes) or edge length (triangles, prism, pyramid)");
    app->add_option("--height", a.height, "prism height");
    app->add_option("--base", a.base, "prism base triangle kind");
    app->add_option("--detectors", a.detectors, "detectors along the longest face edge");
}

DomainSpec domain_spec(const DomainArgs& a) {
    if (fs::exists(a.domain)) return domain_from_json(detail::parse_json(read_text(a.domain), a.domain));
    DomainSpec s;
    s.kind = domain_kind_from_string(a.domain);
    s.detectors = a.detectors;
    s.base = domain_kind_from_string(a.base);
    s.height = a.height;
    if (!a.size.empty()) {
        const bool box = s.kind == DomainKind::square || s.kind == DomainKind::rectangle ||
                         s.kind == DomainKind::cube || s.kind == DomainKind::cuboid;
        if (box)
            s.half_widths = a.size;
        else
            s.a = a.size.front();
    }
    return s;
}

template <std::size_t D>
Phantom<D> make_phantom(const std::string& name, const Domain<D>& d) {
    if (fs::exists(name)) return phantom_from_json<D>(detail::parse_json(read_text(name), name));
    if constexpr (D == 2) {
        if (name == "smooth") {
            if (is_triangle(d.spec.kind))
                return smooth_phantom_triangle(d.vertices[0], d.vertices[1], d.vertices[2]);
            const Vec<2> h = d.box_half_widths();
            Phantom<2> ph = smooth_phantom_2d();
            for (auto& c : ph.components) {
                const double s = std::min(h[0], h[1]);
                c.center = {c.center[0] * h[0], c.center[1] * h[1]};
                c.radius *= s;
            }
            return ph;
        }
    } else {
        if (name == "smooth" && d.is_box()) return smooth_phantom_3d();
        if (name == "smooth") {
            Vec<3> c{};
            for (const auto& v : d.vertices) c = c + v;
            c = (1.0 / static_cast<double>(d.vertices.size())) * c;
            double inr = std::numeric_limits<double>::infinity();
            for (const auto& f : d.faces) inr = std::min(inr, -f.signed_distance(c));
            return Phantom<3>{{{c, 0.8 * inr, 1.0, Profile::smooth_bump}}};
        }
        if (name == "balls") return ball_grid_phantom();
        if (name == "exterior") {
            Phantom<3> ph = smooth_phantom_3d();
            ph.components.push_back(exterior_ball());
            return ph;
        }
    }
    throw Error(ErrorKind::invalid_argument, "unknown phantom '" + name + "' (smooth, balls, exterior or a JSON file)");
}

template <std::size_t D>
GridSpec<D> domain_grid(const Domain<D>& d, std::size_t n) {
    Vec<D> lo = d.vertices[0], hi = d.vertices[0];
    for (const auto& v : d.vertices)
        for (std::size_t a = 0; a < D; ++a) {
            lo[a] = std::min(lo[a], v[a]);
            hi[a] = std::max(hi[a], v[a]);
        }
    return GridSpec<D>::covering(lo, hi, n);
}

std::size_t pick_samples(std::size_t nr, std::size_t nt, std::size_t fallback) {
    require(!(nr && nt && nr != nt), ErrorKind::invalid_argument, "--nr and --nt disagree");
    return nr ? nr : (nt ? nt : fallback);
}

Json file_provenance(const fs::path& manifest) {
    Json p{{"manifest", manifest.string()}, {"manifest_sha256", sha256_file(manifest)}};
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <std::size_t D>
int run_phantom(const DomainSpec& spec, const std::string& phantom, std::size_t n, const fs::path& out) {
    const auto d = build_domain<D>(spec);
    const auto ph = make_phantom<D>(phantom, d);
    const auto grid = domain_grid(d, n ? n : (D == 2 ? 129 : 65));
    const auto img = sample(grid, [&](const Vec<D>& x) { return eval(ph, x); });
    const Json ph_json = to_json(ph);
    write_text(out.string() + "_phantom.json", ph_json.dump(2) + "\n");
    write_image(out, img, {{"command", "phantom"}, {"domain", to_json(spec)}, {"phantom", ph_json}});
    std::printf("%s\n", (out.string() + ".json").c_str());
    return ok;
}

template <std::size_t D>
int run_forward(const DomainSpec& spec, const std::string& phantom, std::size_t samples, double r_max,
                const std::string& kind, unsigned threads, const fs::path& out) {
    const auto d = build_domain<D>(spec);
    const auto ph = make_phantom<D>(phantom, d);
    DatasetFile f;
    f.data = forward_means(ph, d, samples ? samples : (D == 2 ? 1024 : 257), r_max, threads);
    if (kind == "wave") {
        f.data = D == 2 ? means_to_wave_2d(f.data, threads) : means_to_wave_3d(f.data, threads);
    } else {
        require(kind == "means", ErrorKind::invalid_argument, "--kind must be means or wave");
    }
    f.meta = {{"command", "forward"}, {"phantom", to_json(ph)}};
    std::printf("%s\n", write_dataset(out, f).c_str());
    return ok;
}

int run_convert(const fs::path& in, unsigned threads, const fs::path& out) {
    DatasetFile f = read_dataset(in);
    const bool two = f.data.dimension() == 2;
    if (f.data.kind == DataKind::means)
        f.data = two ? means_to_wave_2d(f.data, threads) : means_to_wave_3d(f.data, threads);
    else
        f.data = two ? wave_to_means_2d(f.data, threads) : wave_to_means_3d(f.data, threads);
    f.meta["converted_from"] = file_provenance(in);
    std::printf("%s\n", write_dataset(out, f).c_str());
    return ok;
}

int run_invert(const fs::path& in, std::size_t n, double r_trunc, double T, unsigned threads, const fs::path& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const DatasetFile f = read_dataset(in);
    Json params{{"command", "invert"},
                {"input", file_provenance(in)},
                {"domain", to_json(f.data.domain)},
                {"kind", std::string(to_string(f.data.kind))},
                {"radii", {{"count", f.data.n_r}, {"max", f.data.r_max}}}};
    if (f.meta.contains("phantom")) params["phantom"] = f.meta["phantom"];
    if (f.data.dimension() == 2) {
        const auto d = build_domain_2d(f.data.domain);
        const auto grid = domain_grid(d, n ? n : 129);
        if (r_trunc <= 0.0) r_trunc = default_truncation(d);
        const auto img = f.data.kind == DataKind::means ? invert_means_2d(f.data, d, grid, r_trunc, threads)
                                                        : invert_wave_2d(f.data, d, grid, r_trunc, threads);
        params["rtrunc"] = r_trunc;
        params["seconds"] = seconds_since(t0);
        std::printf("%s\n", write_image(out, img, params).c_str());
    } else {
        const auto d = build_domain_3d(f.data.domain);
        const auto grid = domain_grid(d, n ? n : 65);
        if (T <= 0.0) T = std::min(d.diam, f.data.r_max);
        const auto img = f.data.kind == DataKind::means ? invert_means_3d(f.data, d, grid, T, threads)
                                                        : invert_wave_3d(f.data, d, grid, T, threads);
        params["T"] = T;
        params["seconds"] = seconds_since(t0);
        std::printf("%s\n", write_image(out, img, params).c_str());
    }
    return ok;
}

int run_compare(const fs::path& a, const fs::path& b) {
    const auto A = read_image(a), B = read_image(b);
    require(A.dimension == B.dimension, ErrorKind::dimension_mismatch, "images differ in dimension");
    const bool same = A.dimension == 2 ? A.image2.spec.same_shape(B.image2.spec) : A.image3.spec.same_shape(B.image3.spec);
    require(same, ErrorKind::dimension_mismatch, "images differ in shape");
    const Metrics m = metrics(A.values(), B.values());
    Json loc = A.dimension == 2 ? Json(A.image2.spec.point(m.argmax)) : Json(A.image3.spec.point(m.argmax));
    const Json j{{"linf", m.linf}, {"l2", m.l2}, {"relative", m.relative}, {"max_abs", m.max_abs},
                 {"argmax", m.argmax}, {"location", loc}};
    std::printf("%s\n", j.dump(2).c_str());
    return ok;
}

template <std::size_t D>
std::vector<char> inside_mask(const Domain<D>& d, const GridSpec<D>& g) {
    std::vector<char> mask(g.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = d.contains(g.point(i), 1e-12);
    return mask;
}

int run_study(const std::string& which, DomainArgs da, const std::string& phantom, std::size_t samples,
              std::size_t n, std::vector<double> rtrunc, std::vector<int> detectors, unsigned threads,
              const fs::path& out) {
    std::ostringstream csv;
    csv.precision(10);
    const DomainSpec base = domain_spec(da);
    if (which == "truncation") {
        require(dimension_of(base.kind) == 2, ErrorKind::dimension_mismatch, "truncation studies are 2D");
        const auto d = build_domain_2d(base);
        const auto ph = make_phantom<2>(phantom, d);
        const auto m = forward_means(ph, d, samples ? samples : 1024, d.diam, threads);
        const auto grid = domain_grid(d, n ? n : 129);
        const auto truth = sample(grid, [&](const Vec<2>& x) { return eval(ph, x); });
        const auto mask = inside_mask(d, grid);
        if (rtrunc.empty()) {
            const double r0 = default_truncation(d);
            rtrunc = {d.diam + d.circumradius * 0.5, r0, 1.25 * r0, 1.5 * r0, 2.0 * r0};
        }
        csv << "rtrunc,linf,l2,seconds\n";
        for (double r : rtrunc) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto img = invert_means_2d(m, d, grid, r, threads);
            const auto e = metrics(img.values, truth.values, mask);
            csv << r << "," << e.linf << "," << e.l2 << "," << seconds_since(t0) << "\n";
        }
    } else if (which == "convergence") {
        if (detectors.empty()) detectors = dimension_of(base.kind) == 2 ? std::vector<int>{32, 64, 128, 256}
                                                                        : std::vector<int>{9, 17, 33};
        csv << "detectors,grid,samples,linf,l2,seconds\n";
        for (int nd : detectors) {
            DomainSpec s = base;
            s.detectors = nd;
            const auto t0 = std::chrono::steady_clock::now();
            Metrics e;
            std::size_t ns = 0, ng = n ? n : static_cast<std::size_t>(nd / 2 * 2 + 1);
            if (dimension_of(s.kind) == 2) {
                const auto d = build_domain_2d(s);
                const auto ph = make_phantom<2>(phantom, d);
                ns = samples ? samples : static_cast<std::size_t>(4 * nd);
                const auto grid = domain_grid(d, ng);
                const auto img = invert_means_2d(forward_means(ph, d, ns, d.diam, threads), d, grid, 0.0, threads);
                e = metrics(img.values, sample(grid, [&](const Vec<2>& x) { return eval(ph, x); }).values,
                            inside_mask(d, grid));
            } else {
                const auto d = build_domain_3d(s);
                const auto ph = make_phantom<3>(phantom, d);
                ns = samples ? samples : static_cast<std::size_t>(4 * nd);
                const auto grid = domain_grid(d, ng);
                const auto img = invert_means_3d(forward_means(ph, d, ns, d.diam, threads), d, grid, 0.0, threads);
                e = metrics(img.values, sample(grid, [&](const Vec<3>& x) { return eval(ph, x); }).values,
                            inside_mask(d, grid));
            }
            csv << nd << "," << ng << "," << ns << "," << e.linf << "," << e.l2 << "," << seconds_since(t0) << "\n";
        }
    } else {
        throw Error(ErrorKind::invalid_argument, "study must be 'truncation' or 'convergence'");
    }
    if (out.empty())
        std::cout << csv.str();
    else
        write_text(out, csv.str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inversion of circular and spherical means with centers on polygon / polyhedron boundaries"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: POLYMEAN_THREADS, else all cores)");

    DomainArgs da;
    std::string phantom = "smooth", kind = "means", study_kind;
    std::size_t nr = 0, nt = 0, grid = 0;
    double r_max = 0.0, r_trunc = 0.0, T = 0.0;
    std::string out, in, cmp_a, cmp_b;
    std::vector<double> rtrunc_list;
    std::vector<int> detector_list;

    auto* ph = app.add_subcommand("phantom", "write a phantom spec and its ground-truth grid");
    add_domain_options(ph, da);
    ph->add_option("--phantom", phantom, "smooth, balls, exterior or a JSON file");
    ph->add_option("--grid", grid, "grid points per axis");
    ph->add_option("--out", out, "output stem")->required();

    auto* fw = app.add_subcommand("forward", "simulate a means or wave dataset");
    add_domain_options(fw, da);
    fw->add_option("--phantom", phantom, "smooth, balls, exterior or a JSON file");
    fw->add_option("--nr", nr, "radius samples");
    fw->add_option("--nt", nt, "time samples (same grid as --nr)");
    fw->add_option("--rmax", r_max, "largest radius (default: domain diameter)");
    fw->add_option("--kind", kind, "means or wave");
    fw->add_option("--out", out, "output stem")->required();

    auto* cv = app.add_subcommand("convert", "convert means to wave data or back");
    cv->add_option("--in", in, "dataset manifest")->required();
    cv->add_option("--out", out, "output stem")->required();

    auto* iv = app.add_subcommand("invert", "reconstruct an image from a dataset");
    iv->add_option("--in", in, "dataset manifest")->required();
    iv->add_option("--grid", grid, "grid points per axis over the domain's bounding box");
    iv->add_option("--rtrunc", r_trunc, "2D truncation radius (default: circumradius + diameter)");
    iv->add_option("--T", T, "3D integration radius (default: min of diameter and largest radius)");
    iv->add_option("--out", out, "output stem")->required();

    auto* cp = app.add_subcommand("compare", "error metrics of image A against reference B");
    cp->add_option("a", cmp_a, "image manifest")->required();
    cp->add_option("b", cmp_b, "reference image manifest")->required();

    auto* st = app.add_subcommand("study", "truncation or convergence sweep, CSV output");
    st->add_option("which", study_kind, "truncation or convergence")->required();
    add_domain_options(st, da);
    st->add_option("--phantom", phantom, "smooth, balls, exterior or a JSON file");
    st->add_option("--nr", nr, "radius samples");
    st->add_option("--nt", nt, "time samples");
    st->add_option("--grid", grid, "grid points per axis");
    st->add_option("--rtrunc", rtrunc_list, "truncation radii to sweep");
    st->add_option("--detector-list", detector_list, "detector counts to sweep");
    st->add_option("--out", out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    const unsigned nthreads = resolve_threads(threads);
    try {
        if (*ph) {
            const auto spec = domain_spec(da);
            return dimension_of(spec.kind) == 2 ? run_phantom<2>(spec, phantom, grid, out)
                                                : run_phantom<3>(spec, phantom, grid, out);
        }
        if (*fw) {
            const auto spec = domain_spec(da);
            const std::size_t s = pick_samples(nr, nt, 0);
            return dimension_of(spec.kind) == 2 ? run_forward<2>(spec, phantom, s, r_max, kind, nthreads, out)
                                                : run_forward<3>(spec, phantom, s, r_max, kind, nthreads, out);
        }
        if (*cv) return run_convert(in, nthreads, out);
        if (*iv) return run_invert(in, grid, r_trunc, T, nthreads, out);
        if (*cp) return run_compare(cmp_a, cmp_b);
        if (*st)
            return run_study(study_kind, da, phantom, pick_samples(nr, nt, 0), grid, rtrunc_list, detector_list,
                             nthreads, out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return failure;
    }
    return usage;
}
