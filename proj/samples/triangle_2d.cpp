// Reconstruction inside the three tiling triangles.
// Usage: sample_triangle_2d [output-dir]

#include <cstdio>

#include "polymean/polymean.hpp"

using namespace polymean;

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : ".";
    std::filesystem::create_directories(out);

    for (auto kind : {DomainKind::tri_right_isosceles, DomainKind::tri_equilateral, DomainKind::tri_30_60_90}) {
        DomainSpec s;
        s.kind = kind;
        s.detectors = 128;
        const auto d = build_domain_2d(s);
        const auto ph = smooth_phantom_triangle(d.vertices[0], d.vertices[1], d.vertices[2]);

        Vec<2> lo{0, 0}, hi{0, 0};
        for (const auto& v : d.vertices)
            for (std::size_t a = 0; a < 2; ++a) {
                lo[a] = std::min(lo[a], v[a]);
                hi[a] = std::max(hi[a], v[a]);
            }
        const auto grid = GridSpec<2>::covering(lo, hi, 97);
        const auto img = invert_means_2d(forward_means(ph, d, 512, d.diam), d, grid);

        std::vector<char> inside(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) inside[i] = d.contains(grid.point(i), -1e-12);
        const auto e = metrics(img, sample(grid, [&](const Vec<2>& x) { return eval(ph, x); }), inside);
        const std::string name(to_string(kind));
        std::printf("%-20s relative Linf %.3e, L2 %.3e\n", name.c_str(), e.linf, e.l2);
        write_image(out / name, img, {{"domain", to_json(s)}});
    }
}
