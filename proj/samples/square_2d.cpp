// Circular means on the boundary of the square (-1,1)^2, then the filtered backprojection.
// Usage: sample_square_2d [output-dir]

#include <cstdio>

#include "polymean/polymean.hpp"

using namespace polymean;

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : ".";
    std::filesystem::create_directories(out);

    DomainSpec s;
    s.kind = DomainKind::square;
    s.detectors = 128;
    const auto d = build_domain_2d(s);
    const auto ph = smooth_phantom_2d();

    const auto m = forward_means(ph, d, 512, d.diam);
    const auto grid = GridSpec<2>::covering({-1, -1}, {1, 1}, 129);
    const auto img = invert_means_2d(m, d, grid);
    const auto truth = sample(grid, [&](const Vec<2>& x) { return eval(ph, x); });

    const auto e = metrics(img, truth);
    std::printf("relative Linf %.3e, L2 %.3e\n", e.linf, e.l2);
    write_image(out / "square_rec", img, {{"domain", to_json(s)}, {"phantom", to_json(ph)}});
    write_image(out / "square_truth", truth);
}
