#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>

#include "polymean/polymean.hpp"

using namespace polymean;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + POLYMEAN_CLI + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("polymean_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, PhantomForwardInvertCompare) {
    const auto dir = scratch("pipeline");
    ASSERT_EQ(cli("phantom --domain square --grid 17 --out " + q(dir / "truth")).code, 0);
    ASSERT_EQ(cli("forward --domain square --detectors 32 --nr 128 --out " + q(dir / "m")).code, 0);
    ASSERT_EQ(cli("invert --in " + q(dir / "m.json") + " --grid 17 --threads 1 --out " + q(dir / "rec")).code, 0);
    for (const char* f : {"truth.json", "truth.pgm", "truth_phantom.json", "m.bin", "rec.json", "rec.pgm", "rec.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;

    const CliRun c = cli("compare " + q(dir / "rec.json") + " " + q(dir / "truth.json"));
    ASSERT_EQ(c.code, 0);
    const Json m = Json::parse(c.out);
    EXPECT_LT(m["linf"].get<double>(), 0.1);

    const Json self = Json::parse(cli("compare " + q(dir / "rec.json") + " " + q(dir / "rec.json")).out);
    EXPECT_EQ(self["linf"].get<double>(), 0.0);
    EXPECT_EQ(self["l2"].get<double>(), 0.0);

    // provenance: the image manifest records the input manifest's hash and the phantom
    const Json rec = Json::parse(read_text(dir / "rec.json"));
    EXPECT_EQ(rec["params"]["input"]["manifest_sha256"], sha256_file(dir / "m.json"));
    EXPECT_TRUE(rec["params"].contains("phantom"));
    EXPECT_EQ(rec["payload_sha256"], sha256_file(dir / "rec.bin"));
}

TEST(Cli, ThreadsFlagAndEnvironmentGiveSameBytes) {
    const auto dir = scratch("threads");
    ASSERT_EQ(cli("forward --domain cube --detectors 7 --nt 49 --out " + q(dir / "M")).code, 0);
    ASSERT_EQ(cli("invert --in " + q(dir / "M.json") + " --grid 9 --threads 1 --out " + q(dir / "a")).code, 0);
    ASSERT_EQ(cli("invert --in " + q(dir / "M.json") + " --grid 9 --out " + q(dir / "b"), "POLYMEAN_THREADS=3").code, 0);
    EXPECT_EQ(read_text(dir / "a.bin"), read_text(dir / "b.bin"));
}

TEST(Cli, ZeroDatasetInvertsToZero) {
    const auto dir = scratch("zero");
    DomainSpec s;
    s.detectors = 8;
    DatasetFile f;
    f.data = make_dataset(build_domain_2d(s), DataKind::means, 64, 2.0 * std::sqrt(2.0));
    write_dataset(dir / "z", f);
    ASSERT_EQ(cli("invert --in " + q(dir / "z.json") + " --grid 9 --out " + q(dir / "img")).code, 0);
    const auto img = read_image(dir / "img.json");
    for (double v : img.values()) EXPECT_EQ(v, 0.0);
}

TEST(Cli, ConvertRoundTrip) {
    const auto dir = scratch("convert");
    ASSERT_EQ(cli("forward --domain cube --detectors 5 --nt 200 --out " + q(dir / "M")).code, 0);
    ASSERT_EQ(cli("convert --in " + q(dir / "M.json") + " --out " + q(dir / "P")).code, 0);
    ASSERT_EQ(cli("convert --in " + q(dir / "P.json") + " --out " + q(dir / "M2")).code, 0);
    const auto a = read_dataset(dir / "M.json"), p = read_dataset(dir / "P.json"), b = read_dataset(dir / "M2.json");
    EXPECT_EQ(p.data.kind, DataKind::wave);
    EXPECT_TRUE(p.meta.contains("converted_from"));
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < a.data.values.size(); ++i) {
        e += std::pow(a.data.values[i] - b.data.values[i], 2);
        r += std::pow(a.data.values[i], 2);
    }
    EXPECT_LT(std::sqrt(e / r), 1e-3);
}

TEST(Cli, TruncationStudyMatchesLibrary) {
    const auto dir = scratch("study");
    const CliRun r = cli("study truncation --domain square --detectors 48 --nr 192 --grid 17 --rtrunc 4 6 8 --out " +
                         q(dir / "t.csv"));
    ASSERT_EQ(r.code, 0);
    DomainSpec s;
    s.detectors = 48;
    const auto d = build_domain_2d(s);
    const auto m = forward_means(smooth_phantom_2d(), d, 192, d.diam, 1);
    const auto g = GridSpec<2>::covering({-1, -1}, {1, 1}, 17);
    const auto truth = sample(g, [&](const Vec<2>& x) { return eval(smooth_phantom_2d(), x); });

    std::istringstream in(read_text(dir / "t.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "rtrunc,linf,l2,seconds");
    int rows = 0;
    while (std::getline(in, line)) {
        double rt, linf, l2;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &rt, &linf, &l2), 3);
        const auto e = metrics(invert_means_2d(m, d, g, rt, 1), truth);
        EXPECT_NEAR(linf, e.linf, 1e-8 * e.linf) << rt;
        EXPECT_NEAR(l2, e.l2, 1e-8 * e.l2) << rt;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
}

TEST(Cli, DistinctExitCodes) {
    const auto dir = scratch("codes");
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("invert --bogus").code, 2);
    EXPECT_EQ(cli("invert --in " + q(dir / "missing.json") + " --out " + q(dir / "x")).code, 5);

    write_text(dir / "broken.json", "{\"format\": \"polymean-dataset\"");
    EXPECT_EQ(cli("invert --in " + q(dir / "broken.json") + " --out " + q(dir / "x")).code, 3);

    ASSERT_EQ(cli("forward --domain square --detectors 8 --nr 32 --out " + q(dir / "m")).code, 0);
    Json j = Json::parse(read_text(dir / "m.json"));
    j["radii"]["count"] = 31;
    write_text(dir / "short.json", j.dump());
    EXPECT_EQ(cli("invert --in " + q(dir / "short.json") + " --out " + q(dir / "x")).code, 4);

    EXPECT_EQ(cli("forward --domain hexagon --out " + q(dir / "h")).code, 1);
    EXPECT_EQ(cli("forward --domain square --nr 10 --nt 12 --out " + q(dir / "h")).code, 1);
    ASSERT_EQ(cli("forward --domain cube --detectors 4 --nt 16 --out " + q(dir / "M")).code, 0);
    EXPECT_EQ(cli("invert --in " + q(dir / "M.json") + " --grid 5 --T 10 --out " + q(dir / "x")).code, 7);
}
