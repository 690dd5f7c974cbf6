#pragma once

// File formats. A dataset or image is a JSON manifest next to a raw little-endian float64
// payload; images also get a 16-bit PGM (min-max scaled, one per axis slice in 3D) and a CSV
// line profile. Manifests record payload hashes so outputs can be traced to their inputs.

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "polymean/data.hpp"
#include "polymean/grid.hpp"

namespace polymean {

using Json = nlohmann::json;

inline std::string sha256_hex(const void* data, std::size_t n) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::io, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

inline std::string sha256_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string s = ss.str();
    return sha256_hex(s.data(), s.size());
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::io, "missing file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + p.string());
    out << s;
    require(static_cast<bool>(out), ErrorKind::io, "write failed for " + p.string());
}

namespace detail {

inline std::string le_bytes(const std::vector<double>& v) {
    std::string bytes(v.size() * 8, '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(v[i]);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((u >> (8 * b)) & 0xff);
    }
    return bytes;
}

inline std::vector<double> from_le_bytes(const std::string& bytes) {
    std::vector<double> v(bytes.size() / 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
        v[i] = std::bit_cast<double>(u);
    }
    return v;
}

template <class T>
T field(const Json& j, const char* key) {
    require(j.is_object() && j.contains(key), ErrorKind::malformed_manifest, std::string("manifest lacks '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::malformed_manifest, std::string("bad '") + key + "': " + e.what());
    }
}

inline Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::malformed_manifest, what + " is not valid JSON: " + e.what());
    }
}

}  // namespace detail

/// Raw payload: count doubles, little-endian.
inline void write_payload(const std::filesystem::path& p, const std::vector<double>& v) {
    write_text(p, detail::le_bytes(v));
}

inline std::vector<double> read_payload(const std::filesystem::path& p, std::size_t expected) {
    const std::string bytes = read_text(p);
    require(bytes.size() == expected * 8, ErrorKind::dimension_mismatch,
            p.string() + " holds " + std::to_string(bytes.size() / 8) + " values, expected " + std::to_string(expected));
    return detail::from_le_bytes(bytes);
}

inline Json to_json(const DomainSpec& s) {
    Json j{{"kind", std::string(to_string(s.kind))}, {"detectors", s.detectors}};
    switch (s.kind) {
        case DomainKind::square:
        case DomainKind::rectangle:
        case DomainKind::cube:
        case DomainKind::cuboid: j["half_widths"] = s.half_widths; break;
        case DomainKind::prism:
            j["a"] = s.a;
            j["base"] = std::string(to_string(s.base));
            j["height"] = s.height;
            break;
        default: j["a"] = s.a;
    }
    return j;
}

inline DomainSpec domain_from_json(const Json& j) {
    DomainSpec s;
    try {
        s.kind = domain_kind_from_string(detail::field<std::string>(j, "kind"));
        if (j.contains("base")) s.base = domain_kind_from_string(detail::field<std::string>(j, "base"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::malformed_manifest) throw;
        throw Error(ErrorKind::malformed_manifest, e.what());
    }
    s.detectors = detail::field<int>(j, "detectors");
    if (j.contains("half_widths")) s.half_widths = detail::field<std::vector<double>>(j, "half_widths");
    if (j.contains("a")) s.a = detail::field<double>(j, "a");
    if (j.contains("height")) s.height = detail::field<double>(j, "height");
    return s;
}

template <std::size_t D>
Json to_json(const Phantom<D>& ph) {
    Json comps = Json::array();
    for (const auto& c : ph.components)
        comps.push_back({{"center", c.center},
                         {"radius", c.radius},
                         {"amplitude", c.amplitude},
                         {"profile", c.profile == Profile::indicator ? "indicator" : "smooth_bump"}});
    return Json{{"dimension", D}, {"components", comps}};
}

template <std::size_t D>
Phantom<D> phantom_from_json(const Json& j) {
    const auto dim = detail::field<std::size_t>(j, "dimension");
    require(dim == D, ErrorKind::dimension_mismatch,
            "phantom is " + std::to_string(dim) + "D, expected " + std::to_string(D) + "D");
    Phantom<D> ph;
    for (const auto& c : detail::field<Json>(j, "components")) {
        Component<D> comp;
        const auto center = detail::field<std::vector<double>>(c, "center");
        require(center.size() == D, ErrorKind::dimension_mismatch, "phantom center has wrong dimension");
        std::copy(center.begin(), center.end(), comp.center.begin());
        comp.radius = detail::field<double>(c, "radius");
        comp.amplitude = detail::field<double>(c, "amplitude");
        const auto prof = detail::field<std::string>(c, "profile");
        require(prof == "indicator" || prof == "smooth_bump", ErrorKind::malformed_manifest,
                "unknown profile '" + prof + "'");
        require(comp.radius > 0.0, ErrorKind::malformed_manifest, "component radius must be positive");
        comp.profile = prof == "indicator" ? Profile::indicator : Profile::smooth_bump;
        ph.components.push_back(comp);
    }
    return ph;
}

/// Per-face detector lattice shape, in payload order.
inline Json face_layout(const DomainSpec& s) {
    Json faces = Json::array();
    auto add = [&](const auto& dom) {
        for (const auto& f : dom.faces) faces.push_back({{"id", f.id}, {"rows", f.rows}, {"cols", f.cols}});
    };
    if (dimension_of(s.kind) == 2)
        add(build_domain_2d(s));
    else
        add(build_domain_3d(s));
    return faces;
}

/// Dataset plus free-form metadata (phantom, provenance) carried through read/write unchanged.
struct DatasetFile {
    Dataset data;
    Json meta = Json::object();
};

/// Writes <stem>.json and <stem>.bin; returns the manifest path.
inline std::filesystem::path write_dataset(const std::filesystem::path& stem, const DatasetFile& f) {
    const Dataset& d = f.data;
    const std::string bytes = detail::le_bytes(d.values);
    const std::filesystem::path bin = stem.string() + ".bin", man = stem.string() + ".json";
    write_text(bin, bytes);
    Json j{{"format", "polymean-dataset"},
           {"version", 1},
           {"domain", to_json(d.domain)},
           {"kind", std::string(to_string(d.kind))},
           {"radii", {{"count", d.n_r}, {"max", d.r_max}}},
           {"detectors", d.detectors},
           {"faces", face_layout(d.domain)},
           {"layout", {"face", "detector_row", "detector_col", "radius"}},
           {"encoding", "float64-le"},
           {"payload", bin.filename().string()},
           {"payload_sha256", sha256_hex(bytes.data(), bytes.size())},
           {"meta", f.meta}};
    write_text(man, j.dump(2) + "\n");
    return man;
}

inline DatasetFile read_dataset(const std::filesystem::path& manifest) {
    require(std::filesystem::exists(manifest), ErrorKind::io, "missing file " + manifest.string());
    const Json j = detail::parse_json(read_text(manifest), manifest.string());
    require(detail::field<std::string>(j, "format") == "polymean-dataset", ErrorKind::malformed_manifest,
            "not a dataset manifest");
    require(detail::field<std::string>(j, "encoding") == "float64-le", ErrorKind::malformed_manifest,
            "unsupported encoding");
    DatasetFile f;
    Dataset& d = f.data;
    d.domain = domain_from_json(detail::field<Json>(j, "domain"));
    d.kind = data_kind_from_string(detail::field<std::string>(j, "kind"));
    const Json radii = detail::field<Json>(j, "radii");
    d.n_r = detail::field<std::size_t>(radii, "count");
    d.r_max = detail::field<double>(radii, "max");
    d.detectors = detail::field<std::size_t>(j, "detectors");
    require(d.n_r >= 2 && d.r_max > 0.0, ErrorKind::malformed_manifest, "bad radius grid");
    std::size_t expected_detectors = 0;
    try {
        expected_detectors = dimension_of(d.domain.kind) == 2 ? build_domain_2d(d.domain).detector_count()
                                                               : build_domain_3d(d.domain).detector_count();
    } catch (const Error& e) {
        throw Error(ErrorKind::malformed_manifest, std::string("bad domain: ") + e.what());
    }
    require(expected_detectors == d.detectors, ErrorKind::dimension_mismatch,
            "manifest lists " + std::to_string(d.detectors) + " detectors, domain has " +
                std::to_string(expected_detectors));
    const std::filesystem::path bin = manifest.parent_path() / detail::field<std::string>(j, "payload");
    const std::string bytes = read_text(bin);
    require(bytes.size() == d.detectors * d.n_r * 8, ErrorKind::dimension_mismatch,
            bin.string() + " holds " + std::to_string(bytes.size() / 8) + " values, expected " +
                std::to_string(d.detectors * d.n_r));
    require(sha256_hex(bytes.data(), bytes.size()) == detail::field<std::string>(j, "payload_sha256"),
            ErrorKind::malformed_manifest, "payload hash does not match the manifest");
    d.values = detail::from_le_bytes(bytes);
    if (j.contains("meta")) f.meta = j.at("meta");
    return f;
}

template <std::size_t D>
Json to_json(const GridSpec<D>& g) {
    return Json{{"origin", g.origin}, {"spacing", g.spacing}, {"count", g.count}};
}

template <std::size_t D>
GridSpec<D> grid_from_json(const Json& j) {
    GridSpec<D> g;
    const auto o = detail::field<std::vector<double>>(j, "origin");
    const auto s = detail::field<std::vector<double>>(j, "spacing");
    const auto c = detail::field<std::vector<std::size_t>>(j, "count");
    require(o.size() == D && s.size() == D && c.size() == D, ErrorKind::dimension_mismatch,
            "grid has wrong dimension");
    for (std::size_t a = 0; a < D; ++a) {
        g.origin[a] = o[a];
        g.spacing[a] = s[a];
        g.count[a] = c[a];
    }
    return g;
}

/// Binary 16-bit PGM, values min-max scaled to 0..65535. Rows run from high to low second
/// coordinate so the picture has the usual orientation.
inline std::string pgm16(const std::vector<double>& v, std::size_t width, std::size_t height) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double range = hi > lo ? hi - lo : 1.0;
    std::string s = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
            const double x = v[c * height + (height - 1 - r)];
            const auto q = static_cast<std::uint16_t>(std::lround((x - lo) / range * 65535.0));
            s += static_cast<char>(q >> 8);
            s += static_cast<char>(q & 0xff);
        }
    return s;
}

/// Writes <stem>.bin, <stem>.json, <stem>.csv (line through the center along the first axis)
/// and PGM pictures: <stem>.pgm in 2D, <stem>_x1.pgm ... <stem>_x3.pgm central slices in 3D.
template <std::size_t D>
std::filesystem::path write_image(const std::filesystem::path& stem, const ImageGrid<D>& img,
                                  const Json& params = Json::object()) {
    const std::string bytes = detail::le_bytes(img.values);
    const std::filesystem::path bin = stem.string() + ".bin", man = stem.string() + ".json";
    write_text(bin, bytes);
    const auto& g = img.spec;
    Json pictures = Json::array();
    if constexpr (D == 2) {
        write_text(stem.string() + ".pgm", pgm16(img.values, g.count[0], g.count[1]));
        pictures.push_back(stem.filename().string() + ".pgm");
    } else {
        for (std::size_t a = 0; a < 3; ++a) {
            const std::size_t b = a == 0 ? 1 : 0, c = a == 2 ? 1 : 2;
            const std::size_t mid = g.count[a] / 2;
            std::vector<double> slice(g.count[b] * g.count[c]);
            std::array<std::size_t, 3> idx{};
            idx[a] = mid;
            for (idx[b] = 0; idx[b] < g.count[b]; ++idx[b])
                for (idx[c] = 0; idx[c] < g.count[c]; ++idx[c])
                    slice[idx[b] * g.count[c] + idx[c]] =
                        img.values[(idx[0] * g.count[1] + idx[1]) * g.count[2] + idx[2]];
            const std::string name = stem.filename().string() + "_x" + std::to_string(a + 1) + ".pgm";
            write_text(stem.parent_path() / name, pgm16(slice, g.count[b], g.count[c]));
            pictures.push_back(name);
        }
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "x1,value\n";
    std::size_t base = 0, stride = 1;
    for (std::size_t a = D; a-- > 1;) {
        base += (g.count[a] / 2) * stride;
        stride *= g.count[a];
    }
    for (std::size_t i = 0; i < g.count[0]; ++i)
        csv << g.origin[0] + g.spacing[0] * static_cast<double>(i) << "," << img.values[base + i * stride] << "\n";
    write_text(stem.string() + ".csv", csv.str());
    Json j{{"format", "polymean-image"},
           {"version", 1},
           {"dimension", D},
           {"grid", to_json(g)},
           {"encoding", "float64-le"},
           {"order", "first axis slowest"},
           {"payload", bin.filename().string()},
           {"payload_sha256", sha256_hex(bytes.data(), bytes.size())},
           {"pictures", pictures},
           {"profile_csv", stem.filename().string() + ".csv"},
           {"params", params}};
    write_text(man, j.dump(2) + "\n");
    return man;
}

struct ImageFile {
    std::size_t dimension = 0;
    ImageGrid<2> image2;
    ImageGrid<3> image3;
    Json params;

    const std::vector<double>& values() const { return dimension == 2 ? image2.values : image3.values; }
};

inline ImageFile read_image(const std::filesystem::path& manifest) {
    require(std::filesystem::exists(manifest), ErrorKind::io, "missing file " + manifest.string());
    const Json j = detail::parse_json(read_text(manifest), manifest.string());
    require(detail::field<std::string>(j, "format") == "polymean-image", ErrorKind::malformed_manifest,
            "not an image manifest");
    ImageFile f;
    f.dimension = detail::field<std::size_t>(j, "dimension");
    require(f.dimension == 2 || f.dimension == 3, ErrorKind::malformed_manifest, "image dimension must be 2 or 3");
    const std::filesystem::path bin = manifest.parent_path() / detail::field<std::string>(j, "payload");
    if (j.contains("params")) f.params = j.at("params");
    require(sha256_file(bin) == detail::field<std::string>(j, "payload_sha256"), ErrorKind::malformed_manifest,
            "payload hash does not match the manifest");
    if (f.dimension == 2) {
        f.image2 = ImageGrid<2>(grid_from_json<2>(detail::field<Json>(j, "grid")));
        f.image2.values = read_payload(bin, f.image2.spec.size());
    } else {
        f.image3 = ImageGrid<3>(grid_from_json<3>(detail::field<Json>(j, "grid")));
        f.image3.values = read_payload(bin, f.image3.spec.size());
    }
    return f;
}

}  // namespace polymean
