#include "reggan/imageio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "reggan/errors.hpp"
#include "reggan/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace reggan::io {

namespace {

void write_binary(std::ofstream& os, const void* data, std::size_t bytes) {
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open '" + path.string() + "' for reading");
    return is;
}

} // namespace

void write_pgm16(const fs::path& path, const Image& img) {
    auto os = open_out(path);
    os << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<std::uint8_t> buf(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = (img.data[i] + 1.0) * 0.5 * 65535.0;
        const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 65535.0)));
        buf[2 * i] = static_cast<std::uint8_t>(q >> 8); // big-endian per netpbm
        buf[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
    write_binary(os, buf.data(), buf.size());
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

void write_f64(const fs::path& path, const Image& img) {
    auto os = open_out(path);
    const char magic[4] = {'R', 'G', 'F', '1'};
    const std::uint32_t h = static_cast<std::uint32_t>(img.height);
    const std::uint32_t w = static_cast<std::uint32_t>(img.width);
    write_binary(os, magic, 4);
    write_binary(os, &h, 4);
    write_binary(os, &w, 4);
    write_binary(os, img.data.data(), img.size() * sizeof(double));
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

namespace {

int read_pnm_token(std::istream& is, const fs::path& path) {
    // Skips whitespace and '#' comments.
    while (true) {
        int c = is.peek();
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else if (std::isspace(c)) {
            is.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(is >> value)) throw DataError("malformed PGM header in '" + path.string() + "'");
    return value;
}

Image read_pgm(const fs::path& path) {
    auto is = open_in(path);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '5') throw DataError("'" + path.string() + "' is not a binary PGM");
    const int w = read_pnm_token(is, path);
    const int h = read_pnm_token(is, path);
    const int maxval = read_pnm_token(is, path);
    if (maxval != 255 && maxval != 65535) {
        throw DataError("'" + path.string() + "': unsupported PGM maxval " + std::to_string(maxval));
    }
    is.get(); // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> raw(n);
    if (maxval == 255) {
        std::vector<std::uint8_t> buf(n);
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (is.gcount() != static_cast<std::streamsize>(n)) {
            throw DataError("'" + path.string() + "': truncated PGM payload");
        }
        for (std::size_t i = 0; i < n; ++i) raw[i] = buf[i];
    } else {
        std::vector<std::uint8_t> buf(n * 2);
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
        if (is.gcount() != static_cast<std::streamsize>(n * 2)) {
            throw DataError("'" + path.string() + "': truncated PGM payload");
        }
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
        }
    }
    const double maxd = maxval;
    return normalize_intensity(raw, h, w, 0.0, maxd);
}

Image read_f64_file(const fs::path& path) {
    auto is = open_in(path);
    char magic[4];
    std::uint32_t h = 0, w = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&h), 4);
    is.read(reinterpret_cast<char*>(&w), 4);
    if (!is || std::memcmp(magic, "RGF1", 4) != 0) {
        throw DataError("'" + path.string() + "' is not a raw image file");
    }
    Image img(static_cast<int>(h), static_cast<int>(w));
    is.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(img.size() * sizeof(double))) {
        throw DataError("'" + path.string() + "': truncated raw image payload");
    }
    validate_image(img, path.string());
    return img;
}

} // namespace

Image read_image(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".f64") return read_f64_file(path);
    throw DataError("unsupported image extension '" + ext + "' (expected .pgm or .f64)");
}

void write_field(const fs::path& path, const DeformationField& field) {
    auto os = open_out(path);
    const char magic[4] = {'R', 'G', 'D', '1'};
    const std::uint32_t h = static_cast<std::uint32_t>(field.height);
    const std::uint32_t w = static_cast<std::uint32_t>(field.width);
    const char units[2] = {'p', 'x'};
    write_binary(os, magic, 4);
    write_binary(os, &h, 4);
    write_binary(os, &w, 4);
    write_binary(os, units, 2);
    write_binary(os, field.dy.data(), field.size() * sizeof(double));
    write_binary(os, field.dx.data(), field.size() * sizeof(double));
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

DeformationField read_field(const fs::path& path) {
    auto is = open_in(path);
    char magic[4];
    std::uint32_t h = 0, w = 0;
    char units[2];
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&h), 4);
    is.read(reinterpret_cast<char*>(&w), 4);
    is.read(units, 2);
    if (!is || std::memcmp(magic, "RGD1", 4) != 0) {
        throw DataError("'" + path.string() + "' is not a deformation field file");
    }
    DeformationField f(static_cast<int>(h), static_cast<int>(w));
    is.read(reinterpret_cast<char*>(f.dy.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(f.dx.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!is) throw DataError("'" + path.string() + "': truncated field payload");
    return f;
}

std::string dataset_fingerprint(const Manifest& m) {
    std::uint64_t hash = 1469598103934665603ull; // FNV-1a
    auto mix = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ull;
        }
        hash ^= 0xff;
        hash *= 1099511628211ull;
    };
    mix(std::to_string(m.resolution));
    for (const auto& id : m.train_ids) mix(id);
    mix("|");
    for (const auto& id : m.test_ids) mix(id);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_manifest(const fs::path& dataset_dir, const Manifest& m) {
    json j;
    j["kind"] = "reggan_dataset";
    j["version"] = m.version;
    j["resolution"] = m.resolution;
    j["format"] = m.format;
    j["normalization"] = {{"lo", m.lo}, {"hi", m.hi}};
    j["splits"] = {{"train", {{"n", m.train_ids.size()}, {"ids", m.train_ids}}},
                   {"test", {{"n", m.test_ids.size()}, {"ids", m.test_ids}}}};
    if (!m.generator_spec_json.empty()) {
        j["generator"] = json::parse(m.generator_spec_json);
    }
    j["fingerprint"] = dataset_fingerprint(m);
    fs::create_directories(dataset_dir);
    std::ofstream os(dataset_dir / "manifest.json");
    if (!os) throw DataError("cannot write manifest in '" + dataset_dir.string() + "'");
    os << j.dump(2) << "\n";
}

Manifest read_manifest(const fs::path& dataset_dir) {
    const auto path = dataset_dir / "manifest.json";
    std::ifstream is(path);
    if (!is) throw DataError("missing manifest: '" + path.string() + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed manifest '" + path.string() + "': " + e.what());
    }
    if (j.value("kind", "") != "reggan_dataset") {
        throw DataError("'" + path.string() + "' is not a dataset manifest");
    }
    Manifest m;
    m.version = j.at("version").get<int>();
    m.resolution = j.at("resolution").get<int>();
    m.format = j.at("format").get<std::string>();
    m.lo = j.at("normalization").at("lo").get<double>();
    m.hi = j.at("normalization").at("hi").get<double>();
    m.train_ids = j.at("splits").at("train").at("ids").get<std::vector<std::string>>();
    m.test_ids = j.at("splits").at("test").at("ids").get<std::vector<std::string>>();
    if (j.contains("generator")) m.generator_spec_json = j["generator"].dump();
    m.fingerprint = j.value("fingerprint", dataset_fingerprint(m));
    return m;
}

void write_split(const fs::path& dataset_dir, const std::string& split, const DatasetSplit& data,
                 const std::string& format) {
    const std::string ext = format == "f64" ? ".f64" : ".pgm";
    for (const auto& p : data.pairs) {
        const auto a_path = dataset_dir / split / "A" / (p.pair_id + ext);
        const auto b_path = dataset_dir / split / "B" / (p.pair_id + ext);
        if (format == "f64") {
            write_f64(a_path, p.source);
            write_f64(b_path, p.target);
        } else {
            write_pgm16(a_path, p.source);
            write_pgm16(b_path, p.target);
        }
    }
}

DatasetSplit load_split(const fs::path& dataset_dir, const Manifest& m, const std::string& split) {
    const auto& ids = split == "train" ? m.train_ids : m.test_ids;
    if (ids.empty()) throw DataError("split '" + split + "' is empty in manifest");
    const std::string ext = m.format == "f64" ? ".f64" : ".pgm";
    DatasetSplit out;
    out.pairs.reserve(ids.size());
    for (const auto& id : ids) {
        SamplePair p;
        p.pair_id = id;
        p.source = read_image(dataset_dir / split / "A" / (id + ext));
        p.target = read_image(dataset_dir / split / "B" / (id + ext));
        p.aligned_target = p.target;
        validate_pair(p);
        out.pairs.push_back(std::move(p));
    }
    return out;
}

void write_corruption_log(const fs::path& path, const std::string& mode, std::uint64_t seed,
                          const std::vector<noise::CorruptionRecord>& records) {
    json j;
    j["kind"] = "reggan_corruption_log";
    j["mode"] = mode;
    j["seed"] = seed;
    json recs = json::array();
    for (const auto& r : records) {
        json e;
        e["id"] = r.pair_id;
        e["type"] = r.kind;
        if (r.kind == "affine") {
            e["source"] = {{"rotation_deg", r.source_params.rotation_deg},
                           {"ty", r.source_params.ty},
                           {"tx", r.source_params.tx},
                           {"sy", r.source_params.sy},
                           {"sx", r.source_params.sx}};
            e["target"] = {{"rotation_deg", r.target_params.rotation_deg},
                           {"ty", r.target_params.ty},
                           {"tx", r.target_params.tx},
                           {"sy", r.target_params.sy},
                           {"sx", r.target_params.sx}};
        } else if (r.kind == "elastic") {
            e["source_seed"] = r.source_seed;
            e["target_seed"] = r.target_seed;
        }
        recs.push_back(std::move(e));
    }
    j["records"] = std::move(recs);
    auto os = open_out(path);
    os << j.dump(2) << "\n";
}

std::vector<noise::CorruptionRecord> read_corruption_log(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("missing corruption log '" + path.string() + "'");
    json j;
    is >> j;
    std::vector<noise::CorruptionRecord> out;
    for (const auto& e : j.at("records")) {
        noise::CorruptionRecord r;
        r.pair_id = e.at("id").get<std::string>();
        r.kind = e.at("type").get<std::string>();
        if (r.kind == "affine") {
            auto parse = [](const json& p) {
                warp::AffineParams a;
                a.rotation_deg = p.at("rotation_deg").get<double>();
                a.ty = p.at("ty").get<double>();
                a.tx = p.at("tx").get<double>();
                a.sy = p.at("sy").get<double>();
                a.sx = p.at("sx").get<double>();
                return a;
            };
            r.source_params = parse(e.at("source"));
            r.target_params = parse(e.at("target"));
        } else if (r.kind == "elastic") {
            r.source_seed = e.at("source_seed").get<std::uint64_t>();
            r.target_seed = e.at("target_seed").get<std::uint64_t>();
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace reggan::io
