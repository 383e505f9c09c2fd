#include "reggan/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "reggan/errors.hpp"
#include "reggan/warp.hpp"

namespace reggan::synth {

void PhantomSpec::validate() const {
    if (resolution < 32) throw DataError("phantom: resolution must be at least 32");
    if (n_structures < 1) throw DataError("phantom: need at least one structure");
    if (intensity_map_a.size() < 2 || intensity_map_a.size() != intensity_map_b.size()) {
        throw DataError("phantom: intensity maps must list background plus at least one class, same length");
    }
    if (texture_scale <= 0.0 || texture_amp < 0.0) {
        throw DataError("phantom: invalid texture parameters");
    }
}

namespace {

struct Ellipse {
    double cy, cx;
    double ay, ax; // semi-axes, px
    double angle;  // radians
    int cls;
};

// Smooth texture field in roughly [-1, 1]: coarse uniform noise, bilinearly
// upsampled and Gaussian smoothed.
std::vector<double> smooth_texture(int res, double scale, Rng& rng) {
    const int g = std::max(2, static_cast<int>(std::ceil(res / scale)) + 1);
    std::vector<double> coarse(static_cast<std::size_t>(g) * g);
    for (auto& v : coarse) v = rng.uniform(-1.0, 1.0);
    std::vector<double> full(static_cast<std::size_t>(res) * res);
    const double step = (res - 1) / static_cast<double>(g - 1);
    for (int y = 0; y < res; ++y) {
        for (int x = 0; x < res; ++x) {
            const double gy = y / step, gx = x / step;
            const int y0 = std::min(static_cast<int>(gy), g - 2);
            const int x0 = std::min(static_cast<int>(gx), g - 2);
            const double wy = gy - y0, wx = gx - x0;
            const double t00 = coarse[static_cast<std::size_t>(y0) * g + x0];
            const double t01 = coarse[static_cast<std::size_t>(y0) * g + x0 + 1];
            const double t10 = coarse[static_cast<std::size_t>(y0 + 1) * g + x0];
            const double t11 = coarse[static_cast<std::size_t>(y0 + 1) * g + x0 + 1];
            full[static_cast<std::size_t>(y) * res + x] =
                (t00 + wx * (t01 - t00)) * (1.0 - wy) + (t10 + wx * (t11 - t10)) * wy;
        }
    }
    warp::gaussian_blur_plane(full, res, res, scale / 4.0);
    return full;
}

} // namespace

SamplePair generate_phantom_pair(const PhantomSpec& spec, Rng& rng, const std::string& pair_id) {
    spec.validate();
    const int res = spec.resolution;
    const int n_classes = static_cast<int>(spec.intensity_map_a.size());

    std::vector<Ellipse> shapes;
    shapes.reserve(static_cast<std::size_t>(spec.n_structures));
    for (int i = 0; i < spec.n_structures; ++i) {
        Ellipse e;
        e.cy = rng.uniform(0.18, 0.82) * res;
        e.cx = rng.uniform(0.18, 0.82) * res;
        e.ay = rng.uniform(0.08, 0.24) * res;
        e.ax = rng.uniform(0.08, 0.24) * res;
        e.angle = rng.uniform(0.0, 3.14159265358979323846);
        e.cls = 1 + i % (n_classes - 1);
        shapes.push_back(e);
    }
    const auto texture = smooth_texture(res, spec.texture_scale, rng);

    Image a(res, res, spec.intensity_map_a[0]);
    Image b(res, res, spec.intensity_map_b[0]);
    constexpr double edge_px = 1.2; // soft edge width
    for (const auto& e : shapes) {
        const double ca = std::cos(e.angle), sa = std::sin(e.angle);
        const double ia = spec.intensity_map_a[static_cast<std::size_t>(e.cls)];
        const double ib = spec.intensity_map_b[static_cast<std::size_t>(e.cls)];
        const double rmin = std::min(e.ay, e.ax);
        for (int y = 0; y < res; ++y) {
            for (int x = 0; x < res; ++x) {
                const double oy = y - e.cy, ox = x - e.cx;
                const double u = ca * oy + sa * ox;
                const double v = -sa * oy + ca * ox;
                const double q = (u / e.ay) * (u / e.ay) + (v / e.ax) * (v / e.ax);
                const double d = (1.0 - std::sqrt(q)) * rmin; // approx signed distance, px
                if (d < -4.0 * edge_px) continue;
                const double w = 1.0 / (1.0 + std::exp(-d / edge_px));
                a.at(y, x) = (1.0 - w) * a.at(y, x) + w * ia;
                b.at(y, x) = (1.0 - w) * b.at(y, x) + w * ib;
            }
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = spec.texture_amp * texture[i];
        a.data[i] = std::clamp(a.data[i] + t, -1.0, 1.0);
        b.data[i] = std::clamp(b.data[i] + t, -1.0, 1.0);
    }

    SamplePair pair;
    pair.pair_id = pair_id;
    pair.source = std::move(a);
    pair.target = b;
    pair.aligned_target = std::move(b);
    validate_pair(pair);
    return pair;
}

io::Manifest generate_dataset(const PhantomSpec& spec, int n_train, int n_test,
                              const std::filesystem::path& out_dir, const std::string& format) {
    spec.validate();
    if (n_train < 1 || n_test < 1) {
        throw DataError("generate_dataset: n_train and n_test must both be at least 1");
    }
    auto make_split = [&](const std::string& name, const std::string& prefix, int n) {
        DatasetSplit split;
        split.pairs.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            char id[16];
            std::snprintf(id, sizeof(id), "%s%04d", prefix.c_str(), i);
            const std::uint64_t child =
                Rng::splitmix(spec.seed ^ Rng::splitmix(std::hash<std::string>{}(name) + i));
            Rng rng(child);
            split.pairs.push_back(generate_phantom_pair(spec, rng, id));
        }
        return split;
    };
    const auto train = make_split("train", "tr", n_train);
    const auto test = make_split("test", "te", n_test);

    io::Manifest m;
    m.resolution = spec.resolution;
    m.format = format;
    m.lo = 0.0;
    m.hi = format == "f64" ? 0.0 : 65535.0; // f64 stores [-1,1] directly
    for (const auto& p : train.pairs) m.train_ids.push_back(p.pair_id);
    for (const auto& p : test.pairs) m.test_ids.push_back(p.pair_id);
    nlohmann::ordered_json gen;
    gen["type"] = "phantom";
    gen["resolution"] = spec.resolution;
    gen["n_structures"] = spec.n_structures;
    gen["intensity_map_a"] = spec.intensity_map_a;
    gen["intensity_map_b"] = spec.intensity_map_b;
    gen["texture_scale"] = spec.texture_scale;
    gen["texture_amp"] = spec.texture_amp;
    gen["seed"] = spec.seed;
    m.generator_spec_json = gen.dump();
    m.fingerprint = io::dataset_fingerprint(m);

    io::write_split(out_dir, "train", train, format);
    io::write_split(out_dir, "test", test, format);
    io::write_manifest(out_dir, m);
    return m;
}

} // namespace reggan::synth
