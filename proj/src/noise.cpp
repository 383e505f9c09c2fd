#include "reggan/noise.hpp"

#include <algorithm>
#include <cmath>

#include "reggan/errors.hpp"

namespace reggan::noise {

AffineNoiseSpec AffineNoiseSpec::from_level(int level) {
    if (level < 0 || level > 5) {
        throw DataError("affine noise level must be in 0..5, got " + std::to_string(level));
    }
    AffineNoiseSpec s;
    s.level = level;
    s.rotation_max_deg = static_cast<double>(level);
    s.translation_max = 0.02 * level;
    s.rescale_max = 0.02 * level;
    return s;
}

void AffineNoiseSpec::validate() const {
    if (level < 0 || level > 5) throw DataError("affine noise level must be in 0..5");
    const AffineNoiseSpec ref = from_level(level);
    if (rotation_max_deg != ref.rotation_max_deg || translation_max != ref.translation_max ||
        rescale_max != ref.rescale_max) {
        throw DataError("affine noise bounds inconsistent with level " + std::to_string(level));
    }
}

ElasticNoiseSpec ElasticNoiseSpec::defaults_for(int resolution) {
    ElasticNoiseSpec s;
    s.grid = 8;
    s.sigma = resolution / 16.0;
    s.magnitude = 0.03;
    return s;
}

void ElasticNoiseSpec::validate() const {
    if (grid < 2) throw DataError("elastic noise: grid must be at least 2");
    if (!(sigma > 0.0)) throw DataError("elastic noise: sigma must be positive");
    if (magnitude < 0.0) throw DataError("elastic noise: magnitude must be non-negative");
}

PairingMode PairingMode::aligned() {
    return PairingMode{};
}

PairingMode PairingMode::misaligned_affine(int level) {
    PairingMode m;
    m.kind = Kind::misaligned_affine;
    m.affine = AffineNoiseSpec::from_level(level);
    return m;
}

PairingMode PairingMode::misaligned_elastic(const ElasticNoiseSpec& spec) {
    spec.validate();
    PairingMode m;
    m.kind = Kind::misaligned_elastic;
    m.elastic = spec;
    return m;
}

PairingMode PairingMode::unpaired() {
    PairingMode m;
    m.kind = Kind::unpaired;
    return m;
}

PairingMode PairingMode::parse(const std::string& s, int resolution) {
    if (s == "aligned") return aligned();
    if (s == "na") return misaligned_elastic(ElasticNoiseSpec::defaults_for(resolution));
    if (s == "unpaired") return unpaired();
    if (s.size() == 1 && s[0] >= '0' && s[0] <= '5') return misaligned_affine(s[0] - '0');
    throw DataError("unknown noise setting '" + s + "' (expected 0..5, na, unpaired, or aligned)");
}

std::string PairingMode::to_string() const {
    switch (kind) {
        case Kind::aligned: return "aligned";
        case Kind::misaligned_affine: return std::to_string(affine.level);
        case Kind::misaligned_elastic: return "na";
        case Kind::unpaired: return "unpaired";
    }
    return "?";
}

warp::AffineParams sample_affine(const AffineNoiseSpec& spec, Rng& rng) {
    spec.validate();
    warp::AffineParams p;
    p.rotation_deg = rng.uniform(-spec.rotation_max_deg, spec.rotation_max_deg);
    p.ty = rng.uniform(-spec.translation_max, spec.translation_max);
    p.tx = rng.uniform(-spec.translation_max, spec.translation_max);
    p.sy = rng.uniform(1.0 - spec.rescale_max, 1.0 + spec.rescale_max);
    p.sx = rng.uniform(1.0 - spec.rescale_max, 1.0 + spec.rescale_max);
    return p;
}

namespace {

Image apply_affine(const Image& img, const warp::AffineParams& params) {
    const auto field = warp::affine_to_field(params, img.height, img.width);
    return warp::resample(img, field, warp::InterpolationScheme::bilinear);
}

} // namespace

SamplePair corrupt_pair(const SamplePair& pair, const PairingMode& mode, Rng& rng,
                        CorruptionRecord* record) {
    if (mode.kind == PairingMode::Kind::unpaired) {
        throw DataError("corrupt_pair: unpaired mode operates on whole splits, use corrupt_split");
    }
    if (record != nullptr) {
        record->pair_id = pair.pair_id;
    }
    if (mode.kind == PairingMode::Kind::aligned) {
        if (record != nullptr) record->kind = "aligned";
        return pair;
    }
    SamplePair out;
    out.pair_id = pair.pair_id;
    out.aligned_target = pair.aligned_target ? pair.aligned_target : std::optional<Image>(pair.target);
    if (mode.kind == PairingMode::Kind::misaligned_affine) {
        const auto pa = sample_affine(mode.affine, rng);
        const auto pb = sample_affine(mode.affine, rng);
        out.source = apply_affine(pair.source, pa);
        out.target = apply_affine(pair.target, pb);
        if (record != nullptr) {
            record->kind = "affine";
            record->source_params = pa;
            record->target_params = pb;
        }
    } else {
        const std::uint64_t sa = rng.fork_seed();
        const std::uint64_t sb = rng.fork_seed();
        Rng ra(sa), rb(sb);
        const auto fa = warp::random_elastic_field(mode.elastic.field_params(), pair.source.height,
                                                   pair.source.width, ra);
        const auto fb = warp::random_elastic_field(mode.elastic.field_params(), pair.target.height,
                                                   pair.target.width, rb);
        out.source = warp::resample(pair.source, fa);
        out.target = warp::resample(pair.target, fb);
        if (record != nullptr) {
            record->kind = "elastic";
            record->source_seed = sa;
            record->target_seed = sb;
        }
    }
    return out;
}

DatasetSplit make_unpaired(const DatasetSplit& split, Rng& rng) {
    const std::size_t n = split.n();
    if (n < 2) throw DataError("make_unpaired: need at least 2 pairs, got " + std::to_string(n));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(perm[i], perm[j]);
    }
    // Derangement-seeking pass: any remaining fixed point is swapped forward.
    for (std::size_t i = 0; i < n; ++i) {
        if (perm[i] == i) std::swap(perm[i], perm[(i + 1) % n]);
    }
    DatasetSplit out;
    out.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SamplePair p;
        p.pair_id = split.pairs[i].pair_id;
        p.source = split.pairs[i].source;
        p.target = split.pairs[perm[i]].target;
        p.aligned_target = std::nullopt;
        out.pairs.push_back(std::move(p));
    }
    return out;
}

DatasetSplit corrupt_split(const DatasetSplit& split, const PairingMode& mode, Rng& rng,
                           std::vector<CorruptionRecord>* log) {
    if (mode.kind == PairingMode::Kind::unpaired) {
        return make_unpaired(split, rng);
    }
    DatasetSplit out;
    out.pairs.reserve(split.n());
    for (const auto& p : split.pairs) {
        CorruptionRecord rec;
        out.pairs.push_back(corrupt_pair(p, mode, rng, log != nullptr ? &rec : nullptr));
        if (log != nullptr) log->push_back(std::move(rec));
    }
    return out;
}

} // namespace reggan::noise
