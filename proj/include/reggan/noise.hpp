#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reggan/core.hpp"
#include "reggan/rng.hpp"
#include "reggan/warp.hpp"

namespace reggan::noise {

/// Misalignment-noise bounds for one of the levels 0-5: level k means
/// rotation up to k degrees, translation and rescaling up to 2k percent.
struct AffineNoiseSpec {
    int level = 0;
    double rotation_max_deg = 0.0;
    double translation_max = 0.0;
    double rescale_max = 0.0;

    static AffineNoiseSpec from_level(int level);
    void validate() const;
};

struct ElasticNoiseSpec {
    int grid = 8;
    double sigma = 4.0;      // pixels
    double magnitude = 0.03; // fraction of image size

    static ElasticNoiseSpec defaults_for(int resolution);
    void validate() const;

    warp::ElasticFieldParams field_params() const { return {grid, sigma, magnitude}; }
};

struct PairingMode {
    enum class Kind { aligned, misaligned_affine, misaligned_elastic, unpaired };

    Kind kind = Kind::aligned;
    AffineNoiseSpec affine;
    ElasticNoiseSpec elastic;

    static PairingMode aligned();
    static PairingMode misaligned_affine(int level);
    static PairingMode misaligned_elastic(const ElasticNoiseSpec& spec);
    static PairingMode unpaired();

    /// Parses the CLI noise setting: "0".."5", "na", "unpaired", "aligned".
    static PairingMode parse(const std::string& s, int resolution);
    std::string to_string() const;
};

/// One uniform draw from the spec's box. Level 0 returns exact identity.
warp::AffineParams sample_affine(const AffineNoiseSpec& spec, Rng& rng);

/// Replay record for one corrupted pair: the drawn transform of each side.
struct CorruptionRecord {
    std::string pair_id;
    std::string kind; // "aligned" | "affine" | "elastic"
    warp::AffineParams source_params;
    warp::AffineParams target_params;
    std::uint64_t source_seed = 0; // elastic field seeds
    std::uint64_t target_seed = 0;
};

/// Draws an independent transform per modality and warps each image with its
/// own field; the original target is kept as aligned_target for evaluation.
SamplePair corrupt_pair(const SamplePair& pair, const PairingMode& mode, Rng& rng,
                        CorruptionRecord* record = nullptr);

/// Shuffles targets with a fixed-point-eliminating permutation and clears
/// aligned_target. Requires at least two pairs.
DatasetSplit make_unpaired(const DatasetSplit& split, Rng& rng);

/// Applies the pairing mode to a whole split (handles unpaired too).
DatasetSplit corrupt_split(const DatasetSplit& split, const PairingMode& mode, Rng& rng,
                           std::vector<CorruptionRecord>* log = nullptr);

} // namespace reggan::noise
