#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reggan/core.hpp"
#include "reggan/imageio.hpp"
#include "reggan/rng.hpp"

namespace reggan::synth {

/// Procedural two-modality phantom: soft-edged ellipses with class-dependent
/// intensities rendered twice through per-modality intensity maps, plus a
/// shared smooth texture. Modality B inverts contrast and remaps two classes.
struct PhantomSpec {
    int resolution = 64;
    int n_structures = 6;
    std::vector<double> intensity_map_a = {-0.85, -0.35, 0.05, 0.45, 0.80};
    std::vector<double> intensity_map_b = {0.85, 0.35, -0.05, -0.75, -0.45};
    double texture_scale = 16.0; // smooth-noise wavelength, px
    double texture_amp = 0.05;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Renders one aligned pair; geometry is drawn once and shared by both
/// modalities (aligned_target = target by construction).
SamplePair generate_phantom_pair(const PhantomSpec& spec, Rng& rng, const std::string& pair_id);

/// Writes train/test splits plus manifest under out_dir. Train and test use
/// disjoint derived seeds. Returns the written manifest.
io::Manifest generate_dataset(const PhantomSpec& spec, int n_train, int n_test,
                              const std::filesystem::path& out_dir,
                              const std::string& format = "pgm16");

} // namespace reggan::synth
