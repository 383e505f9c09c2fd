#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reggan/core.hpp"
#include "reggan/noise.hpp"

namespace reggan::io {

/// Writes a [-1,1] image as a binary 16-bit PGM (values quantized to 0..65535;
/// the quantization round-trips exactly through read_image).
void write_pgm16(const std::filesystem::path& path, const Image& img);

/// Raw float64 image file with a small header (magic, height, width).
void write_f64(const std::filesystem::path& path, const Image& img);

/// Reads either format by extension: .pgm (8- or 16-bit) or .f64.
Image read_image(const std::filesystem::path& path);

/// Deformation field file: magic, height, width, units tag, dy plane, dx plane.
void write_field(const std::filesystem::path& path, const DeformationField& field);
DeformationField read_field(const std::filesystem::path& path);

struct Manifest {
    int version = 1;
    int resolution = 0;
    std::string format = "pgm16";
    double lo = 0.0; // raw-value normalization bounds
    double hi = 65535.0;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::string generator_spec_json; // optional spec echo, raw json text
    std::string fingerprint;         // content hash of ids + resolution
};

std::string dataset_fingerprint(const Manifest& m);

void write_manifest(const std::filesystem::path& dataset_dir, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& dataset_dir);

/// Writes a split under <root>/<split>/{A,B}/<pair_id>.<ext>.
void write_split(const std::filesystem::path& dataset_dir, const std::string& split,
                 const DatasetSplit& data, const std::string& format);

/// Loads a split listed in the manifest; images are normalized via the
/// manifest bounds. aligned_target is set to the loaded target (files store
/// clean data; corruption happens downstream).
DatasetSplit load_split(const std::filesystem::path& dataset_dir, const Manifest& m,
                        const std::string& split);

void write_corruption_log(const std::filesystem::path& path, const std::string& mode,
                          std::uint64_t seed, const std::vector<noise::CorruptionRecord>& records);
std::vector<noise::CorruptionRecord> read_corruption_log(const std::filesystem::path& path);

} // namespace reggan::io
