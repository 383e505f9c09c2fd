#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reggan/errors.hpp"

namespace reggan {

/// Single-channel 2D intensity grid, values in [-1, 1]. Row-major, double
/// precision (training converts to float internally; oracles stay in double).
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
};

/// Per-pixel 2D displacement grid in pixel units. Plane 0 is dy, plane 1 is dx.
struct DeformationField {
    int height = 0;
    int width = 0;
    std::vector<double> dy;
    std::vector<double> dx;

    DeformationField() = default;
    DeformationField(int h, int w)
        : height(h),
          width(w),
          dy(static_cast<std::size_t>(h) * w, 0.0),
          dx(static_cast<std::size_t>(h) * w, 0.0) {}

    double& at_dy(int y, int x) { return dy[static_cast<std::size_t>(y) * width + x]; }
    double at_dy(int y, int x) const { return dy[static_cast<std::size_t>(y) * width + x]; }
    double& at_dx(int y, int x) { return dx[static_cast<std::size_t>(y) * width + x]; }
    double at_dx(int y, int x) const { return dx[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return dy.size(); }
    bool same_shape(const Image& img) const { return height == img.height && width == img.width; }
    bool same_shape(const DeformationField& o) const { return height == o.height && width == o.width; }
};

/// One training tuple: source (modality A), target (modality B), and the
/// clean target when it is known (kept for evaluation only).
struct SamplePair {
    Image source;
    Image target;
    std::optional<Image> aligned_target;
    std::string pair_id;
};

struct DatasetSplit {
    std::vector<SamplePair> pairs;
    std::size_t n() const { return pairs.size(); }
};

inline constexpr int kMinImageSide = 8;

/// Affine map sending [lo, hi] -> [-1, 1], clamped. The (2x - lo - hi)/(hi - lo)
/// form is bit-exact on already-normalized input (lo = -1, hi = 1 gives 2x/2 = x).
Image normalize_intensity(const std::vector<double>& raw, int height, int width, double lo, double hi);

/// Checks every Image invariant: finite values, range, minimum size.
void validate_image(const Image& img, const std::string& label);

/// Returns the pair iff all shape and intensity invariants hold.
const SamplePair& validate_pair(const SamplePair& pair);

void validate_split(const DatasetSplit& split);

} // namespace reggan
