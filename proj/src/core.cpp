#include "reggan/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace reggan {

Image normalize_intensity(const std::vector<double>& raw, int height, int width, double lo, double hi) {
    if (!(hi > lo)) {
        throw DataError("normalize_intensity: hi must be greater than lo (got lo=" + std::to_string(lo) +
                        ", hi=" + std::to_string(hi) + ")");
    }
    if (height < kMinImageSide || width < kMinImageSide) {
        throw DataError("normalize_intensity: image must be at least " + std::to_string(kMinImageSide) +
                        "x" + std::to_string(kMinImageSide) + ", got " + std::to_string(height) + "x" +
                        std::to_string(width));
    }
    if (raw.size() != static_cast<std::size_t>(height) * width) {
        throw DataError("normalize_intensity: raw size does not match height*width");
    }
    Image out(height, width);
    const double span = hi - lo;
    const double shift = lo + hi;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = raw[i];
        if (!std::isfinite(v)) {
            throw DataError("normalize_intensity: non-finite value at index " + std::to_string(i));
        }
        out.data[i] = std::clamp((2.0 * v - shift) / span, -1.0, 1.0);
    }
    return out;
}

void validate_image(const Image& img, const std::string& label) {
    if (img.height < kMinImageSide || img.width < kMinImageSide) {
        throw DataError(label + ": image must be at least " + std::to_string(kMinImageSide) + "x" +
                        std::to_string(kMinImageSide) + ", got " + std::to_string(img.height) + "x" +
                        std::to_string(img.width));
    }
    if (img.data.size() != img.size()) {
        throw DataError(label + ": data size does not match height*width");
    }
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = img.data[i];
        if (!std::isfinite(v)) {
            throw DataError(label + ": non-finite intensity at index " + std::to_string(i));
        }
        if (v < -1.0 || v > 1.0) {
            throw DataError(label + ": intensity out of [-1, 1] at index " + std::to_string(i) +
                            " (value " + std::to_string(v) + ")");
        }
    }
}

const SamplePair& validate_pair(const SamplePair& pair) {
    validate_image(pair.source, "pair '" + pair.pair_id + "' source");
    validate_image(pair.target, "pair '" + pair.pair_id + "' target");
    if (!pair.source.same_shape(pair.target)) {
        throw DataError("pair '" + pair.pair_id + "': source " + std::to_string(pair.source.height) + "x" +
                        std::to_string(pair.source.width) + " and target " + std::to_string(pair.target.height) +
                        "x" + std::to_string(pair.target.width) + " shapes differ");
    }
    if (pair.aligned_target) {
        validate_image(*pair.aligned_target, "pair '" + pair.pair_id + "' aligned_target");
        if (!pair.source.same_shape(*pair.aligned_target)) {
            throw DataError("pair '" + pair.pair_id + "': aligned_target shape differs from source");
        }
    }
    return pair;
}

void validate_split(const DatasetSplit& split) {
    if (split.pairs.empty()) {
        throw DataError("dataset split is empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& p : split.pairs) {
        validate_pair(p);
        if (!seen.insert(p.pair_id).second) {
            throw DataError("duplicate pair_id '" + p.pair_id + "' in split");
        }
    }
}

} // namespace reggan
