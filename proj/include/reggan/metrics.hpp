#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reggan/core.hpp"

namespace reggan::metrics {

/// Boolean grid marking pixels that participate in metric computation.
struct ForegroundMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> mask;

    bool at(int y, int x) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t count() const;
};

enum class NmaeNormalizer { range, mean_abs_target };

struct MetricsConfig {
    double foreground_threshold = 0.02; // above the -1 background
    int foreground_dilation = 2;        // square structuring element radius, px
    NmaeNormalizer nmae_normalizer = NmaeNormalizer::range;
    double psnr_cap_db = 99.0;
};

/// Pixels with target above (-1 + threshold), dilated by a square structuring
/// element of the given radius. Throws DataError when the mask comes out empty.
ForegroundMask foreground_mask(const Image& target, double threshold = 0.02, int dilation = 2);

/// Mean absolute error over the mask divided by the intensity range 2.0
/// (or by mean |target| when so configured).
double nmae(const Image& pred, const Image& target, const ForegroundMask& mask,
            NmaeNormalizer normalizer = NmaeNormalizer::range);

/// 10 log10(peak^2 / MSE) with peak = 2.0 over the mask; capped for MSE -> 0.
double psnr(const Image& pred, const Image& target, const ForegroundMask& mask, double cap_db = 99.0);

/// Structural similarity with an 11x11 Gaussian window (std 1.5) and the
/// standard stabilizers scaled to data range 2.0; averaged over window
/// centers that lie inside the mask (windows fully inside the image).
double ssim(const Image& pred, const Image& target, const ForegroundMask& mask);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_pair;
};

struct MetricsReport {
    MetricSummary nmae;
    MetricSummary psnr;
    MetricSummary ssim;
    std::size_t n_pairs = 0;
};

/// Evaluates one prediction against the clean target; mask derived from target.
struct PairMetrics {
    double nmae = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

PairMetrics evaluate_pair(const Image& pred, const Image& target, const MetricsConfig& cfg = {});

MetricsReport summarize(const std::vector<PairMetrics>& per_pair);

} // namespace reggan::metrics
