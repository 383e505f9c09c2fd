#include "reggan/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "reggan/errors.hpp"

namespace reggan::metrics {

std::size_t ForegroundMask::count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
}

ForegroundMask foreground_mask(const Image& target, double threshold, int dilation) {
    const int h = target.height, w = target.width;
    ForegroundMask out;
    out.height = h;
    out.width = w;
    out.mask.assign(static_cast<std::size_t>(h) * w, 0);
    const double cut = -1.0 + threshold;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (target.at(y, x) > cut) out.mask[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    if (dilation > 0) {
        std::vector<std::uint8_t> dil(out.mask.size(), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!out.mask[static_cast<std::size_t>(y) * w + x]) continue;
                const int y0 = std::max(0, y - dilation), y1 = std::min(h - 1, y + dilation);
                const int x0 = std::max(0, x - dilation), x1 = std::min(w - 1, x + dilation);
                for (int yy = y0; yy <= y1; ++yy) {
                    for (int xx = x0; xx <= x1; ++xx) {
                        dil[static_cast<std::size_t>(yy) * w + xx] = 1;
                    }
                }
            }
        }
        out.mask = std::move(dil);
    }
    if (out.count() == 0) {
        throw DataError("foreground_mask: mask is empty (all-background target)");
    }
    return out;
}

namespace {

void require_match(const Image& pred, const Image& target, const ForegroundMask& mask, const char* op) {
    if (!pred.same_shape(target) || pred.height != mask.height || pred.width != mask.width) {
        throw DataError(std::string(op) + ": shape mismatch between pred, target, and mask");
    }
    if (mask.count() == 0) throw DataError(std::string(op) + ": empty mask");
}

} // namespace

double nmae(const Image& pred, const Image& target, const ForegroundMask& mask,
            NmaeNormalizer normalizer) {
    require_match(pred, target, mask, "nmae");
    double acc = 0.0, tacc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        if (!mask.mask[i]) continue;
        acc += std::abs(pred.data[i] - target.data[i]);
        tacc += std::abs(target.data[i]);
        ++n;
    }
    const double mae = acc / static_cast<double>(n);
    if (normalizer == NmaeNormalizer::range) return mae / 2.0;
    const double denom = tacc / static_cast<double>(n);
    if (denom <= 0.0) throw DataError("nmae: mean |target| normalizer is zero");
    return mae / denom;
}

double psnr(const Image& pred, const Image& target, const ForegroundMask& mask, double cap_db) {
    require_match(pred, target, mask, "psnr");
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        if (!mask.mask[i]) continue;
        const double d = pred.data[i] - target.data[i];
        acc += d * d;
        ++n;
    }
    const double mse = acc / static_cast<double>(n);
    constexpr double peak = 2.0;
    if (mse <= 0.0) return cap_db;
    return std::min(cap_db, 10.0 * std::log10(peak * peak / mse));
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

const std::vector<double>& ssim_kernel() {
    static const std::vector<double> k = [] {
        std::vector<double> kk(static_cast<std::size_t>(kSsimWindow) * kSsimWindow);
        const int r = kSsimWindow / 2;
        double sum = 0.0;
        for (int y = -r; y <= r; ++y) {
            for (int x = -r; x <= r; ++x) {
                const double v = std::exp(-0.5 * (y * y + x * x) / (kSsimSigma * kSsimSigma));
                kk[static_cast<std::size_t>(y + r) * kSsimWindow + (x + r)] = v;
                sum += v;
            }
        }
        for (auto& v : kk) v /= sum;
        return kk;
    }();
    return k;
}

} // namespace

double ssim(const Image& pred, const Image& target, const ForegroundMask& mask) {
    require_match(pred, target, mask, "ssim");
    const int h = pred.height, w = pred.width;
    const int r = kSsimWindow / 2;
    if (h < kSsimWindow || w < kSsimWindow) {
        throw DataError("ssim: image smaller than the 11x11 window");
    }
    constexpr double range = 2.0;
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);
    const auto& kern = ssim_kernel();
    double acc = 0.0;
    std::size_t n = 0;
    for (int y = r; y < h - r; ++y) {
        for (int x = r; x < w - r; ++x) {
            if (!mask.at(y, x)) continue;
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int ky = -r; ky <= r; ++ky) {
                for (int kx = -r; kx <= r; ++kx) {
                    const double kv = kern[static_cast<std::size_t>(ky + r) * kSsimWindow + (kx + r)];
                    const double a = pred.at(y + ky, x + kx);
                    const double b = target.at(y + ky, x + kx);
                    mx += kv * a;
                    my += kv * b;
                    sxx += kv * a * a;
                    syy += kv * b * b;
                    sxy += kv * a * b;
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cov = sxy - mx * my;
            acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++n;
        }
    }
    if (n == 0) throw DataError("ssim: no window centers inside the mask");
    return acc / static_cast<double>(n);
}

PairMetrics evaluate_pair(const Image& pred, const Image& target, const MetricsConfig& cfg) {
    const auto mask = foreground_mask(target, cfg.foreground_threshold, cfg.foreground_dilation);
    PairMetrics m;
    m.nmae = nmae(pred, target, mask, cfg.nmae_normalizer);
    m.psnr = psnr(pred, target, mask, cfg.psnr_cap_db);
    m.ssim = ssim(pred, target, mask);
    return m;
}

namespace {

MetricSummary summarize_values(std::vector<double> values) {
    MetricSummary s;
    s.per_pair = std::move(values);
    const std::size_t n = s.per_pair.size();
    if (n == 0) return s;
    double sum = 0.0;
    for (double v : s.per_pair) sum += v;
    s.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double v : s.per_pair) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(n));
    return s;
}

} // namespace

MetricsReport summarize(const std::vector<PairMetrics>& per_pair) {
    MetricsReport r;
    r.n_pairs = per_pair.size();
    std::vector<double> a, b, c;
    a.reserve(per_pair.size());
    b.reserve(per_pair.size());
    c.reserve(per_pair.size());
    for (const auto& m : per_pair) {
        a.push_back(m.nmae);
        b.push_back(m.psnr);
        c.push_back(m.ssim);
    }
    r.nmae = summarize_values(std::move(a));
    r.psnr = summarize_values(std::move(b));
    r.ssim = summarize_values(std::move(c));
    return r;
}

} // namespace reggan::metrics
