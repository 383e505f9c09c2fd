#pragma once

#include <cmath>
#include <cstddef>

#include "reggan/core.hpp"
#include "reggan/rng.hpp"

namespace reggan::warp {

enum class InterpolationScheme { bilinear, nearest };

/// Affine misalignment parameters. Translation is a fraction of the image
/// size per axis; scale is multiplicative.
struct AffineParams {
    double rotation_deg = 0.0;
    double ty = 0.0;
    double tx = 0.0;
    double sy = 1.0;
    double sx = 1.0;

    bool is_identity() const {
        return rotation_deg == 0.0 && ty == 0.0 && tx == 0.0 && sy == 1.0 && sx == 1.0;
    }
};

inline constexpr double kBackground = -1.0;

// ---------------------------------------------------------------------------
// Low-level kernels, templated on scalar type so the training tape can run
// them in float while oracles and gradient checks run in double. Layouts are
// row-major; img is C*H*W, field is two H*W planes (dy then dx).
// ---------------------------------------------------------------------------

/// Backward warp: out(p) = img(p + field(p)), bilinear taps outside the grid
/// read the background value.
template <class T>
void resample_bilinear_fwd(const T* img, int channels, int h, int w,
                           const T* fdy, const T* fdx, T* out) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const T sy = static_cast<T>(y) + fdy[i];
            const T sx = static_cast<T>(x) + fdx[i];
            const int y0 = static_cast<int>(std::floor(sy));
            const int x0 = static_cast<int>(std::floor(sx));
            const T wy = sy - static_cast<T>(y0);
            const T wx = sx - static_cast<T>(x0);
            for (int c = 0; c < channels; ++c) {
                const T* p = img + c * plane;
                auto tap = [&](int yy, int xx) -> T {
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w) return static_cast<T>(kBackground);
                    return p[static_cast<std::size_t>(yy) * w + xx];
                };
                const T t00 = tap(y0, x0), t01 = tap(y0, x0 + 1);
                const T t10 = tap(y0 + 1, x0), t11 = tap(y0 + 1, x0 + 1);
                const T top = t00 + wx * (t01 - t00);
                const T bot = t10 + wx * (t11 - t10);
                out[c * plane + i] = top + wy * (bot - top);
            }
        }
    }
}

/// Gradients of resample_bilinear_fwd. Any of d_img/d_fdy/d_fdx may be null;
/// non-null buffers are accumulated into (callers zero them beforehand).
template <class T>
void resample_bilinear_bwd(const T* img, int channels, int h, int w,
                           const T* fdy, const T* fdx, const T* d_out,
                           T* d_img, T* d_fdy, T* d_fdx) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const T sy = static_cast<T>(y) + fdy[i];
            const T sx = static_cast<T>(x) + fdx[i];
            const int y0 = static_cast<int>(std::floor(sy));
            const int x0 = static_cast<int>(std::floor(sx));
            const T wy = sy - static_cast<T>(y0);
            const T wx = sx - static_cast<T>(x0);
            T gsy = 0, gsx = 0;
            for (int c = 0; c < channels; ++c) {
                const T* p = img + c * plane;
                const T go = d_out[c * plane + i];
                if (go == T(0) && d_img == nullptr) continue;
                auto in_bounds = [&](int yy, int xx) { return yy >= 0 && yy < h && xx >= 0 && xx < w; };
                auto tap = [&](int yy, int xx) -> T {
                    return in_bounds(yy, xx) ? p[static_cast<std::size_t>(yy) * w + xx]
                                             : static_cast<T>(kBackground);
                };
                const T t00 = tap(y0, x0), t01 = tap(y0, x0 + 1);
                const T t10 = tap(y0 + 1, x0), t11 = tap(y0 + 1, x0 + 1);
                if (d_img != nullptr) {
                    T* dp = d_img + c * plane;
                    auto add = [&](int yy, int xx, T wgt) {
                        if (in_bounds(yy, xx)) dp[static_cast<std::size_t>(yy) * w + xx] += go * wgt;
                    };
                    add(y0, x0, (T(1) - wy) * (T(1) - wx));
                    add(y0, x0 + 1, (T(1) - wy) * wx);
                    add(y0 + 1, x0, wy * (T(1) - wx));
                    add(y0 + 1, x0 + 1, wy * wx);
                }
                gsy += go * ((T(1) - wx) * (t10 - t00) + wx * (t11 - t01));
                gsx += go * ((T(1) - wy) * (t01 - t00) + wy * (t11 - t10));
            }
            if (d_fdy != nullptr) d_fdy[i] += gsy;
            if (d_fdx != nullptr) d_fdx[i] += gsx;
        }
    }
}

/// Nearest-neighbour warp (not differentiable; evaluation and oracles only).
template <class T>
void resample_nearest_fwd(const T* img, int channels, int h, int w,
                          const T* fdy, const T* fdx, T* out) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const int sy = static_cast<int>(std::lround(static_cast<double>(y) + fdy[i]));
            const int sx = static_cast<int>(std::lround(static_cast<double>(x) + fdx[i]));
            const bool in = sy >= 0 && sy < h && sx >= 0 && sx < w;
            for (int c = 0; c < channels; ++c) {
                out[c * plane + i] = in ? img[c * plane + static_cast<std::size_t>(sy) * w + sx]
                                        : static_cast<T>(kBackground);
            }
        }
    }
}

/// Mean over pixels of the summed squared forward differences of both
/// displacement components; trailing row/column differences count as zero.
template <class T>
T smoothness_fwd(const T* fdy, const T* fdx, int h, int w) {
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w) {
                const double gy = static_cast<double>(fdy[i + 1]) - fdy[i];
                const double gx = static_cast<double>(fdx[i + 1]) - fdx[i];
                acc += gy * gy + gx * gx;
            }
            if (y + 1 < h) {
                const double gy = static_cast<double>(fdy[i + w]) - fdy[i];
                const double gx = static_cast<double>(fdx[i + w]) - fdx[i];
                acc += gy * gy + gx * gx;
            }
        }
    }
    return static_cast<T>(acc / (static_cast<double>(h) * w));
}

/// d(smoothness)/d(field), scaled by upstream scalar gradient d_out.
template <class T>
void smoothness_bwd(const T* fdy, const T* fdx, int h, int w, T d_out, T* d_fdy, T* d_fdx) {
    const T norm = d_out * static_cast<T>(2.0 / (static_cast<double>(h) * w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w) {
                const T gy = fdy[i + 1] - fdy[i];
                const T gx = fdx[i + 1] - fdx[i];
                d_fdy[i + 1] += norm * gy;
                d_fdy[i] -= norm * gy;
                d_fdx[i + 1] += norm * gx;
                d_fdx[i] -= norm * gx;
            }
            if (y + 1 < h) {
                const T gy = fdy[i + w] - fdy[i];
                const T gx = fdx[i + w] - fdx[i];
                d_fdy[i + w] += norm * gy;
                d_fdy[i] -= norm * gy;
                d_fdx[i + w] += norm * gx;
                d_fdx[i] -= norm * gx;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Image/field level operations (double precision).
// ---------------------------------------------------------------------------

/// Backward warp of an image: out(p) = image(p + field(p)).
Image resample(const Image& image, const DeformationField& field,
               InterpolationScheme scheme = InterpolationScheme::bilinear);

/// Field u with resample(img, u) ~= resample(resample(img, first), second):
/// u(p) = second(p) + first(p + second(p)), `first` looked up bilinearly with
/// clamped borders.
DeformationField compose(const DeformationField& first, const DeformationField& second);

/// Fixed-point inversion v <- -field(p + v(p)). Throws NumericError with the
/// residual if max |compose(field, v)| stays above tol after max_iters.
DeformationField invert(const DeformationField& field, int max_iters = 50, double tol = 0.01);

/// Mean squared forward-difference gradient of the field (the smoothness
/// functional used as the registration regularizer).
double smoothness(const DeformationField& field);

/// Displacement field of the affine map about the image center:
/// field(p) = A*(p - c) + t*size + c - p with A = R(rotation) * diag(scale).
DeformationField affine_to_field(const AffineParams& params, int height, int width);

struct ElasticFieldParams {
    int grid = 8;          // control points per axis
    double sigma = 4.0;    // Gaussian smoothing std, pixels
    double magnitude = 0.03; // max control displacement, fraction of image size
};

/// Uniform control-point displacements, bilinearly upsampled and Gaussian
/// smoothed (normalized kernel, so |displacement| never exceeds the control
/// magnitude). Deterministic for a given rng state.
DeformationField random_elastic_field(const ElasticFieldParams& params, int height, int width, Rng& rng);

double max_displacement(const DeformationField& field);

/// Separable Gaussian blur with a per-position renormalized (convex) kernel.
void gaussian_blur_plane(std::vector<double>& plane, int h, int w, double sigma);

} // namespace reggan::warp
