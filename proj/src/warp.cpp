#include "reggan/warp.hpp"

#include <algorithm>
#include <cmath>

#include "reggan/errors.hpp"

namespace reggan::warp {

namespace {

void require_same_shape(const DeformationField& field, int h, int w, const char* op) {
    if (field.height != h || field.width != w) {
        throw DataError(std::string(op) + ": field " + std::to_string(field.height) + "x" +
                        std::to_string(field.width) + " does not match " + std::to_string(h) + "x" +
                        std::to_string(w));
    }
}

// Bilinear lookup of one field component with clamped coordinates.
double sample_plane_clamped(const std::vector<double>& plane, int h, int w, double sy, double sx) {
    sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
    sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
    const int y0 = std::min(static_cast<int>(std::floor(sy)), h - 2 >= 0 ? h - 2 : 0);
    const int x0 = std::min(static_cast<int>(std::floor(sx)), w - 2 >= 0 ? w - 2 : 0);
    const int y1 = std::min(y0 + 1, h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const double wy = sy - y0;
    const double wx = sx - x0;
    const double t00 = plane[static_cast<std::size_t>(y0) * w + x0];
    const double t01 = plane[static_cast<std::size_t>(y0) * w + x1];
    const double t10 = plane[static_cast<std::size_t>(y1) * w + x0];
    const double t11 = plane[static_cast<std::size_t>(y1) * w + x1];
    const double top = t00 + wx * (t01 - t00);
    const double bot = t10 + wx * (t11 - t10);
    return top + wy * (bot - top);
}

} // namespace

// Weights stay convex at the borders, preserving the max-displacement bound.
void gaussian_blur_plane(std::vector<double>& plane, int h, int w, double sigma) {
    if (sigma <= 0.0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    }
    std::vector<double> tmp(plane.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int xx = x + k;
                if (xx < 0 || xx >= w) continue;
                acc += kernel[k + radius] * plane[static_cast<std::size_t>(y) * w + xx];
                wsum += kernel[k + radius];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc / wsum;
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            double acc = 0.0, wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int yy = y + k;
                if (yy < 0 || yy >= h) continue;
                acc += kernel[k + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
                wsum += kernel[k + radius];
            }
            plane[static_cast<std::size_t>(y) * w + x] = acc / wsum;
        }
    }
}

Image resample(const Image& image, const DeformationField& field, InterpolationScheme scheme) {
    require_same_shape(field, image.height, image.width, "resample");
    Image out(image.height, image.width);
    if (scheme == InterpolationScheme::bilinear) {
        resample_bilinear_fwd(image.data.data(), 1, image.height, image.width,
                              field.dy.data(), field.dx.data(), out.data.data());
    } else {
        resample_nearest_fwd(image.data.data(), 1, image.height, image.width,
                             field.dy.data(), field.dx.data(), out.data.data());
    }
    return out;
}

DeformationField compose(const DeformationField& first, const DeformationField& second) {
    if (!first.same_shape(second)) {
        throw DataError("compose: field shapes differ");
    }
    const int h = first.height, w = first.width;
    DeformationField out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double sy = y + second.dy[i];
            const double sx = x + second.dx[i];
            out.dy[i] = second.dy[i] + sample_plane_clamped(first.dy, h, w, sy, sx);
            out.dx[i] = second.dx[i] + sample_plane_clamped(first.dx, h, w, sy, sx);
        }
    }
    return out;
}

DeformationField invert(const DeformationField& field, int max_iters, double tol) {
    const int h = field.height, w = field.width;
    DeformationField inv(h, w);
    double residual = 0.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        DeformationField next(h, w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double sy = y + inv.dy[i];
                const double sx = x + inv.dx[i];
                next.dy[i] = -sample_plane_clamped(field.dy, h, w, sy, sx);
                next.dx[i] = -sample_plane_clamped(field.dx, h, w, sy, sx);
            }
        }
        inv = std::move(next);
        residual = max_displacement(compose(field, inv));
        if (residual <= tol) return inv;
    }
    throw NumericError("invert: fixed-point iteration did not reach tol=" + std::to_string(tol) +
                       " within " + std::to_string(max_iters) + " iterations (residual " +
                       std::to_string(residual) + " px)");
}

double smoothness(const DeformationField& field) {
    return smoothness_fwd(field.dy.data(), field.dx.data(), field.height, field.width);
}

DeformationField affine_to_field(const AffineParams& params, int height, int width) {
    if (!(params.sy > 0.0) || !(params.sx > 0.0) || !std::isfinite(params.rotation_deg) ||
        !std::isfinite(params.ty) || !std::isfinite(params.tx)) {
        throw DataError("affine_to_field: invalid affine parameters");
    }
    DeformationField out(height, width);
    const double cy = 0.5 * (height - 1);
    const double cx = 0.5 * (width - 1);
    const double th = params.rotation_deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(th), s = std::sin(th);
    // A = R(theta) * diag(sy, sx) acting on (dy, dx) offsets from center.
    const double a_yy = c * params.sy, a_yx = s * params.sx;
    const double a_xy = -s * params.sy, a_xx = c * params.sx;
    const double t_py = params.ty * height;
    const double t_px = params.tx * width;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const double oy = y - cy, ox = x - cx;
            const double my = a_yy * oy + a_yx * ox + t_py + cy;
            const double mx = a_xy * oy + a_xx * ox + t_px + cx;
            out.dy[i] = my - y;
            out.dx[i] = mx - x;
        }
    }
    return out;
}

DeformationField random_elastic_field(const ElasticFieldParams& params, int height, int width, Rng& rng) {
    if (params.grid < 2 || !(params.sigma > 0.0) || params.magnitude < 0.0) {
        throw DataError("random_elastic_field: invalid elastic parameters");
    }
    const int g = params.grid;
    const double mag_y = params.magnitude * height;
    const double mag_x = params.magnitude * width;
    std::vector<double> cy(static_cast<std::size_t>(g) * g), cx(static_cast<std::size_t>(g) * g);
    for (std::size_t i = 0; i < cy.size(); ++i) {
        cy[i] = rng.uniform(-mag_y, mag_y);
        cx[i] = rng.uniform(-mag_x, mag_x);
    }
    DeformationField out(height, width);
    // Bilinear upsample of the control lattice spanning the full image.
    const double step_y = (height - 1) / static_cast<double>(g - 1);
    const double step_x = (width - 1) / static_cast<double>(g - 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double gy = y / step_y;
            const double gx = x / step_x;
            int y0 = std::min(static_cast<int>(gy), g - 2);
            int x0 = std::min(static_cast<int>(gx), g - 2);
            const double wy = gy - y0, wx = gx - x0;
            auto lerp2 = [&](const std::vector<double>& v) {
                const double t00 = v[static_cast<std::size_t>(y0) * g + x0];
                const double t01 = v[static_cast<std::size_t>(y0) * g + x0 + 1];
                const double t10 = v[static_cast<std::size_t>(y0 + 1) * g + x0];
                const double t11 = v[static_cast<std::size_t>(y0 + 1) * g + x0 + 1];
                return (t00 + wx * (t01 - t00)) * (1.0 - wy) + (t10 + wx * (t11 - t10)) * wy;
            };
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            out.dy[i] = lerp2(cy);
            out.dx[i] = lerp2(cx);
        }
    }
    gaussian_blur_plane(out.dy, height, width, params.sigma);
    gaussian_blur_plane(out.dx, height, width, params.sigma);
    return out;
}

double max_displacement(const DeformationField& field) {
    double m = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        m = std::max(m, std::hypot(field.dy[i], field.dx[i]));
    }
    return m;
}

} // namespace reggan::warp
