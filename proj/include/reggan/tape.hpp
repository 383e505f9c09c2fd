#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "reggan/detail/gemm.hpp"
#include "reggan/errors.hpp"
#include "reggan/tensor.hpp"
#include "reggan/warp.hpp"

namespace reggan::nn {

/// Trainable tensor with gradient accumulator and Adam moments.
template <class T>
struct ParamT {
    std::string name;
    TensorT<T> value;
    TensorT<T> grad;
    TensorT<T> m;
    TensorT<T> v;

    void init(std::string n, TensorT<T> val) {
        name = std::move(n);
        grad = TensorT<T>(val.dims);
        m = TensorT<T>(val.dims);
        v = TensorT<T>(val.dims);
        value = std::move(val);
    }
    void zero_grad() { std::fill(grad.v.begin(), grad.v.end(), T(0)); }
};

/// Dynamic reverse-mode tape. Forward values are computed eagerly as nodes
/// are appended; backward() walks ancestors of a scalar root. The tape may
/// keep growing after a backward pass (one tape serves the discriminator and
/// generator phases of a GAN step), so closures address nodes by id, never by
/// pointer.
template <class T>
class TapeT {
  public:
    using BackFn = std::function<void(TapeT&, int)>;

    struct Node {
        TensorT<T> value;
        TensorT<T> grad;
        ParamT<T>* param = nullptr;
        std::vector<int> parents;
        BackFn back;
        bool needs_grad = false;
    };

    int leaf(TensorT<T> value, bool needs_grad = false) {
        Node n;
        n.value = std::move(value);
        n.needs_grad = needs_grad;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    int param(ParamT<T>& p) {
        Node n;
        n.value = p.value; // snapshot; params mutate only between steps
        n.param = &p;
        n.needs_grad = true;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    int add_node(TensorT<T> value, std::vector<int> parents, BackFn back) {
        Node n;
        n.value = std::move(value);
        n.parents = std::move(parents);
        for (int p : n.parents) {
            if (nodes_[static_cast<std::size_t>(p)].needs_grad) {
                n.needs_grad = true;
                break;
            }
        }
        n.back = std::move(back);
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    const TensorT<T>& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    TensorT<T>& grad_buf(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }

    bool wants_grad(int id) const {
        return id < static_cast<int>(marked_.size()) && marked_[static_cast<std::size_t>(id)] != 0;
    }

    /// Accumulates gradients of `root` (a scalar node) into marked ancestors
    /// and then into bound parameter .grad buffers.
    void backward(int root) {
        if (val(root).size() != 1) {
            throw NumericError("tape backward: root must be a scalar node");
        }
        marked_.assign(nodes_.size(), 0);
        std::vector<int> stack{root};
        marked_[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            for (int p : nodes_[static_cast<std::size_t>(id)].parents) {
                auto& pn = nodes_[static_cast<std::size_t>(p)];
                if (!marked_[static_cast<std::size_t>(p)] && pn.needs_grad) {
                    marked_[static_cast<std::size_t>(p)] = 1;
                    stack.push_back(p);
                }
            }
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (marked_[i]) nodes_[i].grad = TensorT<T>(nodes_[i].value.dims);
        }
        nodes_[static_cast<std::size_t>(root)].grad.v[0] = T(1);
        for (int id = root; id >= 0; --id) {
            if (!marked_[static_cast<std::size_t>(id)]) continue;
            auto& n = nodes_[static_cast<std::size_t>(id)];
            if (n.back) n.back(*this, id);
            if (n.param != nullptr) {
                auto& pg = n.param->grad.v;
                const auto& g = n.grad.v;
                for (std::size_t k = 0; k < pg.size(); ++k) pg[k] += g[k];
            }
        }
    }

    std::size_t node_count() const { return nodes_.size(); }

  private:
    std::vector<Node> nodes_;
    std::vector<char> marked_;
};

// ---------------------------------------------------------------------------
// Ops. Each returns the id of the freshly appended node.
// ---------------------------------------------------------------------------

template <class T>
int detach(TapeT<T>& t, int x) {
    return t.leaf(t.val(x), false);
}

namespace detail {

inline int conv_out_extent(int in, int k, int stride, int pad) {
    const int span = in + 2 * pad - k;
    if (span < 0) return 0;
    return span / stride + 1;
}

template <class T>
void im2col(const T* x, int ci, int h, int w, int kh, int kw, int stride, int pad, int ho, int wo,
            T* col) {
    // col is (ci*kh*kw) x (ho*wo)
    const std::size_t ncols = static_cast<std::size_t>(ho) * wo;
    for (int c = 0; c < ci; ++c) {
        const T* plane = x + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                T* row = col + (static_cast<std::size_t>((c * kh + ky) * kw + kx)) * ncols;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    T* dst = row + static_cast<std::size_t>(oy) * wo;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst, dst + wo, T(0));
                        continue;
                    }
                    const T* src = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
                    }
                }
            }
        }
    }
}

template <class T>
void col2im_accum(const T* col, int ci, int h, int w, int kh, int kw, int stride, int pad, int ho,
                  int wo, T* dx) {
    const std::size_t ncols = static_cast<std::size_t>(ho) * wo;
    for (int c = 0; c < ci; ++c) {
        T* plane = dx + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const T* row = col + (static_cast<std::size_t>((c * kh + ky) * kw + kx)) * ncols;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    T* dst = plane + static_cast<std::size_t>(iy) * w;
                    const T* src = row + static_cast<std::size_t>(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

template <class T>
std::vector<T>& col_scratch() {
    thread_local std::vector<T> buf;
    return buf;
}

} // namespace detail

/// 2D convolution, x {Ci,H,W} * w {Co,Ci,kh,kw} + b {Co} -> {Co,Ho,Wo}.
template <class T>
int conv2d(TapeT<T>& t, int x, ParamT<T>& weight, ParamT<T>& bias, int stride, int pad) {
    const auto& xv = t.val(x);
    if (xv.dims.size() != 3) throw DataError("conv2d: input must be {C,H,W}");
    const int ci = xv.dim(0), h = xv.dim(1), w = xv.dim(2);
    const int co = weight.value.dim(0), kh = weight.value.dim(2), kw = weight.value.dim(3);
    if (weight.value.dim(1) != ci) throw DataError("conv2d: channel mismatch");
    const int ho = detail::conv_out_extent(h, kh, stride, pad);
    const int wo = detail::conv_out_extent(w, kw, stride, pad);
    if (ho < 1 || wo < 1) {
        throw DataError("conv2d: input " + std::to_string(h) + "x" + std::to_string(w) +
                        " too small for kernel " + std::to_string(kh) + " stride " + std::to_string(stride));
    }
    const int kdim = ci * kh * kw;
    const std::size_t ncols = static_cast<std::size_t>(ho) * wo;
    auto& col = detail::col_scratch<T>();
    col.resize(static_cast<std::size_t>(kdim) * ncols);
    detail::im2col(xv.data(), ci, h, w, kh, kw, stride, pad, ho, wo, col.data());

    TensorT<T> out({co, ho, wo});
    detail::gemm_rm(false, false, co, static_cast<int>(ncols), kdim, T(1), weight.value.data(), kdim,
                    col.data(), static_cast<int>(ncols), T(0), out.data(), static_cast<int>(ncols));
    for (int c = 0; c < co; ++c) {
        T* plane = out.data() + static_cast<std::size_t>(c) * ncols;
        const T b = bias.value.v[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < ncols; ++i) plane[i] += b;
    }

    const int wid = t.param(weight);
    const int bid = t.param(bias);
    return t.add_node(std::move(out), {x, wid, bid},
                      [x, wid, bid, ci, h, w, kh, kw, stride, pad, ho, wo, co, kdim](TapeT<T>& tp, int self) {
                          const std::size_t ncols2 = static_cast<std::size_t>(ho) * wo;
                          const auto& go = tp.grad_buf(self);
                          // bias gradient
                          if (tp.wants_grad(bid)) {
                              auto& db = tp.grad_buf(bid);
                              for (int c = 0; c < co; ++c) {
                                  T acc = 0;
                                  const T* plane = go.data() + static_cast<std::size_t>(c) * ncols2;
                                  for (std::size_t i = 0; i < ncols2; ++i) acc += plane[i];
                                  db.v[static_cast<std::size_t>(c)] += acc;
                              }
                          }
                          const auto& xv2 = tp.val(x);
                          if (tp.wants_grad(wid)) {
                              auto& col2 = detail::col_scratch<T>();
                              col2.resize(static_cast<std::size_t>(kdim) * ncols2);
                              detail::im2col(xv2.data(), ci, h, w, kh, kw, stride, pad, ho, wo, col2.data());
                              // dW += go(co x ncols) * col^T(ncols x kdim)
                              detail::gemm_rm(false, true, co, kdim, static_cast<int>(ncols2), T(1),
                                              go.data(), static_cast<int>(ncols2), col2.data(),
                                              static_cast<int>(ncols2), T(1), tp.grad_buf(wid).data(), kdim);
                          }
                          if (tp.wants_grad(x)) {
                              const auto& wv = tp.val(wid);
                              std::vector<T> dcol(static_cast<std::size_t>(kdim) * ncols2);
                              // dcol = W^T(kdim x co) * go(co x ncols)
                              detail::gemm_rm(true, false, kdim, static_cast<int>(ncols2), co, T(1),
                                              wv.data(), kdim, go.data(), static_cast<int>(ncols2), T(0),
                                              dcol.data(), static_cast<int>(ncols2));
                              detail::col2im_accum(dcol.data(), ci, h, w, kh, kw, stride, pad, ho, wo,
                                                   tp.grad_buf(x).data());
                          }
                      });
}

template <class T>
int upsample_nearest2(TapeT<T>& t, int x) {
    const auto& xv = t.val(x);
    const int c = xv.dim(0), h = xv.dim(1), w = xv.dim(2);
    TensorT<T> out({c, 2 * h, 2 * w});
    for (int ch = 0; ch < c; ++ch) {
        const T* src = xv.data() + static_cast<std::size_t>(ch) * h * w;
        T* dst = out.data() + static_cast<std::size_t>(ch) * 4 * h * w;
        for (int y = 0; y < 2 * h; ++y) {
            const T* srow = src + static_cast<std::size_t>(y / 2) * w;
            T* drow = dst + static_cast<std::size_t>(y) * 2 * w;
            for (int xx = 0; xx < 2 * w; ++xx) drow[xx] = srow[xx / 2];
        }
    }
    return t.add_node(std::move(out), {x}, [x, c, h, w](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(x)) return;
        const auto& go = tp.grad_buf(self);
        auto& dx = tp.grad_buf(x);
        for (int ch = 0; ch < c; ++ch) {
            const T* gsrc = go.data() + static_cast<std::size_t>(ch) * 4 * h * w;
            T* gdst = dx.data() + static_cast<std::size_t>(ch) * h * w;
            for (int y = 0; y < 2 * h; ++y) {
                const T* grow = gsrc + static_cast<std::size_t>(y) * 2 * w;
                T* drow = gdst + static_cast<std::size_t>(y / 2) * w;
                for (int xx = 0; xx < 2 * w; ++xx) drow[xx / 2] += grow[xx];
            }
        }
    });
}

/// Per-channel normalization over the spatial extent, affine parameters gamma/beta.
template <class T>
int instance_norm(TapeT<T>& t, int x, ParamT<T>& gamma, ParamT<T>& beta, T eps = T(1e-5)) {
    const auto& xv = t.val(x);
    const int c = xv.dim(0), h = xv.dim(1), w = xv.dim(2);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    TensorT<T> out(xv.dims);
    for (int ch = 0; ch < c; ++ch) {
        const T* src = xv.data() + ch * plane;
        T* dst = out.data() + ch * plane;
        T mu = 0;
        for (std::size_t i = 0; i < plane; ++i) mu += src[i];
        mu /= static_cast<T>(plane);
        T var = 0;
        for (std::size_t i = 0; i < plane; ++i) {
            const T d = src[i] - mu;
            var += d * d;
        }
        var /= static_cast<T>(plane);
        const T istd = T(1) / std::sqrt(var + eps);
        const T g = gamma.value.v[static_cast<std::size_t>(ch)];
        const T b = beta.value.v[static_cast<std::size_t>(ch)];
        for (std::size_t i = 0; i < plane; ++i) dst[i] = g * (src[i] - mu) * istd + b;
    }
    const int gid = t.param(gamma);
    const int bid = t.param(beta);
    return t.add_node(std::move(out), {x, gid, bid}, [x, gid, bid, c, h, w, eps](TapeT<T>& tp, int self) {
        const std::size_t plane = static_cast<std::size_t>(h) * w;
        const auto& go = tp.grad_buf(self);
        const auto& xv2 = tp.val(x);
        const auto& gv = tp.val(gid);
        for (int ch = 0; ch < c; ++ch) {
            const T* src = xv2.data() + ch * plane;
            const T* g = go.data() + ch * plane;
            T mu = 0;
            for (std::size_t i = 0; i < plane; ++i) mu += src[i];
            mu /= static_cast<T>(plane);
            T var = 0;
            for (std::size_t i = 0; i < plane; ++i) {
                const T d = src[i] - mu;
                var += d * d;
            }
            var /= static_cast<T>(plane);
            const T istd = T(1) / std::sqrt(var + eps);
            T sum_g = 0, sum_gx = 0;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_g += g[i];
                sum_gx += g[i] * (src[i] - mu) * istd;
            }
            if (tp.wants_grad(gid)) tp.grad_buf(gid).v[static_cast<std::size_t>(ch)] += sum_gx;
            if (tp.wants_grad(bid)) tp.grad_buf(bid).v[static_cast<std::size_t>(ch)] += sum_g;
            if (tp.wants_grad(x)) {
                T* dx = tp.grad_buf(x).data() + ch * plane;
                const T gam = gv.v[static_cast<std::size_t>(ch)];
                const T mean_g = sum_g / static_cast<T>(plane);
                const T mean_gx = sum_gx / static_cast<T>(plane);
                for (std::size_t i = 0; i < plane; ++i) {
                    const T xhat = (src[i] - mu) * istd;
                    dx[i] += gam * istd * (g[i] - mean_g - xhat * mean_gx);
                }
            }
        }
    });
}

template <class T>
int leaky_relu(TapeT<T>& t, int x, T slope) {
    const auto& xv = t.val(x);
    TensorT<T> out(xv.dims);
    for (std::size_t i = 0; i < xv.size(); ++i) out.v[i] = xv.v[i] > T(0) ? xv.v[i] : slope * xv.v[i];
    return t.add_node(std::move(out), {x}, [x, slope](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(x)) return;
        const auto& go = tp.grad_buf(self);
        const auto& xv2 = tp.val(x);
        auto& dx = tp.grad_buf(x);
        for (std::size_t i = 0; i < xv2.size(); ++i) {
            dx.v[i] += go.v[i] * (xv2.v[i] > T(0) ? T(1) : slope);
        }
    });
}

template <class T>
int relu(TapeT<T>& t, int x) {
    return leaky_relu(t, x, T(0));
}

template <class T>
int tanh_op(TapeT<T>& t, int x) {
    const auto& xv = t.val(x);
    TensorT<T> out(xv.dims);
    for (std::size_t i = 0; i < xv.size(); ++i) out.v[i] = std::tanh(xv.v[i]);
    return t.add_node(std::move(out), {x}, [x](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(x)) return;
        const auto& go = tp.grad_buf(self);
        const auto& yv = tp.val(self);
        auto& dx = tp.grad_buf(x);
        for (std::size_t i = 0; i < yv.size(); ++i) dx.v[i] += go.v[i] * (T(1) - yv.v[i] * yv.v[i]);
    });
}

template <class T>
int add(TapeT<T>& t, int a, int b) {
    const auto& av = t.val(a);
    const auto& bv = t.val(b);
    if (!av.same_dims(bv)) throw DataError("add: shape mismatch");
    TensorT<T> out(av.dims);
    for (std::size_t i = 0; i < av.size(); ++i) out.v[i] = av.v[i] + bv.v[i];
    return t.add_node(std::move(out), {a, b}, [a, b](TapeT<T>& tp, int self) {
        const auto& go = tp.grad_buf(self);
        for (int pid : {a, b}) {
            if (!tp.wants_grad(pid)) continue;
            auto& d = tp.grad_buf(pid);
            for (std::size_t i = 0; i < go.size(); ++i) d.v[i] += go.v[i];
        }
    });
}

template <class T>
int concat_channels(TapeT<T>& t, int a, int b) {
    const auto& av = t.val(a);
    const auto& bv = t.val(b);
    if (av.dim(1) != bv.dim(1) || av.dim(2) != bv.dim(2)) {
        throw DataError("concat_channels: spatial shape mismatch");
    }
    TensorT<T> out({av.dim(0) + bv.dim(0), av.dim(1), av.dim(2)});
    std::copy(av.v.begin(), av.v.end(), out.v.begin());
    std::copy(bv.v.begin(), bv.v.end(), out.v.begin() + static_cast<std::ptrdiff_t>(av.size()));
    return t.add_node(std::move(out), {a, b}, [a, b](TapeT<T>& tp, int self) {
        const auto& go = tp.grad_buf(self);
        const std::size_t na = tp.val(a).size();
        if (tp.wants_grad(a)) {
            auto& da = tp.grad_buf(a);
            for (std::size_t i = 0; i < na; ++i) da.v[i] += go.v[i];
        }
        if (tp.wants_grad(b)) {
            auto& db = tp.grad_buf(b);
            for (std::size_t i = 0; i < db.size(); ++i) db.v[i] += go.v[na + i];
        }
    });
}

/// Differentiable backward warp: img {C,H,W} sampled at p + field(p),
/// field {2,H,W} in pixel units, out-of-grid taps read the background value.
template <class T>
int resample(TapeT<T>& t, int img, int field) {
    const auto& iv = t.val(img);
    const auto& fv = t.val(field);
    if (fv.dims.size() != 3 || fv.dim(0) != 2 || fv.dim(1) != iv.dim(1) || fv.dim(2) != iv.dim(2)) {
        throw DataError("resample: field must be {2,H,W} matching the image");
    }
    const int c = iv.dim(0), h = iv.dim(1), w = iv.dim(2);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    TensorT<T> out(iv.dims);
    warp::resample_bilinear_fwd(iv.data(), c, h, w, fv.data(), fv.data() + plane, out.data());
    return t.add_node(std::move(out), {img, field}, [img, field, c, h, w](TapeT<T>& tp, int self) {
        const std::size_t plane2 = static_cast<std::size_t>(h) * w;
        const auto& iv2 = tp.val(img);
        const auto& fv2 = tp.val(field);
        const auto& go = tp.grad_buf(self);
        T* d_img = tp.wants_grad(img) ? tp.grad_buf(img).data() : nullptr;
        T* d_fdy = tp.wants_grad(field) ? tp.grad_buf(field).data() : nullptr;
        T* d_fdx = d_fdy != nullptr ? d_fdy + plane2 : nullptr;
        warp::resample_bilinear_bwd(iv2.data(), c, h, w, fv2.data(), fv2.data() + plane2, go.data(),
                                    d_img, d_fdy, d_fdx);
    });
}

/// Scalar mean |a - b|.
template <class T>
int mean_abs_diff(TapeT<T>& t, int a, int b) {
    const auto& av = t.val(a);
    const auto& bv = t.val(b);
    if (!av.same_dims(bv)) throw DataError("mean_abs_diff: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(static_cast<double>(av.v[i]) - bv.v[i]);
    const T n = static_cast<T>(av.size());
    return t.add_node(TensorT<T>::scalar(static_cast<T>(acc) / n), {a, b},
                      [a, b, n](TapeT<T>& tp, int self) {
                          const T go = tp.grad_buf(self).v[0] / n;
                          const auto& av2 = tp.val(a);
                          const auto& bv2 = tp.val(b);
                          const bool wa = tp.wants_grad(a), wb = tp.wants_grad(b);
                          for (std::size_t i = 0; i < av2.size(); ++i) {
                              const T d = av2.v[i] - bv2.v[i];
                              const T s = d > T(0) ? go : (d < T(0) ? -go : T(0));
                              if (wa) tp.grad_buf(a).v[i] += s;
                              if (wb) tp.grad_buf(b).v[i] -= s;
                          }
                      });
}

/// Scalar mean squared forward-difference gradient of a {2,H,W} field.
template <class T>
int smoothness(TapeT<T>& t, int field) {
    const auto& fv = t.val(field);
    if (fv.dims.size() != 3 || fv.dim(0) != 2) throw DataError("smoothness: field must be {2,H,W}");
    const int h = fv.dim(1), w = fv.dim(2);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    const T loss = warp::smoothness_fwd(fv.data(), fv.data() + plane, h, w);
    return t.add_node(TensorT<T>::scalar(loss), {field}, [field, h, w](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(field)) return;
        const std::size_t plane2 = static_cast<std::size_t>(h) * w;
        const auto& fv2 = tp.val(field);
        auto& df = tp.grad_buf(field);
        warp::smoothness_bwd(fv2.data(), fv2.data() + plane2, h, w, tp.grad_buf(self).v[0],
                             df.data(), df.data() + plane2);
    });
}

namespace detail {
template <class T>
T softplus(T x) {
    return x > T(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
template <class T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}
} // namespace detail

/// Scalar mean softplus(sign * x); softplus(-x) = -log(sigmoid(x)) exactly,
/// which is the numerically stable form of the logarithmic adversarial terms.
template <class T>
int mean_softplus(TapeT<T>& t, int x, T sign) {
    const auto& xv = t.val(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) acc += detail::softplus(sign * static_cast<double>(xv.v[i]));
    const T n = static_cast<T>(xv.size());
    return t.add_node(TensorT<T>::scalar(static_cast<T>(acc) / n), {x}, [x, sign, n](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(x)) return;
        const T go = tp.grad_buf(self).v[0] / n;
        const auto& xv2 = tp.val(x);
        auto& dx = tp.grad_buf(x);
        for (std::size_t i = 0; i < xv2.size(); ++i) {
            dx.v[i] += go * sign * detail::sigmoid(sign * xv2.v[i]);
        }
    });
}

/// Scalar mean (x - target)^2 (least-squares adversarial option).
template <class T>
int mean_square_error(TapeT<T>& t, int x, T target) {
    const auto& xv = t.val(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double d = static_cast<double>(xv.v[i]) - target;
        acc += d * d;
    }
    const T n = static_cast<T>(xv.size());
    return t.add_node(TensorT<T>::scalar(static_cast<T>(acc) / n), {x}, [x, target, n](TapeT<T>& tp, int self) {
        if (!tp.wants_grad(x)) return;
        const T go = tp.grad_buf(self).v[0] * T(2) / n;
        const auto& xv2 = tp.val(x);
        auto& dx = tp.grad_buf(x);
        for (std::size_t i = 0; i < xv2.size(); ++i) dx.v[i] += go * (xv2.v[i] - target);
    });
}

/// Weighted sum of scalar nodes.
template <class T>
int weighted_sum(TapeT<T>& t, const std::vector<std::pair<T, int>>& terms) {
    double acc = 0.0;
    std::vector<int> parents;
    parents.reserve(terms.size());
    for (const auto& [coef, id] : terms) {
        if (t.val(id).size() != 1) throw NumericError("weighted_sum: all terms must be scalars");
        acc += static_cast<double>(coef) * t.val(id).v[0];
        parents.push_back(id);
    }
    auto coefs = terms;
    return t.add_node(TensorT<T>::scalar(static_cast<T>(acc)), std::move(parents),
                      [coefs](TapeT<T>& tp, int self) {
                          const T go = tp.grad_buf(self).v[0];
                          for (const auto& [coef, id] : coefs) {
                              if (tp.wants_grad(id)) tp.grad_buf(id).v[0] += go * coef;
                          }
                      });
}

/// Adam with L2 weight decay folded into the gradient.
template <class T>
struct AdamT {
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-4;
    long step_count = 0;

    void step(const std::vector<ParamT<T>*>& params) {
        ++step_count;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        for (ParamT<T>* p : params) {
            auto& w = p->value.v;
            auto& g = p->grad.v;
            auto& m = p->m.v;
            auto& v = p->v.v;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double gi = static_cast<double>(g[i]) + weight_decay * static_cast<double>(w[i]);
                m[i] = static_cast<T>(beta1 * m[i] + (1.0 - beta1) * gi);
                v[i] = static_cast<T>(beta2 * v[i] + (1.0 - beta2) * gi * gi);
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                w[i] = static_cast<T>(w[i] - lr * mhat / (std::sqrt(vhat) + eps));
            }
        }
    }
};

} // namespace reggan::nn
