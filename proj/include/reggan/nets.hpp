#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "reggan/rng.hpp"
#include "reggan/tape.hpp"

namespace reggan::nets {

struct GeneratorSpec {
    int base_channels = 16;
    int n_residual_blocks = 3;
    int n_down = 2;
    int n_up = 2;

    void validate() const {
        if (n_down != n_up) throw DataError("GeneratorSpec: n_down must equal n_up");
        if (n_residual_blocks < 1) throw DataError("GeneratorSpec: need at least one residual block");
        if (base_channels < 1) throw DataError("GeneratorSpec: base_channels must be positive");
    }
};

struct DiscriminatorSpec {
    int base_channels = 16;
    int n_layers = 4;

    void validate() const {
        if (n_layers < 1) throw DataError("DiscriminatorSpec: n_layers must be positive");
        if (base_channels < 1) throw DataError("DiscriminatorSpec: base_channels must be positive");
    }
};

struct RegistrationNetSpec {
    int base_channels = 8;
    int depth = 4;

    void validate() const {
        if (depth < 2) throw DataError("RegistrationNetSpec: depth must be at least 2");
        if (base_channels < 1) throw DataError("RegistrationNetSpec: base_channels must be positive");
    }
};

namespace detail {

template <class T>
nn::TensorT<T> conv_weight(int co, int ci, int k, Rng& rng, double stddev = 0.02) {
    nn::TensorT<T> w({co, ci, k, k});
    for (auto& x : w.v) x = static_cast<T>(rng.normal(0.0, stddev));
    return w;
}

} // namespace detail

/// One convolution with its parameters; optional zero init for heads that
/// must start as the identity contribution.
template <class T>
struct ConvLayerT {
    nn::ParamT<T> w;
    nn::ParamT<T> b;
    int stride = 1;
    int pad = 0;

    void init(const std::string& name, int ci, int co, int k, int stride_, int pad_, Rng& rng,
              bool zero_init = false) {
        stride = stride_;
        pad = pad_;
        if (zero_init) {
            w.init(name + ".w", nn::TensorT<T>({co, ci, k, k}));
        } else {
            w.init(name + ".w", detail::conv_weight<T>(co, ci, k, rng));
        }
        b.init(name + ".b", nn::TensorT<T>({co}));
    }

    int build(nn::TapeT<T>& t, int x) { return nn::conv2d(t, x, w, b, stride, pad); }

    void collect(std::vector<nn::ParamT<T>*>& out) {
        out.push_back(&w);
        out.push_back(&b);
    }
};

template <class T>
struct InstanceNormLayerT {
    nn::ParamT<T> gamma;
    nn::ParamT<T> beta;

    void init(const std::string& name, int channels) {
        gamma.init(name + ".gamma", nn::TensorT<T>({channels}, T(1)));
        beta.init(name + ".beta", nn::TensorT<T>({channels}));
    }

    int build(nn::TapeT<T>& t, int x) { return nn::instance_norm(t, x, gamma, beta); }

    void collect(std::vector<nn::ParamT<T>*>& out) {
        out.push_back(&gamma);
        out.push_back(&beta);
    }
};

template <class T>
struct ModuleT {
    virtual ~ModuleT() = default;
    virtual void collect(std::vector<nn::ParamT<T>*>& out) = 0;

    std::vector<nn::ParamT<T>*> params() {
        std::vector<nn::ParamT<T>*> out;
        collect(out);
        return out;
    }

    std::int64_t param_count() {
        std::int64_t n = 0;
        for (auto* p : params()) n += static_cast<std::int64_t>(p->value.size());
        return n;
    }

    void zero_grad() {
        for (auto* p : params()) p->zero_grad();
    }
};

/// Residual-block image translator: stem conv, n_down stride-2 blocks,
/// residual blocks at the bottleneck, nearest-upsample+conv blocks back to
/// full resolution, tanh head bounding the output to [-1, 1].
template <class T>
class ResnetGeneratorT : public ModuleT<T> {
  public:
    ResnetGeneratorT(const GeneratorSpec& spec, Rng rng, const std::string& name = "g") : spec_(spec) {
        spec.validate();
        const int b = spec.base_channels;
        stem_.init(name + ".stem", 1, b, 7, 1, 3, rng);
        stem_norm_.init(name + ".stem_norm", b);
        int ch = b;
        for (int i = 0; i < spec.n_down; ++i) {
            DownBlock d;
            d.conv.init(name + ".down" + std::to_string(i), ch, ch * 2, 3, 2, 1, rng);
            d.norm.init(name + ".down" + std::to_string(i) + "_norm", ch * 2);
            down_.push_back(std::move(d));
            ch *= 2;
        }
        for (int i = 0; i < spec.n_residual_blocks; ++i) {
            ResBlock r;
            const std::string base = name + ".res" + std::to_string(i);
            r.conv1.init(base + "_1", ch, ch, 3, 1, 1, rng);
            r.norm1.init(base + "_1_norm", ch);
            r.conv2.init(base + "_2", ch, ch, 3, 1, 1, rng);
            r.norm2.init(base + "_2_norm", ch);
            res_.push_back(std::move(r));
        }
        for (int i = 0; i < spec.n_up; ++i) {
            DownBlock u;
            u.conv.init(name + ".up" + std::to_string(i), ch, ch / 2, 3, 1, 1, rng);
            u.norm.init(name + ".up" + std::to_string(i) + "_norm", ch / 2);
            up_.push_back(std::move(u));
            ch /= 2;
        }
        head_.init(name + ".head", ch, 1, 7, 1, 3, rng);
    }

    int build(nn::TapeT<T>& t, int x) {
        const auto& xv = t.val(x);
        const int div = 1 << spec_.n_down;
        if (xv.dim(1) % div != 0 || xv.dim(2) % div != 0) {
            throw DataError("generator: input " + std::to_string(xv.dim(1)) + "x" +
                            std::to_string(xv.dim(2)) + " not divisible by " + std::to_string(div));
        }
        int h = nn::relu(t, stem_norm_.build(t, stem_.build(t, x)));
        for (auto& d : down_) h = nn::relu(t, d.norm.build(t, d.conv.build(t, h)));
        for (auto& r : res_) {
            int y = nn::relu(t, r.norm1.build(t, r.conv1.build(t, h)));
            y = r.norm2.build(t, r.conv2.build(t, y));
            h = nn::add(t, h, y);
        }
        for (auto& u : up_) {
            h = nn::upsample_nearest2(t, h);
            h = nn::relu(t, u.norm.build(t, u.conv.build(t, h)));
        }
        return nn::tanh_op(t, head_.build(t, h));
    }

    void collect(std::vector<nn::ParamT<T>*>& out) override {
        stem_.collect(out);
        stem_norm_.collect(out);
        for (auto& d : down_) {
            d.conv.collect(out);
            d.norm.collect(out);
        }
        for (auto& r : res_) {
            r.conv1.collect(out);
            r.norm1.collect(out);
            r.conv2.collect(out);
            r.norm2.collect(out);
        }
        for (auto& u : up_) {
            u.conv.collect(out);
            u.norm.collect(out);
        }
        head_.collect(out);
    }

    const GeneratorSpec& spec() const { return spec_; }

  private:
    struct DownBlock {
        ConvLayerT<T> conv;
        InstanceNormLayerT<T> norm;
    };
    struct ResBlock {
        ConvLayerT<T> conv1, conv2;
        InstanceNormLayerT<T> norm1, norm2;
    };

    GeneratorSpec spec_;
    ConvLayerT<T> stem_;
    InstanceNormLayerT<T> stem_norm_;
    std::vector<DownBlock> down_;
    std::vector<ResBlock> res_;
    std::vector<DownBlock> up_;
    ConvLayerT<T> head_;
};

/// Patch discriminator: n_layers stride-2 4x4 convolutions with channel
/// doubling, then a 1-channel head producing the patch score grid (raw
/// scores; squashing happens inside the adversarial loss).
template <class T>
class PatchDiscriminatorT : public ModuleT<T> {
  public:
    PatchDiscriminatorT(const DiscriminatorSpec& spec, Rng rng, const std::string& name = "d")
        : spec_(spec) {
        spec.validate();
        int ci = 1;
        int co = spec.base_channels;
        for (int i = 0; i < spec.n_layers; ++i) {
            Layer l;
            l.conv.init(name + ".l" + std::to_string(i), ci, co, 4, 2, 1, rng);
            l.has_norm = i > 0;
            if (l.has_norm) l.norm.init(name + ".l" + std::to_string(i) + "_norm", co);
            layers_.push_back(std::move(l));
            ci = co;
            co = std::min(co * 2, spec.base_channels * 8);
        }
        head_.init(name + ".head", ci, 1, 4, 1, 1, rng);
    }

    int build(nn::TapeT<T>& t, int x) {
        int h = x;
        for (auto& l : layers_) {
            h = l.conv.build(t, h);
            if (l.has_norm) h = l.norm.build(t, h);
            h = nn::leaky_relu(t, h, T(0.2));
        }
        return head_.build(t, h);
    }

    void collect(std::vector<nn::ParamT<T>*>& out) override {
        for (auto& l : layers_) {
            l.conv.collect(out);
            if (l.has_norm) l.norm.collect(out);
        }
        head_.collect(out);
    }

    const DiscriminatorSpec& spec() const { return spec_; }

  private:
    struct Layer {
        ConvLayerT<T> conv;
        InstanceNormLayerT<T> norm;
        bool has_norm = false;
    };

    DiscriminatorSpec spec_;
    std::vector<Layer> layers_;
    ConvLayerT<T> head_;
};

/// U-Net that maps the channel concatenation of (generated, noisy target) to
/// a displacement field in pixel units. The head is zero-initialized so the
/// initial prediction is the identity warp.
template <class T>
class RegistrationNetT : public ModuleT<T> {
  public:
    RegistrationNetT(const RegistrationNetSpec& spec, Rng rng, const std::string& name = "r")
        : spec_(spec) {
        spec.validate();
        const int b = spec.base_channels;
        enc0_.init(name + ".enc0", 2, b, 3, 1, 1, rng);
        int ch = b;
        for (int i = 1; i < spec.depth; ++i) {
            Block e;
            e.conv.init(name + ".enc" + std::to_string(i), ch, ch * 2, 3, 2, 1, rng);
            e.norm.init(name + ".enc" + std::to_string(i) + "_norm", ch * 2);
            enc_.push_back(std::move(e));
            ch *= 2;
        }
        for (int i = spec.depth - 2; i >= 0; --i) {
            Block d;
            const int skip_ch = b << i;
            d.conv.init(name + ".dec" + std::to_string(i), ch + skip_ch, skip_ch, 3, 1, 1, rng);
            d.norm.init(name + ".dec" + std::to_string(i) + "_norm", skip_ch);
            dec_.push_back(std::move(d));
            ch = skip_ch;
        }
        head_.init(name + ".head", ch, 2, 3, 1, 1, rng, /*zero_init=*/true);
    }

    /// a and b are {1,H,W}; returns the {2,H,W} displacement field node.
    int build(nn::TapeT<T>& t, int a, int b) {
        const auto& av = t.val(a);
        const auto& bv = t.val(b);
        if (av.dims != bv.dims) throw DataError("registration: input shapes differ");
        const int div = 1 << (spec_.depth - 1);
        if (av.dim(1) % div != 0 || av.dim(2) % div != 0) {
            throw DataError("registration: input " + std::to_string(av.dim(1)) + "x" +
                            std::to_string(av.dim(2)) + " not divisible by " + std::to_string(div));
        }
        int x = nn::concat_channels(t, a, b);
        std::vector<int> skips;
        int h = nn::leaky_relu(t, enc0_.build(t, x), T(0.2));
        skips.push_back(h);
        for (auto& e : enc_) {
            h = nn::leaky_relu(t, e.norm.build(t, e.conv.build(t, h)), T(0.2));
            skips.push_back(h);
        }
        for (std::size_t i = 0; i < dec_.size(); ++i) {
            const int skip = skips[skips.size() - 2 - i];
            h = nn::upsample_nearest2(t, h);
            h = nn::concat_channels(t, h, skip);
            h = nn::leaky_relu(t, dec_[i].norm.build(t, dec_[i].conv.build(t, h)), T(0.2));
        }
        return head_.build(t, h);
    }

    void collect(std::vector<nn::ParamT<T>*>& out) override {
        enc0_.collect(out);
        for (auto& e : enc_) {
            e.conv.collect(out);
            e.norm.collect(out);
        }
        for (auto& d : dec_) {
            d.conv.collect(out);
            d.norm.collect(out);
        }
        head_.collect(out);
    }

    const RegistrationNetSpec& spec() const { return spec_; }

  private:
    struct Block {
        ConvLayerT<T> conv;
        InstanceNormLayerT<T> norm;
    };

    RegistrationNetSpec spec_;
    ConvLayerT<T> enc0_;
    std::vector<Block> enc_;
    std::vector<Block> dec_;
    ConvLayerT<T> head_;
};

using ResnetGenerator = ResnetGeneratorT<float>;
using PatchDiscriminator = PatchDiscriminatorT<float>;
using RegistrationNet = RegistrationNetT<float>;

} // namespace reggan::nets
