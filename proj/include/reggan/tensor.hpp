#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "reggan/errors.hpp"

namespace reggan::nn {

/// Dense row-major tensor. Activations are {C,H,W}, conv weights {O,I,kh,kw},
/// scalars {1}.
template <class T>
struct TensorT {
    std::vector<int> dims;
    std::vector<T> v;

    TensorT() = default;
    explicit TensorT(std::vector<int> d) : dims(std::move(d)), v(count(dims), T(0)) {}
    TensorT(std::vector<int> d, T fill) : dims(std::move(d)), v(count(dims), fill) {}

    static std::size_t count(const std::vector<int>& d) {
        std::size_t n = 1;
        for (int x : d) n *= static_cast<std::size_t>(x);
        return n;
    }

    std::size_t size() const { return v.size(); }
    int dim(int i) const { return dims[static_cast<std::size_t>(i)]; }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    bool same_dims(const TensorT& o) const { return dims == o.dims; }

    static TensorT scalar(T x) {
        TensorT t({1});
        t.v[0] = x;
        return t;
    }
};

using Tensor = TensorT<float>;

template <class T>
TensorT<float> to_float(const TensorT<T>& t) {
    TensorT<float> out;
    out.dims = t.dims;
    out.v.assign(t.v.begin(), t.v.end());
    return out;
}

} // namespace reggan::nn
