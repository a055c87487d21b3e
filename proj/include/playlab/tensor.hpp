#pragma once

#include <numeric>
#include <vector>

#include "playlab/error.hpp"

namespace playlab {

// Dense row-major tensor. Training instantiates float; the finite-difference
// oracles instantiate double.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), T{0});
    }

    static size_t numel_of(const std::vector<int>& s) {
        size_t n = 1;
        for (const int d : s) {
            if (d <= 0) throw InputError("Tensor: non-positive dimension");
            n *= static_cast<size_t>(d);
        }
        return n;
    }

    size_t numel() const { return data.size(); }
    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

} // namespace playlab
