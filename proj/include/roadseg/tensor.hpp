#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace roadseg {

/// Dense row-major tensor. No strides or views; ops that need another
/// layout copy. Shapes use int64 so header metadata round-trips exactly.
template <typename T>
struct TensorT {
    std::vector<int64_t> shape;
    std::vector<T> v;

    TensorT() = default;
    explicit TensorT(std::vector<int64_t> s) { resize(std::move(s)); }

    void resize(std::vector<int64_t> s) {
        int64_t n = 1;
        for (int64_t d : s) {
            if (d < 0) throw std::invalid_argument("tensor: negative dimension");
            n *= d;
        }
        shape = std::move(s);
        v.assign(static_cast<size_t>(n), T{});
    }

    int64_t numel() const { return static_cast<int64_t>(v.size()); }
    int rank() const { return static_cast<int>(shape.size()); }
    int64_t dim(int i) const { return shape[static_cast<size_t>(i)]; }
    bool empty() const { return v.empty() && shape.empty(); }

    T* data() { return v.data(); }
    const T* data() const { return v.data(); }
    void fill(T x) { std::fill(v.begin(), v.end(), x); }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    // Convenience accessors for tests and cold paths; hot loops index flat.
    T& at2(int64_t i, int64_t j) { return v[static_cast<size_t>(i * shape[1] + j)]; }
    T at2(int64_t i, int64_t j) const { return v[static_cast<size_t>(i * shape[1] + j)]; }
    T& at3(int64_t i, int64_t j, int64_t k) {
        return v[static_cast<size_t>((i * shape[1] + j) * shape[2] + k)];
    }
    T at3(int64_t i, int64_t j, int64_t k) const {
        return v[static_cast<size_t>((i * shape[1] + j) * shape[2] + k)];
    }
    T& at4(int64_t i, int64_t j, int64_t k, int64_t l) {
        return v[static_cast<size_t>(((i * shape[1] + j) * shape[2] + k) * shape[3] + l)];
    }
    T at4(int64_t i, int64_t j, int64_t k, int64_t l) const {
        return v[static_cast<size_t>(((i * shape[1] + j) * shape[2] + k) * shape[3] + l)];
    }
};

using Tensor = TensorT<float>;
using ByteTensor = TensorT<uint8_t>;

inline std::string shape_string(const std::vector<int64_t>& s) {
    std::string out = "(";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

/// splitmix64 finalizer; used to derive independent RNG streams so that
/// a change in one consumer (e.g. cloud sampling) never shifts another
/// (e.g. road geometry) for the same top-level seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(a + 0x51ull)) ^ (b + 0xb5ull));
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t stream = 0, uint64_t sub = 0) {
    return std::mt19937_64(mix_seed(seed, stream, sub));
}

}  // namespace roadseg
