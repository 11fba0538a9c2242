#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace scout {

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Cosine similarity, clamped to [-1, 1]. Zero-norm inputs are rejected.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    double na = norm2(a);
    double nb = norm2(b);
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("cosine: zero-norm vector");
    double c = dot(a, b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

inline void normalize_in_place(std::vector<double>& v) {
    double n = norm2(v);
    if (n == 0.0) throw std::invalid_argument("normalize: zero-norm vector");
    for (double& x : v) x /= n;
}

} // namespace scout
