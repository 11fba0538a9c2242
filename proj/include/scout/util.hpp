#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace scout {

/// Configuration / input-format problem, distinct from runtime failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// ceil(fraction * n) with a small relative guard so values that are exact
/// in real arithmetic (0.5 * 25600) do not round up from float error.
inline std::size_t ceil_fraction(std::size_t n, double fraction) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("ceil_fraction: fraction outside [0, 1]");
    double v = fraction * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(v - 1e-9 * std::max(1.0, v)));
    if (fraction > 0.0 && n > 0 && k == 0) k = 1;
    return std::min(k, n);
}

/// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, const char* what) {
    s = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError(std::string("bad number for ") + what + ": '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s, const char* what) {
    s = trim(s);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError(std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
    return v;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to preallocated slots; iteration order is not observable.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (n == 0) return;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace scout
