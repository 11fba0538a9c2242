#pragma once

#include <cstdint>

namespace scout {

/// m-th harmonic number, summed smallest terms first for accuracy.
double harmonic(std::int64_t m);

/// Closed-form expected discovery times for the clustered coupon-collector
/// setting: n concepts, c relevant clusters of size s.
///   base: every relevant concept must be drawn   -> n * H_{c*s}
///   gpr:  one hit per cluster reveals the rest   -> n * H_c / s
struct AnalyticTimes {
    double base = 0.0;
    double gpr = 0.0;
    double speedup = 0.0; // base / gpr
};

AnalyticTimes analytic_times(std::int64_t n, std::int64_t c, std::int64_t s);

enum class DiscoveryMode { Base, Gpr };

struct DiscoveryConfig {
    std::int64_t n = 0;
    std::int64_t c = 0;
    std::int64_t s = 0;
    DiscoveryMode mode = DiscoveryMode::Base;
    int trials = 1000;
    std::uint64_t seed = 0;
};

struct DiscoveryStats {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

/// Monte-Carlo estimate of the discovery time: uniform draws with
/// replacement, counted until the mode's stopping rule fires. Trials are
/// seeded per-index, so runs with equal seeds pair trial-for-trial across
/// modes.
DiscoveryStats simulate_discovery(const DiscoveryConfig& cfg);

} // namespace scout
