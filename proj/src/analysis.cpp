#include "scout/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scout/rng.hpp"

namespace scout {

double harmonic(std::int64_t m) {
    if (m < 1) throw std::invalid_argument("harmonic: m must be >= 1");
    double h = 0.0;
    for (std::int64_t i = m; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
}

AnalyticTimes analytic_times(std::int64_t n, std::int64_t c, std::int64_t s) {
    if (n < 1 || c < 1 || s < 1) throw std::invalid_argument("analytic_times: n, c, s must be >= 1");
    if (c * s > n) throw std::invalid_argument("analytic_times: c*s exceeds n");
    AnalyticTimes t;
    t.base = static_cast<double>(n) * harmonic(c * s);
    t.gpr = static_cast<double>(n) * harmonic(c) / static_cast<double>(s);
    t.speedup = t.base / t.gpr;
    return t;
}

DiscoveryStats simulate_discovery(const DiscoveryConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("simulate_discovery: trials must be >= 1");
    if (cfg.n < 1 || cfg.c < 1 || cfg.s < 1 || cfg.c * cfg.s > cfg.n)
        throw std::invalid_argument("simulate_discovery: invalid (n, c, s)");

    const auto n = static_cast<std::uint64_t>(cfg.n);
    const std::int64_t relevant = cfg.c * cfg.s;
    Rng root(cfg.seed);
    double sum = 0.0, sumsq = 0.0;
    std::vector<char> seen;
    for (int t = 0; t < cfg.trials; ++t) {
        // Per-trial stream: trial t draws the same concept sequence in both
        // modes, pairing the comparison.
        Rng rng = root.derive(static_cast<std::uint64_t>(t));
        std::int64_t remaining = (cfg.mode == DiscoveryMode::Base) ? relevant : cfg.c;
        seen.assign(static_cast<std::size_t>(remaining), 0);
        std::int64_t draws = 0;
        while (remaining > 0) {
            auto concept_id = static_cast<std::int64_t>(rng.below(n));
            ++draws;
            if (concept_id >= relevant) continue;
            // Relevant ids are [0, c*s); cluster = id / s.
            std::int64_t key =
                (cfg.mode == DiscoveryMode::Base) ? concept_id : concept_id / cfg.s;
            if (!seen[static_cast<std::size_t>(key)]) {
                seen[static_cast<std::size_t>(key)] = 1;
                --remaining;
            }
        }
        sum += static_cast<double>(draws);
        sumsq += static_cast<double>(draws) * static_cast<double>(draws);
    }

    DiscoveryStats st;
    st.trials = cfg.trials;
    st.mean = sum / cfg.trials;
    if (cfg.trials > 1) {
        double var = (sumsq - sum * sum / cfg.trials) / (cfg.trials - 1);
        st.std_error = std::sqrt(std::max(0.0, var) / cfg.trials);
    }
    return st;
}

} // namespace scout
