#include "scout/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "scout/util.hpp"

namespace scout {

TierSpec TierSpec::defaults(std::int64_t vocab_size) {
    if (vocab_size < 1) throw std::invalid_argument("TierSpec::defaults: empty vocabulary");
    const std::int64_t cuts[] = {250, 1000};
    const double shares[] = {0.8, 0.1, 0.1};
    TierSpec t;
    t.boundaries.push_back(0);
    double lost = 0.0;
    for (int j = 0; j < 3; ++j) {
        std::int64_t hi = (j < 2) ? std::min(cuts[j], vocab_size) : vocab_size;
        if (hi > t.boundaries.back()) {
            t.boundaries.push_back(hi);
            t.masses.push_back(shares[j]);
        } else {
            lost += shares[j]; // tier clipped away entirely
        }
    }
    if (lost > 0.0) {
        double kept = std::accumulate(t.masses.begin(), t.masses.end(), 0.0);
        for (double& m : t.masses) m += lost * m / kept;
    }
    return t;
}

void TierSpec::validate(std::int64_t vocab_size) const {
    if (boundaries.size() != masses.size() + 1 || masses.empty())
        throw std::invalid_argument("TierSpec: need n+1 boundaries for n masses");
    if (boundaries.front() != 0 || boundaries.back() != vocab_size)
        throw std::invalid_argument("TierSpec: boundaries must run from 0 to the vocabulary size");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("TierSpec: boundaries must be strictly increasing");
    double total = 0.0;
    for (double m : masses) {
        if (m < 0.0) throw std::invalid_argument("TierSpec: negative mass");
        total += m;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("TierSpec: masses must sum to 1");
}

double temperature_from_smr(std::span<const double> scores, double smr) {
    if (scores.empty()) throw std::invalid_argument("temperature_from_smr: no scores");
    if (smr <= 0.0) throw std::invalid_argument("temperature_from_smr: smr must be positive");
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    double gap = *hi - *lo;
    if (gap == 0.0) return std::numeric_limits<double>::infinity();
    return gap / smr;
}

std::vector<double> softmax_distribution(std::span<const double> scores, double tau) {
    if (scores.empty()) throw std::invalid_argument("softmax_distribution: no scores");
    const std::size_t n = scores.size();
    if (std::isinf(tau)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    if (tau <= 0.0) throw std::invalid_argument("softmax_distribution: tau must be positive");
    double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::exp((scores[i] - m) / tau);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> apply_tiering(std::span<const double> sorted_probabilities,
                                  const TierSpec& tiers,
                                  std::vector<std::size_t>* starved_tiers) {
    const auto n = static_cast<std::int64_t>(sorted_probabilities.size());
    tiers.validate(n);
    const std::size_t t = tiers.masses.size();

    std::vector<double> tier_input(t, 0.0);
    for (std::size_t j = 0; j < t; ++j)
        for (std::int64_t i = tiers.boundaries[j]; i < tiers.boundaries[j + 1]; ++i)
            tier_input[j] += sorted_probabilities[static_cast<std::size_t>(i)];

    // A tier with no input mass cannot absorb its share; spread it over the
    // live tiers in proportion to their own shares.
    std::vector<double> mass = tiers.masses;
    double lost = 0.0, live = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
        if (tier_input[j] == 0.0) {
            lost += mass[j];
            if (starved_tiers) starved_tiers->push_back(j);
        } else {
            live += mass[j];
        }
    }
    if (live == 0.0) throw std::invalid_argument("apply_tiering: all tiers empty");
    if (lost > 0.0)
        for (std::size_t j = 0; j < t; ++j)
            mass[j] = (tier_input[j] == 0.0) ? 0.0 : mass[j] + lost * mass[j] / live;

    std::vector<double> out(sorted_probabilities.size());
    for (std::size_t j = 0; j < t; ++j) {
        if (tier_input[j] == 0.0) continue;
        double scale = mass[j] / tier_input[j];
        for (std::int64_t i = tiers.boundaries[j]; i < tiers.boundaries[j + 1]; ++i)
            out[static_cast<std::size_t>(i)] =
                sorted_probabilities[static_cast<std::size_t>(i)] * scale;
    }
    return out;
}

SamplingPlan make_plan(const std::vector<ConceptPosterior>& posteriors, double smr,
                       const TierSpec& tiers) {
    if (posteriors.empty()) throw std::invalid_argument("make_plan: no posteriors");
    std::vector<std::size_t> idx(posteriors.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (posteriors[a].score != posteriors[b].score)
            return posteriors[a].score > posteriors[b].score;
        return posteriors[a].concept_id < posteriors[b].concept_id;
    });

    std::vector<double> scores(posteriors.size());
    SamplingPlan plan;
    plan.order.resize(posteriors.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        scores[r] = posteriors[idx[r]].score;
        plan.order[r] = posteriors[idx[r]].concept_id;
    }
    double tau = temperature_from_smr(scores, smr);
    std::vector<double> base = softmax_distribution(scores, tau);
    plan.probabilities = apply_tiering(base, tiers);
    plan.scores = std::move(scores);
    plan.pre_tier = std::move(base);
    return plan;
}

std::string plan_csv(const SamplingPlan& plan) {
    std::string out = "rank,concept,score,pre_tier_p,post_tier_p\n";
    for (std::size_t r = 0; r < plan.order.size(); ++r) {
        out += std::to_string(r) + ',' + std::to_string(plan.order[r]) + ',' +
               format_double(plan.scores[r]) + ',' + format_double(plan.pre_tier[r]) +
               ',' + format_double(plan.probabilities[r]) + '\n';
    }
    return out;
}

std::vector<int> sample_concepts(const SamplingPlan& plan, int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("sample_concepts: m must be >= 1");
    if (plan.order.empty() || plan.order.size() != plan.probabilities.size())
        throw std::invalid_argument("sample_concepts: invalid plan");
    std::vector<double> cdf(plan.probabilities.size());
    std::partial_sum(plan.probabilities.begin(), plan.probabilities.end(), cdf.begin());
    cdf.back() = 1.0; // guard against rounding shortfall
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out.push_back(plan.order[static_cast<std::size_t>(it - cdf.begin())]);
    }
    return out;
}

} // namespace scout
