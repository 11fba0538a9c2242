#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scout/concept_model.hpp"
#include "scout/rng.hpp"

namespace scout {

/// Rank intervals [boundaries[j], boundaries[j+1]) over the score-sorted
/// concept list, each owning a fixed share of probability mass.
struct TierSpec {
    std::vector<std::int64_t> boundaries; // T0=0 < T1 < ... < Tn = N
    std::vector<double> masses;           // one per interval, >= 0, sums to 1

    /// Default tiers: top 250 ranks get 0.8, next 750 get 0.1, the rest 0.1.
    /// Boundaries are clipped to the vocabulary size; tiers that vanish give
    /// their mass to the survivors proportionally.
    static TierSpec defaults(std::int64_t vocab_size);

    void validate(std::int64_t vocab_size) const;
};

/// Temperature giving the desired max-min score gap after scaling:
/// (max - min) / smr. Equal scores return +infinity, which downstream
/// softmax treats as "uniform".
double temperature_from_smr(std::span<const double> scores, double smr);

/// p_i proportional to exp(score_i / tau), max-subtracted for stability.
/// tau = +infinity yields the uniform distribution.
std::vector<double> softmax_distribution(std::span<const double> scores, double tau);

/// Rescales a rank-sorted distribution so tier j's total mass equals
/// masses[j], preserving within-tier ratios. Tiers with zero input mass give
/// their share to the remaining tiers proportionally; their indices are
/// reported through `starved_tiers` when non-null.
std::vector<double> apply_tiering(std::span<const double> sorted_probabilities,
                                  const TierSpec& tiers,
                                  std::vector<std::size_t>* starved_tiers = nullptr);

struct SamplingPlan {
    std::vector<int> order;            // concept ids, score-descending (ties: lower id)
    std::vector<double> probabilities; // aligned with `order`, sums to 1
    std::vector<double> scores;        // sorted scores, aligned with `order`
    std::vector<double> pre_tier;      // softmax probabilities before tiering
};

/// Softmax (SMR-scaled) + tiering over posterior scores.
SamplingPlan make_plan(const std::vector<ConceptPosterior>& posteriors, double smr,
                       const TierSpec& tiers);

/// Diagnostic dump: rank,concept,score,pre_tier_p,post_tier_p per row.
std::string plan_csv(const SamplingPlan& plan);

/// m independent draws (with replacement) from the plan distribution.
std::vector<int> sample_concepts(const SamplingPlan& plan, int m, Rng& rng);

} // namespace scout
