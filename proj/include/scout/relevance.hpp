#pragma once

#include <span>

#include "scout/types.hpp"

namespace scout {

/// Mean of the k largest cosine similarities between y and the target
/// vectors — equivalently the best size-k subset mean. k is clamped to
/// |targets|. Result lies in [-1, 1].
double image_reward(std::span<const double> y, const TargetSet& targets, int k = 15);

/// Mean of the min(top_n, |rewards|) largest values. top_n <= 0 averages
/// everything (the plain-mean scoring variant).
double concept_score(std::span<const double> rewards, int top_n = 10);

struct InfoNceResult {
    double value = 0.0;
    bool degenerate = false; // no negatives: loss is exactly 0
};

/// -log[ exp(q.k+ / tau) / (exp(q.k+ / tau) + sum exp(q.k- / tau)) ] on raw
/// (unnormalized) vectors, evaluated via logsumexp.
InfoNceResult infonce_loss(std::span<const double> q, std::span<const double> k_plus,
                           const std::vector<std::vector<double>>& negatives,
                           double tau = 1.0);

} // namespace scout
