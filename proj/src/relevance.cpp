#include "scout/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scout/vec.hpp"

namespace scout {

double image_reward(std::span<const double> y, const TargetSet& targets, int k) {
    if (targets.empty()) throw std::invalid_argument("image_reward: empty target set");
    if (k < 1) throw std::invalid_argument("image_reward: k must be >= 1");
    std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), targets.size());
    std::vector<double> sims;
    sims.reserve(targets.size());
    for (const auto& t : targets.embeddings) sims.push_back(cosine(y, t));
    std::nth_element(sims.begin(), sims.begin() + (kk - 1), sims.end(), std::greater<>());
    double s = std::accumulate(sims.begin(), sims.begin() + kk, 0.0);
    double r = s / static_cast<double>(kk);
    return std::clamp(r, -1.0, 1.0);
}

double concept_score(std::span<const double> rewards, int top_n) {
    if (rewards.empty()) throw std::invalid_argument("concept_score: no rewards");
    std::vector<double> v(rewards.begin(), rewards.end());
    std::size_t n = (top_n <= 0) ? v.size()
                                 : std::min<std::size_t>(static_cast<std::size_t>(top_n), v.size());
    std::nth_element(v.begin(), v.begin() + (n - 1), v.end(), std::greater<>());
    return std::accumulate(v.begin(), v.begin() + n, 0.0) / static_cast<double>(n);
}

InfoNceResult infonce_loss(std::span<const double> q, std::span<const double> k_plus,
                           const std::vector<std::vector<double>>& negatives,
                           double tau) {
    if (tau <= 0.0) throw std::invalid_argument("infonce_loss: tau must be positive");
    double pos = dot(q, k_plus) / tau;
    if (negatives.empty()) return {0.0, true};

    // loss = logsumexp(pos, negs) - pos, computed with max-subtraction.
    double m = pos;
    std::vector<double> logits;
    logits.reserve(negatives.size());
    for (const auto& neg : negatives) {
        double l = dot(q, neg) / tau;
        logits.push_back(l);
        m = std::max(m, l);
    }
    double sum = std::exp(pos - m);
    for (double l : logits) sum += std::exp(l - m);
    return {m + std::log(sum) - pos, false};
}

} // namespace scout
