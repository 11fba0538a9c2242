#pragma once

#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "scout/vocabulary.hpp"

namespace scout {

enum class KernelKind {
    Exponential,        // exp(-||a-b|| / 2), distance not squared (default)
    SquaredExponential, // exp(-||a-b||^2 / 2), the conventional reading
};

/// Concept-embedding kernel; k(a,a) = 1 for both kinds.
double gp_kernel(std::span<const double> a, std::span<const double> b,
                 KernelKind kind = KernelKind::Exponential);

struct Observation {
    int concept_id = -1;
    std::vector<double> embedding;
    double reward = 0.0;
};

struct ConceptPosterior {
    int concept_id = -1;
    double mean = 0.0;
    double std = 0.0;
    double score = 0.0;
};

/// Noise-free Gaussian-process regression over concept embeddings.
/// Prior mean is the empirical mean of the observed rewards; the kernel
/// matrix is stabilized with a jitter that escalates x10 (up to 1e-4) if the
/// Cholesky factorization fails. Exactly equal embeddings are merged by
/// averaging their rewards before the fit.
class GprModel {
public:
    static GprModel fit(const std::vector<Observation>& observations,
                        double jitter = 1e-8,
                        KernelKind kind = KernelKind::Exponential);

    GprModel(GprModel&&) noexcept;
    GprModel& operator=(GprModel&&) noexcept;
    ~GprModel();

    /// Posterior (mean, std) at one embedding; std floored at 0.
    std::pair<double, double> predict(std::span<const double> embedding) const;

    /// Posterior for many embeddings with one batched triangular solve.
    void predict_batch(const std::vector<std::vector<double>>& embeddings,
                       std::vector<double>& means, std::vector<double>& stds) const;

    double prior_mean() const;
    double jitter_used() const;
    std::size_t observation_count() const;
    KernelKind kernel_kind() const;

private:
    GprModel();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Posterior + sampling score for every vocabulary concept: unobserved
/// concepts score mean + std (exploration bonus); observed ones score the
/// empirical mean of their concept-level rewards.
std::vector<ConceptPosterior> score_all(const GprModel& model, const Vocabulary& vocab,
                                        const std::map<int, std::vector<double>>& observed);

} // namespace scout
