#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scout/rng.hpp"
#include "scout/types.hpp"
#include "scout/vocabulary.hpp"

namespace scout {

/// Synthetic-world knobs. Relevant concepts occupy ids [0, clusters *
/// cluster_size), cluster k owning ids [k*s, (k+1)*s); everything else is
/// background drawn uniformly from the latent box.
struct SimParams {
    std::int64_t vocab_size = 5000;
    int clusters = 3;
    int cluster_size = 60;
    int latent_dim = 16;

    double cluster_radius = 1.2;  // relevant latents stay inside this ball
    double latent_box = 4.0;      // background latents uniform in [-box, box]^dim
    double descriptor_scale = 2.5; // offset length = scale * cluster_radius
    int appearance_modes = 4;      // distinct mode offsets in target/held-out data

    double distractor_rate = 0.15; // chance a result ignores the query
    double rep_noise = 1.5;        // representation noise at fidelity 0
    double phi_min = 0.1;
    double phi_max = 0.95;
    double ema_rate = 0.3;

    int target_size = 300;
    int heldout_size = 300;
    std::uint64_t seed = 0;
};

/// Stand-in for encoder quality: fidelity scales representation noise down
/// as training data gets more relevant. Never decreases.
struct EncoderState {
    double fidelity = 0.0;
    double cumulative_relevant_fraction = 0.0;
};

class SimWorld {
public:
    static SimWorld make(const SimParams& params);

    const SimParams& params() const { return params_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    const TargetSet& target() const { return target_; }
    const std::vector<int>& target_labels() const { return target_labels_; }

    int concept_cluster(int concept_id) const; // -1 when not relevant
    bool concept_relevant(int concept_id) const { return concept_cluster(concept_id) >= 0; }

    /// How well a query's noiseless result latent matches the target
    /// distribution: 0 for irrelevant concepts, otherwise a Gaussian weight
    /// on the distance from (concept latent + descriptor offset) to the
    /// nearest target latent, with scale 2 * cluster_radius. Queries issued
    /// without a descriptor sit one appearance-mode offset away from every
    /// target, so their downloads train the encoder less effectively.
    double query_match(int concept_id, int descriptor_index) const;

    EncoderState initial_encoder() const { return {params_.phi_min, 0.0}; }

    /// One search result plus its ground truth (cluster -1 = off-target).
    struct SimRecord {
        ImageRecord record;
        int true_cluster = -1;
    };

    /// q results for a query. Non-distractor results sit at the concept
    /// latent, plus the descriptor offset when one is given, plus Gaussian
    /// noise scaled by rep_noise * (1 - fidelity). Pure in
    /// (world, fidelity, concept, descriptor, iteration).
    std::vector<SimRecord> search(const EncoderState& encoder, int concept_id,
                                  int descriptor_index, int count, int iteration,
                                  std::int64_t id_base) const;

    /// k-NN accuracy of the held-out items against the target set plus any
    /// extra labeled references. Held-out probes and target references are
    /// both re-encoded at the current noise scale; extra references keep
    /// their stored representations.
    struct LabeledRef {
        std::span<const double> embedding;
        int label = -1;
    };
    double evaluate_accuracy(const EncoderState& encoder,
                             std::span<const LabeledRef> extra_reference, int k) const;

private:
    SimParams params_;
    Vocabulary vocab_;
    TargetSet target_;
    std::vector<int> target_labels_;
    std::vector<std::vector<double>> target_noise_; // fixed normals, scaled at eval
    std::vector<std::vector<double>> heldout_;
    std::vector<int> heldout_labels_;
    std::vector<std::vector<double>> heldout_noise_; // fixed normals, scaled at eval
    std::vector<std::vector<double>> centers_;

    std::vector<double> descriptor_offset(int descriptor_index) const;
    Rng stream(std::uint64_t tag) const { return Rng(params_.seed).derive(tag); }
};

/// EMA step on the fraction of relevant training downloads; fidelity maps
/// linearly from the running mean and is clamped to never decrease.
EncoderState encoder_update(const EncoderState& encoder, double relevant_fraction,
                            const SimParams& params);

} // namespace scout
