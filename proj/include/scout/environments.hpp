#pragma once

#include <mutex>
#include <string>
#include <unordered_map>

#include "scout/engine.hpp"
#include "scout/search_index.hpp"
#include "scout/simulator.hpp"

namespace scout {

/// Engine-facing wrapper around SimWorld: owns the encoder state, tracks
/// ground truth per returned record, and exposes the reporting hooks.
class SimEnvironment : public Environment {
public:
    explicit SimEnvironment(SimWorld world)
        : world_(std::move(world)), encoder_(world_.initial_encoder()) {}

    const Vocabulary& vocabulary() const override { return world_.vocabulary(); }
    const TargetSet& target() const override { return world_.target(); }

    std::vector<ImageRecord> search(int concept_id, int descriptor_index, int count,
                                    int iteration, std::int64_t id_base) override;

    /// Relevant fraction of the training downloads (candidates + replayed
    /// buffer items; target items are clean data, not downloads) drives the
    /// fidelity update.
    void train(const TrainingBatch& batch) override;

    int category_count() const override { return world_.params().clusters; }
    int concept_category(int concept_id) const override {
        return world_.concept_cluster(concept_id);
    }
    std::int64_t relevant_concept_count() const override {
        return static_cast<std::int64_t>(world_.params().clusters) *
               world_.params().cluster_size;
    }
    std::optional<double> accuracy(const ReplayBuffer& buffer, int k) override;
    std::optional<double> fidelity() const override { return encoder_.fidelity; }

    const SimWorld& world() const { return world_; }
    const EncoderState& encoder() const { return encoder_; }
    /// Ground-truth cluster for a returned record (-1 off-target/unknown).
    int record_cluster(std::int64_t record_id) const;

private:
    SimWorld world_;
    EncoderState encoder_;
    std::unordered_map<std::int64_t, int> truth_;
    mutable std::mutex mu_;
};

/// Static-corpus environment: queries are concept embeddings ranked by the
/// caption index; descriptors have no effect here. Caption embeddings double
/// as the image representations, so the vocabulary, corpus, and target file
/// must share one dimension.
struct CorpusEnvConfig {
    std::string corpus_path;
    std::string target_path;     // corpus-format file; embeddings become the target set
    std::string vocabulary_path; // TSV vocabulary
    IndexMode index_mode = IndexMode::Exact;
    AccelParams accel;
};

class CorpusEnvironment : public Environment {
public:
    explicit CorpusEnvironment(const CorpusEnvConfig& cfg);

    const Vocabulary& vocabulary() const override { return vocab_; }
    const TargetSet& target() const override { return target_; }
    std::vector<ImageRecord> search(int concept_id, int descriptor_index, int count,
                                    int iteration, std::int64_t id_base) override;

private:
    Vocabulary vocab_;
    TargetSet target_;
    CaptionIndex index_;
    std::vector<std::vector<double>> corpus_embeddings_; // by corpus row
    std::unordered_map<std::int64_t, std::size_t> row_by_id_;
};

} // namespace scout
