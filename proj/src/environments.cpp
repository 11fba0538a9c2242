#include "scout/environments.hpp"

#include <stdexcept>

#include "scout/util.hpp"

namespace scout {

std::vector<ImageRecord> SimEnvironment::search(int concept_id, int descriptor_index,
                                                int count, int iteration,
                                                std::int64_t id_base) {
    auto results = world_.search(encoder_, concept_id, descriptor_index, count, iteration,
                                 id_base);
    std::vector<ImageRecord> records;
    records.reserve(results.size());
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (auto& r : results) truth_[r.record.id] = r.true_cluster;
    }
    for (auto& r : results) records.push_back(std::move(r.record));
    return records;
}

int SimEnvironment::record_cluster(std::int64_t record_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = truth_.find(record_id);
    return it == truth_.end() ? -1 : it->second;
}

std::optional<double> SimEnvironment::accuracy(const ReplayBuffer& buffer, int k) {
    std::vector<SimWorld::LabeledRef> refs;
    refs.reserve(buffer.records.size());
    for (const auto& rec : buffer.records)
        refs.push_back({std::span<const double>(rec.embedding), record_cluster(rec.id)});
    return world_.evaluate_accuracy(encoder_, refs, k);
}

void SimEnvironment::train(const TrainingBatch& batch) {
    std::size_t downloads = batch.candidates.size() + batch.replayed.size();
    if (downloads == 0) return;
    // Each on-query download counts by how closely its query matched the
    // target distribution; distractors count zero.
    double matched = 0.0;
    for (const auto& rec : batch.candidates)
        if (record_cluster(rec.id) >= 0)
            matched += world_.query_match(rec.source_concept, rec.source_descriptor);
    for (const ImageRecord* rec : batch.replayed)
        if (record_cluster(rec->id) >= 0)
            matched += world_.query_match(rec->source_concept, rec->source_descriptor);
    double fraction = matched / static_cast<double>(downloads);
    encoder_ = encoder_update(encoder_, fraction, world_.params());
}

CorpusEnvironment::CorpusEnvironment(const CorpusEnvConfig& cfg) {
    vocab_ = load_vocabulary(cfg.vocabulary_path);
    auto entries = load_corpus(cfg.corpus_path);
    corpus_embeddings_.reserve(entries.size());
    for (std::size_t row = 0; row < entries.size(); ++row) {
        const auto& e = entries[row];
        std::vector<double> v(e.caption_embedding.begin(), e.caption_embedding.end());
        row_by_id_.try_emplace(e.image_id, row);
        corpus_embeddings_.push_back(std::move(v));
    }
    auto target_entries = load_corpus(cfg.target_path);
    for (const auto& e : target_entries)
        target_.embeddings.emplace_back(e.caption_embedding.begin(),
                                        e.caption_embedding.end());
    index_ = CaptionIndex::build(std::move(entries), cfg.index_mode, cfg.accel);
    if (vocab_.dimension != index_.dimension())
        throw ConfigError("corpus environment: vocabulary dimension " +
                          std::to_string(vocab_.dimension) + " != corpus dimension " +
                          std::to_string(index_.dimension()));
    if (target_.dim() != index_.dimension())
        throw ConfigError("corpus environment: target dimension mismatch");
}

std::vector<ImageRecord> CorpusEnvironment::search(int concept_id, int descriptor_index,
                                                   int count, int iteration,
                                                   std::int64_t id_base) {
    const Concept* c = vocab_.find(concept_id);
    if (!c) throw std::invalid_argument("corpus environment: unknown concept id");
    QueryResult res = index_.query(c->embedding, count);
    std::vector<ImageRecord> records;
    records.reserve(res.hits.size());
    std::int64_t next = id_base;
    for (const auto& hit : res.hits) {
        auto it = row_by_id_.find(hit.image_id);
        if (it == row_by_id_.end()) continue;
        ImageRecord rec;
        rec.id = next++;
        rec.embedding = corpus_embeddings_[it->second];
        rec.source_concept = concept_id;
        rec.source_descriptor = descriptor_index;
        rec.iteration = iteration;
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace scout
