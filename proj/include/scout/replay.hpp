#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scout/rng.hpp"
#include "scout/types.hpp"

namespace scout {

/// Append-only store of the high-reward downloads kept across iterations.
struct ReplayBuffer {
    std::vector<ImageRecord> records;

    std::size_t size() const { return records.size(); }
    void append(std::vector<ImageRecord> kept) {
        records.insert(records.end(), std::make_move_iterator(kept.begin()),
                       std::make_move_iterator(kept.end()));
    }
};

/// The ceil(fraction*n) highest-reward records (ties to lower id), ordered
/// by descending reward.
std::vector<ImageRecord> retain_top_fraction(std::span<const ImageRecord> new_images,
                                             double fraction);

/// One training round: every candidate, plus round(pcr*|candidates|) items
/// drawn uniformly from buffer-union-target (without replacement when the
/// pool is large enough, with replacement otherwise).
struct TrainingSet {
    struct HistoryItem {
        bool from_buffer = true; // false: index refers to the target set
        std::size_t index = 0;
    };
    std::vector<std::int64_t> candidate_ids;
    std::vector<HistoryItem> history;
    int epochs = 10;
    bool pool_exhausted = false; // pcr > 0 but buffer and target were empty
};

TrainingSet compose_training_set(std::span<const ImageRecord> candidates,
                                 const ReplayBuffer& buffer, const TargetSet& target,
                                 double pcr, Rng& rng, int epochs = 10);

/// Binary checkpoint: header, then one record per line item
/// (id, concept id, iteration, reward, d_rep doubles). Descriptor indices
/// are not persisted.
struct BufferCheckpoint {
    ReplayBuffer buffer;
    int next_iteration = 0;
    std::int64_t next_record_id = 0;
    std::int64_t queries_issued = 0;
};

void save_buffer_checkpoint(const std::string& path, const ReplayBuffer& buffer,
                            int next_iteration, std::int64_t next_record_id,
                            std::int64_t queries_issued);
BufferCheckpoint load_buffer_checkpoint(const std::string& path);

} // namespace scout
