#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scout {

/// One downloaded/generated image: its representation plus bookkeeping about
/// where it came from and the reward it earned.
struct ImageRecord {
    std::int64_t id = -1;
    std::vector<double> embedding;
    double reward = 0.0;
    int source_concept = -1;    // vocabulary id of the query that produced it
    int source_descriptor = -1; // descriptor index, -1 when none was used
    int iteration = -1;
};

/// Fixed set of target-domain representations that defines "relevant".
struct TargetSet {
    std::vector<std::vector<double>> embeddings;

    std::size_t size() const { return embeddings.size(); }
    bool empty() const { return embeddings.empty(); }
    std::size_t dim() const { return embeddings.empty() ? 0 : embeddings.front().size(); }
};

} // namespace scout
