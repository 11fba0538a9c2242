#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scout {

struct CorpusEntry {
    std::int64_t image_id = -1;
    std::string payload_ref;
    std::vector<float> caption_embedding;
};

enum class IndexMode { Exact, Accelerated };

struct AccelParams {
    int num_lists = 0;   // 0: about sqrt(N), at least 1
    int probes = 0;      // 0: num_lists / 4, at least 8
    int kmeans_iters = 8;
    std::uint64_t seed = 0;
};

struct SearchHit {
    std::int64_t image_id = -1;
    double score = 0.0; // cosine similarity
};

struct QueryResult {
    std::vector<SearchHit> hits; // descending score, ties to lower id
    bool truncated = false;      // top_k exceeded the corpus size
};

/// Cosine-similarity retrieval over caption embeddings, normalized at build
/// time. Exact mode scans; accelerated mode is an inverted-file index over
/// spherical k-means cells with a probe-count recall knob.
class CaptionIndex {
public:
    static CaptionIndex build(std::vector<CorpusEntry> entries, IndexMode mode,
                              const AccelParams& params = {});

    QueryResult query(std::span<const double> embedding, int top_k = 100) const;

    std::size_t size() const { return ids_.size(); }
    std::size_t dimension() const { return dim_; }
    IndexMode mode() const { return mode_; }

private:
    IndexMode mode_ = IndexMode::Exact;
    std::size_t dim_ = 0;
    std::vector<std::int64_t> ids_;
    std::vector<std::string> payloads_;
    std::vector<double> vectors_; // row-major, unit norm
    // accelerated mode:
    int probes_ = 0;
    std::vector<double> centroids_;          // num_lists x dim
    std::vector<std::vector<std::uint32_t>> lists_;

    void scan(std::span<const double> q, std::span<const std::uint32_t> rows, int top_k,
              std::vector<SearchHit>& out) const;
};

/// Corpus file: header (count: u64, dim: u32), then per record
/// image_id: i64, payload length: u32 + bytes, dim f32 embedding values.
void save_corpus(const std::string& path, const std::vector<CorpusEntry>& entries);
std::vector<CorpusEntry> load_corpus(const std::string& path);

} // namespace scout
