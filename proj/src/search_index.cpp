#include "scout/search_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "scout/rng.hpp"
#include "scout/util.hpp"

namespace scout {

namespace {

bool hit_better(const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
}

double dot_rows(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

} // namespace

CaptionIndex CaptionIndex::build(std::vector<CorpusEntry> entries, IndexMode mode,
                                 const AccelParams& params) {
    if (entries.empty()) throw std::invalid_argument("CaptionIndex: empty corpus");
    CaptionIndex ix;
    ix.mode_ = mode;
    ix.dim_ = entries.front().caption_embedding.size();
    if (ix.dim_ == 0) throw std::invalid_argument("CaptionIndex: zero-dimensional embeddings");

    const std::size_t n = entries.size();
    ix.ids_.reserve(n);
    ix.payloads_.reserve(n);
    ix.vectors_.resize(n * ix.dim_);
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = entries[i];
        if (e.caption_embedding.size() != ix.dim_)
            throw std::invalid_argument("CaptionIndex: inconsistent embedding dimension");
        double norm = 0.0;
        for (float v : e.caption_embedding) {
            if (!std::isfinite(v)) throw std::invalid_argument("CaptionIndex: non-finite embedding");
            norm += static_cast<double>(v) * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::invalid_argument("CaptionIndex: zero-norm embedding");
        double* row = &ix.vectors_[i * ix.dim_];
        for (std::size_t j = 0; j < ix.dim_; ++j)
            row[j] = static_cast<double>(e.caption_embedding[j]) / norm;
        ix.ids_.push_back(e.image_id);
        ix.payloads_.push_back(std::move(e.payload_ref));
    }

    if (mode == IndexMode::Exact) return ix;

    // Inverted file over spherical k-means cells.
    int nlist = params.num_lists > 0
                    ? params.num_lists
                    : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    nlist = std::min<int>(nlist, static_cast<int>(n));
    ix.probes_ = params.probes > 0 ? params.probes : std::max(8, nlist / 4);
    ix.probes_ = std::min(ix.probes_, nlist);

    const std::size_t d = ix.dim_;
    Rng rng(params.seed);
    // Seed centroids with distinct entries.
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    for (int j = 0; j < nlist; ++j) {
        std::size_t k = j + static_cast<std::size_t>(rng.below(n - j));
        std::swap(pick[j], pick[k]);
    }
    ix.centroids_.resize(static_cast<std::size_t>(nlist) * d);
    for (int j = 0; j < nlist; ++j)
        std::copy_n(&ix.vectors_[pick[j] * d], d, &ix.centroids_[static_cast<std::size_t>(j) * d]);

    std::vector<std::uint32_t> assign(n, 0);
    std::vector<double> best(n);
    for (int iter = 0; iter < std::max(1, params.kmeans_iters); ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = &ix.vectors_[i * d];
            double bs = -2.0;
            std::uint32_t bj = 0;
            for (int j = 0; j < nlist; ++j) {
                double s = dot_rows(row, &ix.centroids_[static_cast<std::size_t>(j) * d], d);
                if (s > bs) {
                    bs = s;
                    bj = static_cast<std::uint32_t>(j);
                }
            }
            assign[i] = bj;
            best[i] = bs;
        }
        std::vector<double> sums(static_cast<std::size_t>(nlist) * d, 0.0);
        std::vector<std::size_t> counts(nlist, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = &ix.vectors_[i * d];
            double* c = &sums[static_cast<std::size_t>(assign[i]) * d];
            for (std::size_t k = 0; k < d; ++k) c[k] += row[k];
            ++counts[assign[i]];
        }
        for (int j = 0; j < nlist; ++j) {
            double* c = &ix.centroids_[static_cast<std::size_t>(j) * d];
            if (counts[j] == 0) {
                // Re-seed an empty cell with the worst-assigned point.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (best[i] < best[far]) far = i;
                std::copy_n(&ix.vectors_[far * d], d, c);
                best[far] = 2.0;
                continue;
            }
            double norm = 0.0;
            const double* s = &sums[static_cast<std::size_t>(j) * d];
            for (std::size_t k = 0; k < d; ++k) norm += s[k] * s[k];
            norm = std::sqrt(norm);
            if (norm == 0.0) continue; // keep previous centroid
            for (std::size_t k = 0; k < d; ++k) c[k] = s[k] / norm;
        }
    }
    // Final assignment -> inverted lists.
    ix.lists_.assign(nlist, {});
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &ix.vectors_[i * d];
        double bs = -2.0;
        std::uint32_t bj = 0;
        for (int j = 0; j < nlist; ++j) {
            double s = dot_rows(row, &ix.centroids_[static_cast<std::size_t>(j) * d], d);
            if (s > bs) {
                bs = s;
                bj = static_cast<std::uint32_t>(j);
            }
        }
        ix.lists_[bj].push_back(static_cast<std::uint32_t>(i));
    }
    return ix;
}

void CaptionIndex::scan(std::span<const double> q, std::span<const std::uint32_t> rows,
                        int top_k, std::vector<SearchHit>& out) const {
    auto worse = [](const SearchHit& a, const SearchHit& b) { return hit_better(a, b); };
    // Min-heap on "better": top() is the weakest kept hit.
    std::priority_queue<SearchHit, std::vector<SearchHit>, decltype(worse)> heap(worse);
    for (std::uint32_t r : rows) {
        SearchHit h{ids_[r], dot_rows(q.data(), &vectors_[static_cast<std::size_t>(r) * dim_], dim_)};
        if (heap.size() < static_cast<std::size_t>(top_k)) {
            heap.push(h);
        } else if (hit_better(h, heap.top())) {
            heap.pop();
            heap.push(h);
        }
    }
    out.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
}

QueryResult CaptionIndex::query(std::span<const double> embedding, int top_k) const {
    if (embedding.size() != dim_)
        throw std::invalid_argument("CaptionIndex::query: dimension mismatch");
    if (top_k < 1) throw std::invalid_argument("CaptionIndex::query: top_k must be >= 1");
    std::vector<double> q(embedding.begin(), embedding.end());
    double norm = std::sqrt(dot_rows(q.data(), q.data(), dim_));
    if (norm == 0.0) throw std::invalid_argument("CaptionIndex::query: zero-norm query");
    for (double& v : q) v /= norm;

    QueryResult res;
    if (static_cast<std::size_t>(top_k) > ids_.size()) {
        res.truncated = true;
        top_k = static_cast<int>(ids_.size());
    }

    if (mode_ == IndexMode::Exact) {
        std::vector<std::uint32_t> all(ids_.size());
        std::iota(all.begin(), all.end(), 0);
        scan(q, all, top_k, res.hits);
        return res;
    }

    const int nlist = static_cast<int>(lists_.size());
    std::vector<std::pair<double, int>> ranked(nlist);
    for (int j = 0; j < nlist; ++j)
        ranked[j] = {dot_rows(q.data(), &centroids_[static_cast<std::size_t>(j) * dim_], dim_), j};
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::uint32_t> rows;
    for (int p = 0; p < probes_ && p < nlist; ++p) {
        const auto& cell = lists_[static_cast<std::size_t>(ranked[p].second)];
        rows.insert(rows.end(), cell.begin(), cell.end());
    }
    scan(q, rows, top_k, res.hits);
    return res;
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw ConfigError("corpus: truncated file");
    return v;
}

} // namespace

void save_corpus(const std::string& path, const std::vector<CorpusEntry>& entries) {
    if (entries.empty()) throw std::invalid_argument("save_corpus: empty corpus");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_corpus: cannot write '" + path + "'");
    const auto dim = static_cast<std::uint32_t>(entries.front().caption_embedding.size());
    put(out, static_cast<std::uint64_t>(entries.size()));
    put(out, dim);
    for (const auto& e : entries) {
        if (e.caption_embedding.size() != dim)
            throw std::invalid_argument("save_corpus: inconsistent embedding dimension");
        put(out, e.image_id);
        put(out, static_cast<std::uint32_t>(e.payload_ref.size()));
        out.write(e.payload_ref.data(), static_cast<std::streamsize>(e.payload_ref.size()));
        out.write(reinterpret_cast<const char*>(e.caption_embedding.data()),
                  static_cast<std::streamsize>(sizeof(float) * dim));
    }
    if (!out) throw std::runtime_error("save_corpus: write failed for '" + path + "'");
}

std::vector<CorpusEntry> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("corpus: cannot open '" + path + "'");
    const auto count = get<std::uint64_t>(in);
    const auto dim = get<std::uint32_t>(in);
    if (count == 0 || dim == 0) throw ConfigError("corpus: empty header in '" + path + "'");
    std::vector<CorpusEntry> entries;
    entries.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        CorpusEntry e;
        e.image_id = get<std::int64_t>(in);
        auto len = get<std::uint32_t>(in);
        e.payload_ref.resize(len);
        if (len > 0) {
            in.read(e.payload_ref.data(), len);
            if (!in) throw ConfigError("corpus: truncated payload");
        }
        e.caption_embedding.resize(dim);
        in.read(reinterpret_cast<char*>(e.caption_embedding.data()),
                static_cast<std::streamsize>(sizeof(float) * dim));
        if (!in) throw ConfigError("corpus: truncated embedding");
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace scout
