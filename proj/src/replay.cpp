#include "scout/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "scout/util.hpp"

namespace scout {

std::vector<ImageRecord> retain_top_fraction(std::span<const ImageRecord> new_images,
                                             double fraction) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("retain_top_fraction: fraction outside (0, 1]");
    if (new_images.empty()) return {};
    std::vector<std::size_t> idx(new_images.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (new_images[a].reward != new_images[b].reward)
            return new_images[a].reward > new_images[b].reward;
        return new_images[a].id < new_images[b].id;
    });
    idx.resize(ceil_fraction(new_images.size(), fraction));
    std::vector<ImageRecord> kept;
    kept.reserve(idx.size());
    for (std::size_t i : idx) kept.push_back(new_images[i]);
    return kept;
}

TrainingSet compose_training_set(std::span<const ImageRecord> candidates,
                                 const ReplayBuffer& buffer, const TargetSet& target,
                                 double pcr, Rng& rng, int epochs) {
    if (pcr < 0.0) throw std::invalid_argument("compose_training_set: pcr must be >= 0");
    if (epochs < 1) throw std::invalid_argument("compose_training_set: epochs must be >= 1");
    TrainingSet ts;
    ts.epochs = epochs;
    ts.candidate_ids.reserve(candidates.size());
    for (const auto& c : candidates) ts.candidate_ids.push_back(c.id);

    const auto want = static_cast<std::size_t>(
        std::llround(pcr * static_cast<double>(candidates.size())));
    const std::size_t pool = buffer.size() + target.size();
    if (want == 0) return ts;
    if (pool == 0) {
        ts.pool_exhausted = true;
        return ts;
    }

    auto to_item = [&](std::size_t i) -> TrainingSet::HistoryItem {
        if (i < buffer.size()) return {true, i};
        return {false, i - buffer.size()};
    };
    ts.history.reserve(want);
    if (want <= pool) {
        // Partial Fisher-Yates: first `want` slots of a virtual shuffle.
        std::vector<std::size_t> ids(pool);
        std::iota(ids.begin(), ids.end(), 0);
        for (std::size_t i = 0; i < want; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(pool - i));
            std::swap(ids[i], ids[j]);
            ts.history.push_back(to_item(ids[i]));
        }
    } else {
        for (std::size_t i = 0; i < want; ++i)
            ts.history.push_back(to_item(static_cast<std::size_t>(rng.below(pool))));
    }
    return ts;
}

namespace {

constexpr char kMagic[4] = {'S', 'C', 'R', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw ConfigError(std::string("buffer checkpoint: truncated ") + what);
    return v;
}

} // namespace

void save_buffer_checkpoint(const std::string& path, const ReplayBuffer& buffer,
                            int next_iteration, std::int64_t next_record_id,
                            std::int64_t queries_issued) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("buffer checkpoint: cannot write '" + path + "'");
    out.write(kMagic, sizeof kMagic);
    put(out, kVersion);
    put(out, static_cast<std::uint64_t>(buffer.size()));
    const std::uint32_t dim =
        buffer.records.empty() ? 0u
                               : static_cast<std::uint32_t>(buffer.records.front().embedding.size());
    put(out, dim);
    put(out, static_cast<std::int32_t>(next_iteration));
    put(out, next_record_id);
    put(out, queries_issued);
    for (const auto& r : buffer.records) {
        if (r.embedding.size() != dim)
            throw std::runtime_error("buffer checkpoint: inconsistent record dimension");
        put(out, r.id);
        put(out, static_cast<std::int32_t>(r.source_concept));
        put(out, static_cast<std::int32_t>(r.iteration));
        put(out, r.reward);
        out.write(reinterpret_cast<const char*>(r.embedding.data()),
                  static_cast<std::streamsize>(sizeof(double) * dim));
    }
    if (!out) throw std::runtime_error("buffer checkpoint: write failed for '" + path + "'");
}

BufferCheckpoint load_buffer_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("buffer checkpoint: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ConfigError("buffer checkpoint: bad magic in '" + path + "'");
    if (get<std::uint32_t>(in, "version") != kVersion)
        throw ConfigError("buffer checkpoint: unsupported version");
    const auto count = get<std::uint64_t>(in, "count");
    const auto dim = get<std::uint32_t>(in, "dimension");
    BufferCheckpoint cp;
    cp.next_iteration = get<std::int32_t>(in, "iteration");
    cp.next_record_id = get<std::int64_t>(in, "record id");
    cp.queries_issued = get<std::int64_t>(in, "query counter");
    cp.buffer.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ImageRecord r;
        r.id = get<std::int64_t>(in, "record");
        r.source_concept = get<std::int32_t>(in, "record");
        r.iteration = get<std::int32_t>(in, "record");
        r.reward = get<double>(in, "record");
        r.embedding.resize(dim);
        in.read(reinterpret_cast<char*>(r.embedding.data()),
                static_cast<std::streamsize>(sizeof(double) * dim));
        if (!in) throw ConfigError("buffer checkpoint: truncated record");
        cp.buffer.records.push_back(std::move(r));
    }
    return cp;
}

} // namespace scout
