#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "scout/rng.hpp"
#include "scout/search_index.hpp"
#include "scout/vec.hpp"

using namespace scout;

namespace {

std::vector<CorpusEntry> random_corpus(int n, int d, Rng& rng) {
    std::vector<CorpusEntry> entries(n);
    for (int i = 0; i < n; ++i) {
        entries[i].image_id = i;
        entries[i].payload_ref = "img" + std::to_string(i);
        entries[i].caption_embedding.resize(d);
        for (float& x : entries[i].caption_embedding) x = static_cast<float>(rng.normal());
    }
    return entries;
}

// Brute-force oracle replicating the index's normalization (float storage,
// double math, ties to lower id).
std::vector<SearchHit> scan_oracle(const std::vector<CorpusEntry>& entries,
                                   std::span<const double> query, int k) {
    std::vector<double> q(query.begin(), query.end());
    normalize_in_place(q);
    std::vector<SearchHit> hits;
    for (const auto& e : entries) {
        std::vector<double> v(e.caption_embedding.begin(), e.caption_embedding.end());
        normalize_in_place(v);
        hits.push_back({e.image_id, dot(q, v)});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.image_id < b.image_id;
    });
    if (static_cast<int>(hits.size()) > k) hits.resize(static_cast<std::size_t>(k));
    return hits;
}

} // namespace

TEST_SUITE("search_index") {
    TEST_CASE("builds from three entries and retrieves itself first") {
        Rng rng(1);
        auto entries = random_corpus(3, 4, rng);
        auto query = entries[1].caption_embedding;
        CaptionIndex index = CaptionIndex::build(std::move(entries), IndexMode::Exact, {});
        CHECK(index.size() == 3);
        CHECK(index.dimension() == 4);
        std::vector<double> q(query.begin(), query.end());
        QueryResult res = index.query(q, 1);
        REQUIRE(res.hits.size() == 1);
        CHECK(res.hits[0].image_id == 1);
        CHECK(res.hits[0].score == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("exact mode equals the exhaustive scan") {
        Rng rng(2);
        auto entries = random_corpus(500, 8, rng);
        auto copy = entries;
        CaptionIndex index = CaptionIndex::build(std::move(copy), IndexMode::Exact, {});
        for (int t = 0; t < 20; ++t) {
            std::vector<double> q(8);
            for (double& x : q) x = rng.normal();
            QueryResult res = index.query(q, 10);
            auto oracle = scan_oracle(entries, q, 10);
            REQUIRE(res.hits.size() == oracle.size());
            for (std::size_t i = 0; i < oracle.size(); ++i) {
                CHECK(res.hits[i].image_id == oracle[i].image_id);
                CHECK(res.hits[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
            }
            // scores monotone non-increasing
            for (std::size_t i = 1; i < res.hits.size(); ++i)
                CHECK(res.hits[i - 1].score >= res.hits[i].score);
        }
    }

    TEST_CASE("hand-placed 2-D entries rank by angle") {
        std::vector<CorpusEntry> entries;
        for (int i = 0; i < 20; ++i) {
            CorpusEntry e;
            e.image_id = i;
            double angle = i * 0.3;
            e.caption_embedding = {static_cast<float>(std::cos(angle)),
                                   static_cast<float>(std::sin(angle))};
            entries.push_back(e);
        }
        auto copy = entries;
        CaptionIndex index = CaptionIndex::build(std::move(copy), IndexMode::Exact, {});
        std::vector<double> q = {1.0, 0.0};
        QueryResult res = index.query(q, 5);
        auto oracle = scan_oracle(entries, q, 5);
        REQUIRE(res.hits.size() == 5);
        for (int i = 0; i < 5; ++i) CHECK(res.hits[i].image_id == oracle[i].image_id);
        CHECK(res.hits[0].image_id == 0);
    }

    TEST_CASE("duplicate embeddings tie-break to the lower id") {
        std::vector<CorpusEntry> entries(3);
        entries[0] = {5, "a", {1.0f, 0.0f}};
        entries[1] = {2, "b", {1.0f, 0.0f}};
        entries[2] = {9, "c", {0.0f, 1.0f}};
        CaptionIndex index = CaptionIndex::build(std::move(entries), IndexMode::Exact, {});
        std::vector<double> q = {1.0, 0.0};
        QueryResult res = index.query(q, 3);
        REQUIRE(res.hits.size() == 3);
        CHECK(res.hits[0].image_id == 2);
        CHECK(res.hits[1].image_id == 5);
        CHECK(res.hits[2].image_id == 9);
    }

    TEST_CASE("top_k above the corpus size returns everything, flagged") {
        Rng rng(3);
        CaptionIndex index =
            CaptionIndex::build(random_corpus(4, 3, rng), IndexMode::Exact, {});
        std::vector<double> q = {1, 0, 0};
        QueryResult res = index.query(q, 100);
        CHECK(res.hits.size() == 4);
        CHECK(res.truncated);
        QueryResult fit = index.query(q, 4);
        CHECK(!fit.truncated);
    }

    TEST_CASE("build and query validate input") {
        CHECK_THROWS(CaptionIndex::build({}, IndexMode::Exact, {}));

        std::vector<CorpusEntry> mixed(2);
        mixed[0] = {0, "", {1.0f, 0.0f}};
        mixed[1] = {1, "", {1.0f}};
        CHECK_THROWS(CaptionIndex::build(std::move(mixed), IndexMode::Exact, {}));

        std::vector<CorpusEntry> zero(1);
        zero[0] = {0, "", {0.0f, 0.0f}};
        CHECK_THROWS(CaptionIndex::build(std::move(zero), IndexMode::Exact, {}));

        std::vector<CorpusEntry> nan(1);
        nan[0] = {0, "", {std::nanf(""), 1.0f}};
        CHECK_THROWS(CaptionIndex::build(std::move(nan), IndexMode::Exact, {}));

        Rng rng(4);
        CaptionIndex ok = CaptionIndex::build(random_corpus(3, 3, rng), IndexMode::Exact, {});
        std::vector<double> wrong = {1.0, 0.0};
        CHECK_THROWS(ok.query(wrong, 1));
        std::vector<double> q3 = {1.0, 0.0, 0.0};
        CHECK_THROWS(ok.query(q3, 0));
    }

    TEST_CASE("accelerated mode reaches high recall") {
        Rng rng(5);
        const int n = 4000, d = 12, k = 20;
        auto entries = random_corpus(n, d, rng);
        auto copy = entries;
        AccelParams accel;
        accel.seed = 11;
        CaptionIndex fast = CaptionIndex::build(std::move(copy), IndexMode::Accelerated, accel);

        double hits_sum = 0.0;
        const int queries = 25;
        for (int t = 0; t < queries; ++t) {
            std::vector<double> q(d);
            for (double& x : q) x = rng.normal();
            QueryResult res = fast.query(q, k);
            auto oracle = scan_oracle(entries, q, k);
            std::set<std::int64_t> want;
            for (const auto& h : oracle) want.insert(h.image_id);
            int hit = 0;
            for (const auto& h : res.hits) hit += want.count(h.image_id) ? 1 : 0;
            hits_sum += static_cast<double>(hit) / k;
        }
        CHECK(hits_sum / queries >= 0.9);
    }

    TEST_CASE("accelerated mode is deterministic under a fixed seed") {
        Rng rng(6);
        auto entries = random_corpus(1000, 8, rng);
        AccelParams accel;
        accel.seed = 3;
        accel.num_lists = 16;
        accel.probes = 4;
        auto a = CaptionIndex::build(entries, IndexMode::Accelerated, accel);
        auto b = CaptionIndex::build(entries, IndexMode::Accelerated, accel);
        for (int t = 0; t < 10; ++t) {
            std::vector<double> q(8);
            for (double& x : q) x = rng.normal();
            QueryResult ra = a.query(q, 7);
            QueryResult rb = b.query(q, 7);
            REQUIRE(ra.hits.size() == rb.hits.size());
            for (std::size_t i = 0; i < ra.hits.size(); ++i) {
                CHECK(ra.hits[i].image_id == rb.hits[i].image_id);
                CHECK(ra.hits[i].score == rb.hits[i].score);
            }
        }
    }

    TEST_CASE("corpus file round-trips") {
        Rng rng(7);
        auto entries = random_corpus(20, 5, rng);
        entries[3].payload_ref = "with spaces and\ttabs";
        const std::string path = "corpus_roundtrip.tmp";
        save_corpus(path, entries);
        auto loaded = load_corpus(path);
        std::remove(path.c_str());
        REQUIRE(loaded.size() == entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            CHECK(loaded[i].image_id == entries[i].image_id);
            CHECK(loaded[i].payload_ref == entries[i].payload_ref);
            CHECK(loaded[i].caption_embedding == entries[i].caption_embedding);
        }
        CHECK_THROWS(load_corpus("missing_corpus.bin"));
    }
}
