#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "scout/rng.hpp"
#include "scout/util.hpp"
#include "scout/vec.hpp"
#include "scout/vocabulary.hpp"

using namespace scout;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "vocab_test_" + std::to_string(counter++) + ".tmp";
        std::ofstream out(path, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

Vocabulary random_vocab(int n, int d, Rng& rng) {
    Vocabulary v;
    v.dimension = d;
    for (int i = 0; i < n; ++i) {
        Concept c;
        c.id = i;
        c.lemma = "c" + std::to_string(i);
        c.embedding.resize(d);
        for (double& x : c.embedding) x = rng.normal();
        v.concepts.push_back(std::move(c));
    }
    return v;
}

} // namespace

TEST_SUITE("vocabulary") {
    TEST_CASE("loads tab-separated records") {
        TempFile f("# comment line\n"
                   "dog\tcanine\ta domesticated animal\t1.0\t0\t0\t0\n"
                   "cat\tfeline\t\t0\t1.0\t0\t0\n"
                   "sail\t\t\t0\t0\t0.5\t0.5\n");
        Vocabulary v = load_vocabulary(f.path);
        REQUIRE(v.concepts.size() == 3);
        CHECK(v.dimension == 4);
        CHECK(v.concepts[0].id == 0);
        CHECK(v.concepts[0].lemma == "dog");
        CHECK(v.concepts[0].hypernym == "canine");
        CHECK(v.concepts[1].definition.empty());
        CHECK(v.concepts[2].embedding[2] == 0.5);
        CHECK(v.find(1)->lemma == "cat");
        CHECK(v.find(99) == nullptr);
    }

    TEST_CASE("rejects malformed files with the offending line") {
        TempFile dim("a\tx\ty\t1\t0\t0\t0\nb\tx\ty\t1\t0\t0\n");
        CHECK_THROWS_WITH_AS(load_vocabulary(dim.path),
                             doctest::Contains("line 2"), ConfigError);
        TempFile zero("a\tx\ty\t0\t0\n");
        CHECK_THROWS_AS(load_vocabulary(zero.path), ConfigError);
        TempFile inf("a\tx\ty\tinf\t0\n");
        CHECK_THROWS_AS(load_vocabulary(inf.path), ConfigError);
        TempFile empty("# nothing\n");
        CHECK_THROWS_AS(load_vocabulary(empty.path), ConfigError);
        CHECK_THROWS_AS(load_vocabulary("no_such_file.tsv"), ConfigError);
    }

    TEST_CASE("renders the embedding template") {
        Concept c;
        c.lemma = "Chihuahua";
        c.hypernym = "toy dog";
        c.definition = "an old breed of tiny short-haired dog";
        CHECK(render_embedding_text(c) ==
              "Chihuahua (toy dog): an old breed of tiny short-haired dog");

        Concept sail;
        sail.lemma = "sail";
        CHECK(render_embedding_text(sail) == "sail");

        Concept duck;
        duck.lemma = "duck";
        duck.hypernym = "bird";
        CHECK(render_embedding_text(duck) == "duck (bird)");

        Concept noHyp;
        noHyp.lemma = "run";
        noHyp.definition = "move fast";
        CHECK(render_embedding_text(noHyp) == "run: move fast");

        Concept bad;
        CHECK_THROWS(render_embedding_text(bad));
    }

    TEST_CASE("loads label embeddings") {
        TempFile f("tabby\t1\t0\nsiamese\t0\t1\n");
        LabelSet ls = load_label_embeddings(f.path);
        REQUIRE(ls.vectors.size() == 2);
        CHECK(ls.names[0] == "tabby");
        CHECK(ls.vectors[1][1] == 1.0);
    }

    TEST_CASE("prune keeps everything at fraction 1") {
        Rng rng(5);
        Vocabulary v = random_vocab(12, 3, rng);
        std::vector<std::vector<double>> labels = {{1, 0, 0}, {0, 1, 0}};
        Vocabulary kept = prune_by_label_set(v, labels, 1.0);
        REQUIRE(kept.concepts.size() == 12);
        for (int i = 0; i < 12; ++i) CHECK(kept.concepts[i].id == i);
    }

    TEST_CASE("prune picks the nearest concepts (hand-placed)") {
        Vocabulary v;
        v.dimension = 2;
        std::vector<std::vector<double>> embs = {
            {1, 0}, {0.9, 0.1}, {0, 1}, {-1, 0}, {-0.9, -0.1}, {0.5, -0.8}};
        for (int i = 0; i < 6; ++i) {
            Concept c;
            c.id = i;
            c.lemma = "c" + std::to_string(i);
            c.embedding = embs[i];
            v.concepts.push_back(c);
        }
        std::vector<std::vector<double>> labels = {{1, 0}, {0, 1}, {-1, -0.05}};
        Vocabulary kept = prune_by_label_set(v, labels, 0.5, 1);
        REQUIRE(kept.concepts.size() == 3);
        // best single-label cosine: ids 0 (1.0), 3 (~1.0), 1 (~0.995) -- ids 2,4 close behind
        std::set<int> ids;
        for (const auto& c : kept.concepts) ids.insert(c.id);
        // verify against brute force
        std::set<int> expect;
        std::vector<std::pair<double, int>> scored;
        for (int i = 0; i < 6; ++i) {
            double best = -2.0;
            for (const auto& l : labels) best = std::max(best, cosine(embs[i], l));
            scored.push_back({-best, i});
        }
        std::sort(scored.begin(), scored.end());
        for (int i = 0; i < 3; ++i) expect.insert(scored[i].second);
        CHECK(ids == expect);
    }

    TEST_CASE("prune matches a brute-force oracle on random instances") {
        Rng rng(77);
        for (int trial = 0; trial < 20; ++trial) {
            int n = 8 + static_cast<int>(rng.below(20));
            int d = 2 + static_cast<int>(rng.below(4));
            int nl = 2 + static_cast<int>(rng.below(5));
            Vocabulary v = random_vocab(n, d, rng);
            std::vector<std::vector<double>> labels(nl, std::vector<double>(d));
            for (auto& l : labels)
                for (double& x : l) x = rng.normal();
            int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nl)));
            double fraction = 0.2 + 0.6 * rng.uniform();

            Vocabulary kept = prune_by_label_set(v, labels, fraction, k);

            // oracle: mean of k largest cosines, sort (score desc, id asc)
            std::vector<std::pair<double, int>> scored;
            for (const auto& c : v.concepts) {
                std::vector<double> sims;
                for (const auto& l : labels) sims.push_back(cosine(c.embedding, l));
                std::sort(sims.rbegin(), sims.rend());
                double s = 0.0;
                for (int i = 0; i < k; ++i) s += sims[i];
                scored.push_back({s / k, c.id});
            }
            std::sort(scored.begin(), scored.end(), [](auto a, auto b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            std::size_t want = ceil_fraction(v.concepts.size(), fraction);
            REQUIRE(kept.concepts.size() == want);
            std::set<int> expect;
            for (std::size_t i = 0; i < want; ++i) expect.insert(scored[i].second);
            std::set<int> got;
            for (const auto& c : kept.concepts) got.insert(c.id);
            CHECK(got == expect);
            // output ordered by original id
            for (std::size_t i = 1; i < kept.concepts.size(); ++i)
                CHECK(kept.concepts[i - 1].id < kept.concepts[i].id);
        }
    }

    TEST_CASE("pruning is monotone in the fraction") {
        Rng rng(9);
        Vocabulary v = random_vocab(30, 4, rng);
        std::vector<std::vector<double>> labels(4, std::vector<double>(4));
        for (auto& l : labels)
            for (double& x : l) x = rng.normal();
        Vocabulary small = prune_by_label_set(v, labels, 0.2);
        Vocabulary big = prune_by_label_set(v, labels, 0.6);
        std::set<int> bigIds;
        for (const auto& c : big.concepts) bigIds.insert(c.id);
        for (const auto& c : small.concepts) CHECK(bigIds.count(c.id) == 1);
    }

    TEST_CASE("prune validates inputs") {
        Rng rng(1);
        Vocabulary v = random_vocab(5, 3, rng);
        std::vector<std::vector<double>> wrong = {{1, 0}};
        CHECK_THROWS(prune_by_label_set(v, wrong, 0.5));
        std::vector<std::vector<double>> ok = {{1, 0, 0}};
        CHECK_THROWS(prune_by_label_set(v, ok, 0.0));
        CHECK_THROWS(prune_by_label_set(v, {}, 0.5));
    }
}
