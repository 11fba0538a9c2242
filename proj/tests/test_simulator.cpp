#include <doctest.h>

#include <cmath>
#include <vector>

#include "scout/simulator.hpp"
#include "scout/vec.hpp"

using namespace scout;

namespace {

SimParams small_params() {
    SimParams p;
    p.vocab_size = 400;
    p.clusters = 3;
    p.cluster_size = 10;
    p.latent_dim = 8;
    p.target_size = 90;
    p.heldout_size = 90;
    p.seed = 42;
    return p;
}

} // namespace

TEST_SUITE("simulator") {
    TEST_CASE("cluster membership follows the id layout") {
        SimWorld world = SimWorld::make(small_params());
        CHECK(world.concept_cluster(0) == 0);
        CHECK(world.concept_cluster(9) == 0);
        CHECK(world.concept_cluster(10) == 1);
        CHECK(world.concept_cluster(29) == 2);
        CHECK(world.concept_cluster(30) == -1);
        CHECK(world.concept_cluster(399) == -1);
        CHECK(world.concept_relevant(5));
        CHECK(!world.concept_relevant(30));
        CHECK_THROWS(world.concept_cluster(-1));
        CHECK_THROWS(world.concept_cluster(400));
    }

    TEST_CASE("world shapes match the parameters") {
        SimParams p = small_params();
        SimWorld world = SimWorld::make(p);
        CHECK(world.vocabulary().size() == 400);
        CHECK(world.vocabulary().dimension == 8);
        CHECK(world.target().size() == 90);
        CHECK(world.target_labels().size() == 90);
        CHECK(world.target().dim() == 8);
        for (int label : world.target_labels()) {
            CHECK(label >= 0);
            CHECK(label < p.clusters);
        }
        // relevant concept latents stay inside the cluster ball
        for (int id = 0; id < p.clusters * p.cluster_size; ++id) {
            int cl = world.concept_cluster(id);
            REQUIRE(cl >= 0);
            // every concept in a cluster is close to every other one
            for (int other = cl * p.cluster_size; other < (cl + 1) * p.cluster_size; ++other) {
                double d = euclidean(world.vocabulary().at_index(static_cast<std::size_t>(id)).embedding,
                                     world.vocabulary().at_index(static_cast<std::size_t>(other)).embedding);
                CHECK(d <= 2.0 * p.cluster_radius + 1e-9);
            }
        }
    }

    TEST_CASE("search is a pure function of its arguments") {
        SimWorld world = SimWorld::make(small_params());
        EncoderState enc = world.initial_encoder();
        auto a = world.search(enc, 4, 1, 6, 3, 100);
        auto b = world.search(enc, 4, 1, 6, 3, 100);
        REQUIRE(a.size() == 6);
        REQUIRE(b.size() == 6);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].record.id == b[i].record.id);
            CHECK(a[i].record.id == 100 + static_cast<std::int64_t>(i));
            CHECK(a[i].true_cluster == b[i].true_cluster);
            CHECK(a[i].record.embedding == b[i].record.embedding);
            CHECK(a[i].record.source_concept == 4);
            CHECK(a[i].record.iteration == 3);
        }
        auto c = world.search(enc, 4, 1, 6, 4, 100);
        bool same = true;
        for (std::size_t i = 0; i < c.size(); ++i)
            same = same && c[i].record.embedding == a[i].record.embedding;
        CHECK(!same);
    }

    TEST_CASE("distractor rate matches the configured fraction") {
        SimParams p = small_params();
        p.distractor_rate = 0.15;
        SimWorld world = SimWorld::make(p);
        EncoderState enc = world.initial_encoder();
        int off = 0, total = 0;
        for (int it = 0; it < 200; ++it) {
            auto results = world.search(enc, 7, 0, 50, it, it * 50);
            for (const auto& r : results) {
                ++total;
                if (r.true_cluster == -1) ++off;
            }
        }
        REQUIRE(total == 10000);
        // binomial(10000, 0.15): sd of the rate ~ 0.0036, allow 5 sd
        double rate = static_cast<double>(off) / total;
        CHECK(rate > 0.15 - 5.0 * 0.0036);
        CHECK(rate < 0.15 + 5.0 * 0.0036);
        // querying an irrelevant concept yields only off-target results
        auto junk = world.search(enc, 300, 0, 40, 0, 0);
        for (const auto& r : junk) CHECK(r.true_cluster == -1);
    }

    TEST_CASE("relevant queries score higher than background at high fidelity") {
        SimWorld world = SimWorld::make(small_params());
        EncoderState sharp{0.95, 1.0};
        auto mean_cos = [&](int concept_id) {
            auto results = world.search(sharp, concept_id, -1, 40, 0, 0);
            double s = 0.0;
            int used = 0;
            for (const auto& r : results) {
                if (r.true_cluster == -1) continue;
                double best = -1.0;
                for (const auto& t : world.target().embeddings)
                    best = std::max(best, cosine(r.record.embedding, t));
                s += best;
                ++used;
            }
            REQUIRE(used > 0);
            return s / used;
        };
        auto mean_cos_bg = [&](int concept_id) {
            auto results = world.search(sharp, concept_id, -1, 40, 0, 0);
            double s = 0.0;
            for (const auto& r : results) {
                double best = -1.0;
                for (const auto& t : world.target().embeddings)
                    best = std::max(best, cosine(r.record.embedding, t));
                s += best;
            }
            return s / results.size();
        };
        double relevant = mean_cos(3);
        double background = mean_cos_bg(200);
        CHECK(relevant > background + 0.15);
    }

    TEST_CASE("encoder update is a clamped, monotone EMA") {
        SimParams p = small_params();
        EncoderState enc = {p.phi_min, 0.0};
        EncoderState all_good = enc;
        for (int i = 0; i < 50; ++i) {
            EncoderState next = encoder_update(all_good, 1.0, p);
            CHECK(next.fidelity >= all_good.fidelity);
            CHECK(next.fidelity <= p.phi_max + 1e-12);
            CHECK(next.cumulative_relevant_fraction ==
                  doctest::Approx(all_good.cumulative_relevant_fraction +
                                  p.ema_rate * (1.0 - all_good.cumulative_relevant_fraction)));
            all_good = next;
        }
        CHECK(all_good.fidelity == doctest::Approx(p.phi_max).epsilon(1e-6));

        // junk data cannot pull fidelity back down
        EncoderState after_junk = all_good;
        for (int i = 0; i < 20; ++i) {
            EncoderState next = encoder_update(after_junk, 0.0, p);
            CHECK(next.fidelity >= after_junk.fidelity - 1e-15);
            after_junk = next;
        }
        CHECK(after_junk.fidelity >= all_good.fidelity - 1e-15);

        CHECK_THROWS(encoder_update(enc, -0.1, p));
        CHECK_THROWS(encoder_update(enc, 1.1, p));
    }

    TEST_CASE("held-out accuracy is deterministic and improves with fidelity") {
        SimWorld world = SimWorld::make(small_params());
        EncoderState low{0.1, 0.0};
        EncoderState high{0.95, 1.0};
        double a1 = world.evaluate_accuracy(low, {}, 5);
        double a2 = world.evaluate_accuracy(low, {}, 5);
        CHECK(a1 == a2);
        double b = world.evaluate_accuracy(high, {}, 5);
        CHECK(b > a1);
        CHECK(b > 0.8);
        CHECK(a1 >= 0.0);
        CHECK(b <= 1.0);
    }

    TEST_CASE("parameters are validated") {
        SimParams p = small_params();
        p.clusters = 9; // exceeds latent_dim 8
        CHECK_THROWS(SimWorld::make(p));
        p = small_params();
        p.vocab_size = 25; // smaller than clusters * cluster_size
        CHECK_THROWS(SimWorld::make(p));
        p = small_params();
        p.phi_min = 0.9;
        p.phi_max = 0.1;
        CHECK_THROWS(SimWorld::make(p));
    }
}
