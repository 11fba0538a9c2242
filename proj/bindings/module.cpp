// Python bindings for the exploration toolkit's main operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scout/analysis.hpp"
#include "scout/concept_model.hpp"
#include "scout/dedup.hpp"
#include "scout/engine.hpp"
#include "scout/environments.hpp"
#include "scout/relevance.hpp"
#include "scout/scheduler.hpp"
#include "scout/search_index.hpp"
#include "scout/simulator.hpp"
#include "scout/vocabulary.hpp"

namespace py = pybind11;
using namespace scout;

namespace {

KernelKind parse_kernel(const std::string& name) {
    if (name == "exponential") return KernelKind::Exponential;
    if (name == "squared_exponential") return KernelKind::SquaredExponential;
    throw std::invalid_argument("kernel must be 'exponential' or 'squared_exponential'");
}

GprModel fit_gpr(const std::vector<std::vector<double>>& embeddings,
                 const std::vector<double>& rewards, double jitter,
                 const std::string& kernel) {
    if (embeddings.size() != rewards.size())
        throw std::invalid_argument("need one reward per embedding");
    std::vector<Observation> obs(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        obs[i].concept_id = static_cast<int>(i);
        obs[i].embedding = embeddings[i];
        obs[i].reward = rewards[i];
    }
    return GprModel::fit(obs, jitter, parse_kernel(kernel));
}

GrayImage image_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty())
        throw std::invalid_argument("image must have at least one pixel");
    GrayImage img;
    img.height = static_cast<int>(rows.size());
    img.width = static_cast<int>(rows.front().size());
    img.pixels.reserve(static_cast<std::size_t>(img.width) * img.height);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != img.width)
            throw std::invalid_argument("image rows must have equal length");
        img.pixels.insert(img.pixels.end(), row.begin(), row.end());
    }
    return img;
}

TierSpec tier_spec_from(std::size_t n, const std::vector<std::int64_t>& boundaries,
                        const std::vector<double>& masses) {
    if (boundaries.empty() && masses.empty())
        return TierSpec::defaults(static_cast<std::int64_t>(n));
    TierSpec t;
    t.boundaries = boundaries;
    t.masses = masses;
    t.validate(static_cast<std::int64_t>(n));
    return t;
}

py::dict metrics_to_dict(const IterationMetrics& m) {
    py::dict d;
    d["iteration"] = m.iteration;
    d["queries_issued"] = m.queries_issued_total;
    d["queries_kept"] = m.queries_kept;
    d["new_records"] = m.new_records;
    d["kept_records"] = m.kept_records;
    d["buffer_size"] = m.buffer_size;
    d["mean_query_score"] = m.mean_query_score;
    d["fidelity"] = m.fidelity;
    d["accuracy"] = m.accuracy;
    d["categories_hit"] = m.categories_hit;
    d["queries_to_all_categories"] = m.queries_to_all_categories;
    d["queries_to_all_relevant"] = m.queries_to_all_relevant;
    d["observed_score_by_category"] = m.observed_score_by_category;
    d["estimated_score_by_category"] = m.estimated_score_by_category;
    return d;
}

std::vector<py::dict> run_sim_episode(const std::string& mode, std::uint64_t seed,
                                      int iterations, int queries_per_iteration,
                                      int results_per_query, int min_results, int eval_k,
                                      std::int64_t vocab_size, int clusters,
                                      int cluster_size, int latent_dim) {
    SimParams sp;
    sp.vocab_size = vocab_size;
    sp.clusters = clusters;
    sp.cluster_size = cluster_size;
    sp.latent_dim = latent_dim;
    sp.seed = seed;

    EngineConfig cfg;
    cfg.mode = parse_mode(mode);
    cfg.seed = seed;
    cfg.queries_per_iteration = queries_per_iteration;
    cfg.results_per_query = results_per_query;
    cfg.min_results = min_results;
    cfg.eval_k = eval_k;
    cfg.validate();

    SimEnvironment env(SimWorld::make(sp));
    Engine engine(cfg, env);
    auto rows = engine.run(iterations);
    std::vector<py::dict> out;
    out.reserve(rows.size());
    for (const auto& m : rows) out.push_back(metrics_to_dict(m));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Targeted-exploration toolkit: GP-scored query scheduling, relevance "
              "rewards, tiered sampling, discovery-time analysis, caption search, "
              "difference-hash dedup, and a deterministic simulated web.";

    // --- discovery-time analysis ------------------------------------------
    m.def("harmonic", &harmonic, py::arg("m"),
          "m-th harmonic number, summed smallest terms first.");
    m.def(
        "analytic_times",
        [](std::int64_t n, std::int64_t c, std::int64_t s) {
            AnalyticTimes at = analytic_times(n, c, s);
            py::dict d;
            d["base"] = at.base;
            d["gpr"] = at.gpr;
            d["speedup"] = at.speedup;
            return d;
        },
        py::arg("n"), py::arg("c"), py::arg("s"),
        "Closed-form expected discovery times for n concepts holding c relevant "
        "clusters of size s: base = n*H_{c*s}, gpr = n*H_c/s.");
    m.def(
        "simulate_discovery",
        [](std::int64_t n, std::int64_t c, std::int64_t s, const std::string& mode,
           int trials, std::uint64_t seed) {
            DiscoveryConfig cfg;
            cfg.n = n;
            cfg.c = c;
            cfg.s = s;
            cfg.trials = trials;
            cfg.seed = seed;
            if (mode == "base") cfg.mode = DiscoveryMode::Base;
            else if (mode == "gpr") cfg.mode = DiscoveryMode::Gpr;
            else throw std::invalid_argument("mode must be 'base' or 'gpr'");
            DiscoveryStats st = simulate_discovery(cfg);
            py::dict d;
            d["mean"] = st.mean;
            d["std_error"] = st.std_error;
            d["trials"] = st.trials;
            return d;
        },
        py::arg("n"), py::arg("c"), py::arg("s"), py::arg("mode") = "base",
        py::arg("trials") = 1000, py::arg("seed") = 0,
        "Monte-Carlo discovery time; equal seeds pair trials across modes.");

    // --- relevance rewards -------------------------------------------------
    m.def(
        "image_reward",
        [](const std::vector<double>& y, const std::vector<std::vector<double>>& targets,
           int k) {
            TargetSet ts;
            ts.embeddings = targets;
            return image_reward(y, ts, k);
        },
        py::arg("embedding"), py::arg("targets"), py::arg("k") = 15,
        "Mean of the k largest cosine similarities to the target set.");
    m.def(
        "concept_score",
        [](const std::vector<double>& rewards, int top_n) {
            return concept_score(rewards, top_n);
        },
        py::arg("rewards"), py::arg("top_n") = 10,
        "Mean of the top_n largest rewards (top_n <= 0 averages everything).");
    m.def(
        "infonce_loss",
        [](const std::vector<double>& q, const std::vector<double>& k_plus,
           const std::vector<std::vector<double>>& negatives, double tau) {
            return infonce_loss(q, k_plus, negatives, tau).value;
        },
        py::arg("query"), py::arg("positive"), py::arg("negatives"),
        py::arg("tau") = 1.0,
        "Contrastive loss on raw dot products; no negatives gives exactly 0.");

    // --- Gaussian-process concept model -------------------------------------
    m.def(
        "gp_kernel",
        [](const std::vector<double>& a, const std::vector<double>& b,
           const std::string& kernel) { return gp_kernel(a, b, parse_kernel(kernel)); },
        py::arg("a"), py::arg("b"), py::arg("kernel") = "exponential");

    py::class_<GprModel>(m, "Gpr",
                         "Noise-free GP posterior over concept embeddings; prior mean "
                         "is the empirical mean of the observed rewards.")
        .def_static("fit", &fit_gpr, py::arg("embeddings"), py::arg("rewards"),
                    py::arg("jitter") = 1e-8, py::arg("kernel") = "exponential")
        .def(
            "predict",
            [](const GprModel& g, const std::vector<double>& e) { return g.predict(e); },
            py::arg("embedding"), "Posterior (mean, std) at one embedding.")
        .def(
            "predict_batch",
            [](const GprModel& g, const std::vector<std::vector<double>>& es) {
                std::vector<double> means, stds;
                g.predict_batch(es, means, stds);
                return std::make_pair(means, stds);
            },
            py::arg("embeddings"), "Posterior (means, stds) for many embeddings.")
        .def_property_readonly("prior_mean", &GprModel::prior_mean)
        .def_property_readonly("jitter_used", &GprModel::jitter_used)
        .def_property_readonly("observation_count", &GprModel::observation_count);

    // --- tiered Boltzmann sampling ------------------------------------------
    m.def(
        "temperature_from_smr",
        [](const std::vector<double>& scores, double smr) {
            return temperature_from_smr(scores, smr);
        },
        py::arg("scores"), py::arg("smr") = 3.0,
        "Temperature giving a max-min logit gap of smr (+inf for equal scores).");
    m.def(
        "softmax_distribution",
        [](const std::vector<double>& scores, double tau) {
            return softmax_distribution(scores, tau);
        },
        py::arg("scores"), py::arg("tau"),
        "p_i proportional to exp(score_i / tau); tau=+inf is uniform.");
    m.def(
        "tiered_distribution",
        [](const std::vector<double>& sorted_probabilities,
           const std::vector<std::int64_t>& boundaries, const std::vector<double>& masses) {
            TierSpec t = tier_spec_from(sorted_probabilities.size(), boundaries, masses);
            return apply_tiering(sorted_probabilities, t);
        },
        py::arg("sorted_probabilities"), py::arg("boundaries") = std::vector<std::int64_t>{},
        py::arg("masses") = std::vector<double>{},
        "Rescales a rank-sorted distribution so each rank tier holds a fixed "
        "mass; defaults to the 250/0.8, 750/0.1, rest/0.1 tiers.");

    // --- vocabulary ----------------------------------------------------------
    m.def(
        "prune_vocabulary",
        [](const std::vector<std::vector<double>>& embeddings,
           const std::vector<std::vector<double>>& labels, double fraction, int k) {
            Vocabulary v;
            v.dimension = embeddings.empty() ? 0 : embeddings.front().size();
            v.concepts.resize(embeddings.size());
            for (std::size_t i = 0; i < embeddings.size(); ++i) {
                v.concepts[i].id = static_cast<int>(i);
                v.concepts[i].lemma = "c" + std::to_string(i);
                v.concepts[i].embedding = embeddings[i];
            }
            Vocabulary kept = prune_by_label_set(v, labels, fraction, k);
            std::vector<int> ids;
            ids.reserve(kept.size());
            for (const auto& c : kept.concepts) ids.push_back(c.id);
            return ids;
        },
        py::arg("embeddings"), py::arg("labels"), py::arg("fraction"), py::arg("k") = -1,
        "Indices of the ceil(fraction*N) concepts closest to the label set "
        "(mean top-k cosine, ties to the lower index).");

    // --- caption search ------------------------------------------------------
    py::class_<CaptionIndex>(m, "SearchIndex",
                             "Cosine retrieval over caption embeddings: exact scan or "
                             "an inverted-file index over spherical k-means cells.")
        .def_static(
            "build",
            [](const std::vector<std::int64_t>& ids,
               const std::vector<std::vector<double>>& embeddings, const std::string& mode,
               int num_lists, int probes, std::uint64_t seed) {
                if (ids.size() != embeddings.size())
                    throw std::invalid_argument("need one id per embedding");
                std::vector<CorpusEntry> entries(ids.size());
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    entries[i].image_id = ids[i];
                    entries[i].caption_embedding.assign(embeddings[i].begin(),
                                                        embeddings[i].end());
                }
                IndexMode im;
                if (mode == "exact") im = IndexMode::Exact;
                else if (mode == "accelerated") im = IndexMode::Accelerated;
                else throw std::invalid_argument("mode must be 'exact' or 'accelerated'");
                AccelParams ap;
                ap.num_lists = num_lists;
                ap.probes = probes;
                ap.seed = seed;
                return CaptionIndex::build(std::move(entries), im, ap);
            },
            py::arg("ids"), py::arg("embeddings"), py::arg("mode") = "exact",
            py::arg("num_lists") = 0, py::arg("probes") = 0, py::arg("seed") = 0)
        .def(
            "query",
            [](const CaptionIndex& ix, const std::vector<double>& embedding, int top_k) {
                QueryResult res = ix.query(embedding, top_k);
                std::vector<std::pair<std::int64_t, double>> hits;
                hits.reserve(res.hits.size());
                for (const auto& h : res.hits) hits.emplace_back(h.image_id, h.score);
                return hits;
            },
            py::arg("embedding"), py::arg("top_k") = 100,
            "Descending (id, cosine) pairs; ties go to the lower id.")
        .def_property_readonly("size", &CaptionIndex::size)
        .def_property_readonly("dimension", &CaptionIndex::dimension);

    // --- duplicate audit -----------------------------------------------------
    m.def(
        "dhash",
        [](const std::vector<std::vector<double>>& rows) {
            return dhash(image_from_rows(rows));
        },
        py::arg("pixels"),
        "64-bit difference hash of a row-major grayscale image; invariant to "
        "additive intensity shifts.");
    m.def(
        "count_collisions",
        [](const std::vector<std::uint64_t>& reference,
           const std::vector<std::uint64_t>& probes, int max_hamming) {
            CollisionReport rep = count_collisions(reference, probes, max_hamming);
            py::dict d;
            d["count"] = rep.count;
            d["fraction"] = rep.fraction;
            d["formatted"] = rep.formatted();
            return d;
        },
        py::arg("reference"), py::arg("probes"), py::arg("max_hamming") = 0,
        "How many probe hashes fall within max_hamming bits of the reference set.");

    // --- simulated decision loop ----------------------------------------------
    m.def("run_sim_episode", &run_sim_episode, py::arg("mode") = "ours",
          py::arg("seed") = 0, py::arg("iterations") = 15,
          py::arg("queries_per_iteration") = 20, py::arg("results_per_query") = 25,
          py::arg("min_results") = 5, py::arg("eval_k") = 15,
          py::arg("vocab_size") = 5000, py::arg("clusters") = 3,
          py::arg("cluster_size") = 60, py::arg("latent_dim") = 16,
          "Runs the full decision loop against the simulated web (defaults match "
          "configs/sim-standard.cfg) and returns one metrics dict per iteration. "
          "Modes: random, ours, ours_plus_plus, labels_only, labels_plus_relevant.");
}
