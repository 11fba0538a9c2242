#include "scout/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "scout/relevance.hpp"
#include "scout/util.hpp"

namespace scout {

ExploreMode parse_mode(const std::string& name) {
    if (name == "random") return ExploreMode::Random;
    if (name == "ours") return ExploreMode::Ours;
    if (name == "ours_plus_plus") return ExploreMode::OursPlusPlus;
    if (name == "labels_only") return ExploreMode::LabelsOnly;
    if (name == "labels_plus_relevant") return ExploreMode::LabelsPlusRelevant;
    throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(ExploreMode mode) {
    switch (mode) {
        case ExploreMode::Random: return "random";
        case ExploreMode::Ours: return "ours";
        case ExploreMode::OursPlusPlus: return "ours_plus_plus";
        case ExploreMode::LabelsOnly: return "labels_only";
        case ExploreMode::LabelsPlusRelevant: return "labels_plus_relevant";
    }
    throw std::logic_error("mode_name: bad mode");
}

void EngineConfig::validate() const {
    if (queries_per_iteration < 1) throw ConfigError("queries_per_iteration must be >= 1");
    if (results_per_query < 1) throw ConfigError("results_per_query must be >= 1");
    if (min_results < 0) throw ConfigError("min_results must be >= 0");
    if (reward_k < 1) throw ConfigError("reward_k must be >= 1");
    if (concept_top_n < 1) throw ConfigError("concept_top_n must be >= 1");
    if (smr <= 0.0) throw ConfigError("smr must be positive");
    if (pcr < 0.0) throw ConfigError("pcr must be >= 0");
    if (retention_fraction <= 0.0 || retention_fraction > 1.0)
        throw ConfigError("retention_fraction must lie in (0, 1]");
    if (epochs_per_iteration < 1) throw ConfigError("epochs_per_iteration must be >= 1");
    if (label_mix < 0.0 || label_mix > 1.0) throw ConfigError("label_mix must lie in [0, 1]");
    if (gpr_jitter <= 0.0) throw ConfigError("gpr_jitter must be positive");
    if (eval_k < 1) throw ConfigError("eval_k must be >= 1");
    if (tier_masses.size() != tier_cuts.size() + 1)
        throw ConfigError("need one tier mass per interval (|tier_cuts| + 1)");
    double total = 0.0;
    for (double m : tier_masses) {
        if (m < 0.0) throw ConfigError("tier masses must be >= 0");
        total += m;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("tier masses must sum to 1");
    for (std::size_t i = 0; i < tier_cuts.size(); ++i) {
        if (tier_cuts[i] < 1) throw ConfigError("tier cuts must be >= 1");
        if (i > 0 && tier_cuts[i] <= tier_cuts[i - 1])
            throw ConfigError("tier cuts must be strictly increasing");
    }
    if ((mode == ExploreMode::LabelsOnly || mode == ExploreMode::LabelsPlusRelevant) &&
        label_concepts.empty())
        throw ConfigError("mode '" + mode_name(mode) + "' needs label concepts");
    if (mode == ExploreMode::OursPlusPlus && descriptors.empty())
        throw ConfigError("mode 'ours_plus_plus' needs a descriptor list");
}

TierSpec EngineConfig::tier_spec(std::int64_t vocab_size) const {
    TierSpec t;
    t.boundaries.push_back(0);
    double lost = 0.0;
    for (std::size_t j = 0; j < tier_masses.size(); ++j) {
        std::int64_t hi =
            (j < tier_cuts.size()) ? std::min(tier_cuts[j], vocab_size) : vocab_size;
        if (hi > t.boundaries.back()) {
            t.boundaries.push_back(hi);
            t.masses.push_back(tier_masses[j]);
        } else {
            lost += tier_masses[j];
        }
    }
    if (t.masses.empty()) throw ConfigError("tier spec collapses to nothing");
    if (lost > 0.0) {
        double kept = std::accumulate(t.masses.begin(), t.masses.end(), 0.0);
        for (double& m : t.masses) m += lost * m / kept;
    }
    return t;
}

Engine::Engine(EngineConfig cfg, Environment& env)
    : cfg_(std::move(cfg)), env_(env), root_(cfg_.seed) {
    cfg_.validate();
    const Vocabulary& vocab = env_.vocabulary();
    if (vocab.size() == 0) throw ConfigError("environment vocabulary is empty");
    for (int id : cfg_.label_concepts)
        if (!vocab.find(id))
            throw ConfigError("label concept id " + std::to_string(id) +
                              " is not in the vocabulary");
}

void Engine::restore(const BufferCheckpoint& cp) {
    buffer_ = cp.buffer;
    iteration_ = cp.next_iteration;
    next_record_id_ = cp.next_record_id;
    queries_issued_ = cp.queries_issued;
}

int Engine::pick_concept(std::size_t slot, Rng& rng, const std::vector<double>& plan_cdf) const {
    (void)slot;
    const Vocabulary& vocab = env_.vocabulary();
    auto uniform_pick = [&]() {
        return vocab.concepts[static_cast<std::size_t>(rng.below(vocab.size()))].id;
    };
    auto label_pick = [&]() {
        return cfg_.label_concepts[static_cast<std::size_t>(rng.below(cfg_.label_concepts.size()))];
    };
    switch (cfg_.mode) {
        case ExploreMode::Random:
            return uniform_pick();
        case ExploreMode::LabelsOnly:
            return label_pick();
        case ExploreMode::LabelsPlusRelevant:
            return rng.uniform() < cfg_.label_mix ? label_pick() : uniform_pick();
        case ExploreMode::Ours:
        case ExploreMode::OursPlusPlus: {
            if (!cfg_.label_concepts.empty() && rng.uniform() < cfg_.label_mix)
                return label_pick();
            if (!plan_cdf.empty()) {
                double u = rng.uniform();
                auto it = std::upper_bound(plan_cdf.begin(), plan_cdf.end(), u);
                if (it == plan_cdf.end()) --it;
                return plan_->order[static_cast<std::size_t>(it - plan_cdf.begin())];
            }
            return uniform_pick();
        }
    }
    throw std::logic_error("pick_concept: bad mode");
}

IterationMetrics Engine::run_iteration() {
    const Vocabulary& vocab = env_.vocabulary();
    const TargetSet& target = env_.target();
    const int M = cfg_.queries_per_iteration;
    const int Q = cfg_.results_per_query;

    // --- Select concepts (and descriptors) for every query slot. ---
    std::vector<double> plan_cdf;
    if (cfg_.uses_plan() && plan_) {
        plan_cdf.resize(plan_->probabilities.size());
        std::partial_sum(plan_->probabilities.begin(), plan_->probabilities.end(),
                         plan_cdf.begin());
        plan_cdf.back() = 1.0;
    }
    struct Slot {
        int concept_id = -1;
        int descriptor = -1;
        bool failed = false;
        bool kept = false;
        double score = 0.0;
        std::vector<ImageRecord> records;
        std::string error;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(M));
    Rng pick_rng = root_.derive(1, static_cast<std::uint64_t>(iteration_));
    for (int i = 0; i < M; ++i) {
        slots[static_cast<std::size_t>(i)].concept_id =
            pick_concept(static_cast<std::size_t>(i), pick_rng, plan_cdf);
        if (cfg_.mode == ExploreMode::OursPlusPlus)
            slots[static_cast<std::size_t>(i)].descriptor =
                i % static_cast<int>(cfg_.descriptors.size());
    }

    // --- Evaluate queries concurrently; slots own their outputs. ---
    const std::int64_t id_base = next_record_id_;
    const int min_keep = std::max(1, cfg_.min_results);
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t i) {
        Slot& s = slots[i];
        try {
            s.records = env_.search(s.concept_id, s.descriptor, Q, iteration_,
                                    id_base + static_cast<std::int64_t>(i) * Q);
        } catch (const std::exception& e) {
            s.failed = true;
            s.error = e.what();
            s.records.clear();
            return;
        }
        if (s.records.size() < static_cast<std::size_t>(min_keep)) {
            s.records.clear(); // dropped by the minimum-results rule
            return;
        }
        std::vector<double> rewards;
        rewards.reserve(s.records.size());
        for (ImageRecord& rec : s.records) {
            rec.reward = image_reward(rec.embedding, target, cfg_.reward_k);
            rewards.push_back(rec.reward);
        }
        s.score = concept_score(rewards, cfg_.plain_mean_score ? 0 : cfg_.concept_top_n);
        s.kept = true;
    });
    next_record_id_ += static_cast<std::int64_t>(M) * Q;

    // --- Single-writer commit. ---
    const int cat_count = env_.category_count();
    const std::int64_t relevant_total = env_.relevant_concept_count();
    std::vector<ImageRecord> fresh;
    std::vector<double> obs_sum(static_cast<std::size_t>(cat_count) + 1, 0.0);
    std::vector<int> obs_n(static_cast<std::size_t>(cat_count) + 1, 0);
    double score_sum = 0.0;
    int kept_queries = 0;
    for (int i = 0; i < M; ++i) {
        Slot& s = slots[static_cast<std::size_t>(i)];
        if (s.failed) {
            warnings_.push_back("iteration " + std::to_string(iteration_) + " query " +
                                std::to_string(i) + " (concept " +
                                std::to_string(s.concept_id) + ") failed: " + s.error);
            continue;
        }
        if (!s.kept) continue;
        ++kept_queries;
        score_sum += s.score;
        observations_[s.concept_id].push_back(s.score);
        int cat = (cat_count > 0) ? env_.concept_category(s.concept_id) : -1;
        std::size_t bucket = (cat >= 0 && cat < cat_count) ? static_cast<std::size_t>(cat)
                                                           : static_cast<std::size_t>(cat_count);
        obs_sum[bucket] += s.score;
        obs_n[bucket] += 1;
        if (cat >= 0) {
            categories_seen_.insert(cat);
            relevant_seen_.insert(s.concept_id);
            std::int64_t query_index = queries_issued_ + i + 1;
            if (queries_to_all_categories_ < 0 &&
                static_cast<int>(categories_seen_.size()) == cat_count)
                queries_to_all_categories_ = query_index;
            if (queries_to_all_relevant_ < 0 && relevant_total > 0 &&
                static_cast<std::int64_t>(relevant_seen_.size()) == relevant_total)
                queries_to_all_relevant_ = query_index;
        }
        fresh.insert(fresh.end(), std::make_move_iterator(s.records.begin()),
                     std::make_move_iterator(s.records.end()));
    }
    queries_issued_ += M;

    // Train on candidates plus replayed history, then retain the best.
    Rng compose_rng = root_.derive(2, static_cast<std::uint64_t>(iteration_));
    TrainingSet ts = compose_training_set(fresh, buffer_, target, cfg_.pcr, compose_rng,
                                          cfg_.epochs_per_iteration);
    TrainingBatch batch;
    batch.candidates = fresh;
    batch.epochs = ts.epochs;
    for (const auto& item : ts.history) {
        if (item.from_buffer)
            batch.replayed.push_back(&buffer_.records[item.index]);
        else
            ++batch.target_items;
    }
    env_.train(batch);
    std::vector<ImageRecord> kept = retain_top_fraction(fresh, cfg_.retention_fraction);
    const std::size_t kept_count = kept.size();
    buffer_.append(std::move(kept));

    // Refit the concept model and rebuild the sampling plan.
    posteriors_.clear();
    if (cfg_.uses_plan() && !observations_.empty()) {
        std::vector<Observation> obs;
        obs.reserve(observations_.size());
        for (const auto& [concept_id, scores] : observations_) {
            const Concept* c = vocab.find(concept_id);
            double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                          static_cast<double>(scores.size());
            obs.push_back({concept_id, c->embedding, mean});
        }
        GprModel model = GprModel::fit(obs, cfg_.gpr_jitter, cfg_.gpr_kernel);
        posteriors_ = score_all(model, vocab, observations_);
        plan_ = make_plan(posteriors_, cfg_.smr, cfg_.tier_spec(static_cast<std::int64_t>(vocab.size())));
    }

    // --- Metrics row. ---
    IterationMetrics m;
    m.iteration = iteration_;
    m.queries_issued_total = queries_issued_;
    m.queries_kept = kept_queries;
    m.new_records = fresh.size();
    m.kept_records = kept_count;
    m.buffer_size = buffer_.size();
    if (kept_queries > 0) m.mean_query_score = score_sum / kept_queries;
    if (auto f = env_.fidelity()) m.fidelity = *f;
    if (auto a = env_.accuracy(buffer_, cfg_.eval_k)) m.accuracy = *a;
    m.categories_hit = static_cast<int>(categories_seen_.size());
    m.queries_to_all_categories = queries_to_all_categories_;
    m.queries_to_all_relevant = queries_to_all_relevant_;
    if (cat_count > 0) {
        m.observed_score_by_category.assign(static_cast<std::size_t>(cat_count) + 1,
                                            std::numeric_limits<double>::quiet_NaN());
        for (std::size_t b = 0; b < obs_sum.size(); ++b)
            if (obs_n[b] > 0) m.observed_score_by_category[b] = obs_sum[b] / obs_n[b];
        m.estimated_score_by_category.assign(static_cast<std::size_t>(cat_count) + 1,
                                             std::numeric_limits<double>::quiet_NaN());
        if (!posteriors_.empty()) {
            std::vector<double> est_sum(static_cast<std::size_t>(cat_count) + 1, 0.0);
            std::vector<int> est_n(static_cast<std::size_t>(cat_count) + 1, 0);
            for (const auto& p : posteriors_) {
                int cat = env_.concept_category(p.concept_id);
                std::size_t bucket = (cat >= 0 && cat < cat_count)
                                         ? static_cast<std::size_t>(cat)
                                         : static_cast<std::size_t>(cat_count);
                est_sum[bucket] += p.score;
                est_n[bucket] += 1;
            }
            for (std::size_t b = 0; b < est_sum.size(); ++b)
                if (est_n[b] > 0) m.estimated_score_by_category[b] = est_sum[b] / est_n[b];
        }
    }
    ++iteration_;
    return m;
}

std::string Engine::metrics_header() const {
    std::string h =
        "iteration,queries_issued,queries_kept,new_records,kept_records,buffer_size,"
        "mean_query_score,fidelity,accuracy,categories_hit,queries_to_all_categories,"
        "queries_to_all_relevant";
    const int cat_count = env_.category_count();
    if (cat_count > 0) {
        for (int c = 0; c < cat_count; ++c) h += ",observed_score_cat_" + std::to_string(c);
        h += ",observed_score_none";
        for (int c = 0; c < cat_count; ++c) h += ",estimated_score_cat_" + std::to_string(c);
        h += ",estimated_score_none";
    }
    return h;
}

std::string Engine::metrics_row(const IterationMetrics& m) const {
    std::string r = std::to_string(m.iteration);
    r += ',' + std::to_string(m.queries_issued_total);
    r += ',' + std::to_string(m.queries_kept);
    r += ',' + std::to_string(m.new_records);
    r += ',' + std::to_string(m.kept_records);
    r += ',' + std::to_string(m.buffer_size);
    r += ',' + format_double(m.mean_query_score);
    r += ',' + format_double(m.fidelity);
    r += ',' + format_double(m.accuracy);
    r += ',' + std::to_string(m.categories_hit);
    r += ',' + std::to_string(m.queries_to_all_categories);
    r += ',' + std::to_string(m.queries_to_all_relevant);
    for (double v : m.observed_score_by_category) r += ',' + format_double(v);
    for (double v : m.estimated_score_by_category) r += ',' + format_double(v);
    return r;
}

std::vector<IterationMetrics> Engine::run(int iterations, std::ostream* metrics_csv) {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    std::vector<IterationMetrics> history;
    history.reserve(static_cast<std::size_t>(iterations));
    if (metrics_csv) *metrics_csv << metrics_header() << '\n' << std::flush;
    for (int i = 0; i < iterations; ++i) {
        history.push_back(run_iteration());
        if (metrics_csv) *metrics_csv << metrics_row(history.back()) << '\n' << std::flush;
    }
    return history;
}

} // namespace scout
