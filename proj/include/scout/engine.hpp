#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "scout/concept_model.hpp"
#include "scout/replay.hpp"
#include "scout/rng.hpp"
#include "scout/scheduler.hpp"
#include "scout/types.hpp"
#include "scout/vocabulary.hpp"

namespace scout {

enum class ExploreMode {
    Random,             // uniform concepts forever; no model
    Ours,               // learned concept distribution
    OursPlusPlus,       // learned distribution + descriptor rotation
    LabelsOnly,         // only the label concepts
    LabelsPlusRelevant, // labels half the time, uniform vocabulary otherwise
};

ExploreMode parse_mode(const std::string& name);
std::string mode_name(ExploreMode mode);

struct EngineConfig {
    int queries_per_iteration = 256;
    int results_per_query = 100;
    int min_results = 10;
    int reward_k = 15;
    int concept_top_n = 10;
    bool plain_mean_score = false; // score queries by the mean of all rewards
    double smr = 3.0;
    double pcr = 2.0;
    double retention_fraction = 0.5;
    std::vector<std::int64_t> tier_cuts = {250, 1000}; // interior rank boundaries
    std::vector<double> tier_masses = {0.8, 0.1, 0.1};
    int epochs_per_iteration = 10;
    ExploreMode mode = ExploreMode::Ours;
    double label_mix = 0.5;
    std::vector<int> label_concepts; // vocabulary ids; required by labels modes
    std::vector<std::string> descriptors = {
        "close-up photo of", "wide-angle photo of", "outdoor photo of",
        "studio photo of"}; // rotated by ours_plus_plus
    KernelKind gpr_kernel = KernelKind::Exponential;
    double gpr_jitter = 1e-8;
    int eval_k = 5; // neighbors for the environment accuracy probe
    std::uint64_t seed = 0;

    void validate() const;
    /// Tier spec against a concrete vocabulary size (cuts clipped, vanished
    /// tiers folded into the survivors).
    TierSpec tier_spec(std::int64_t vocab_size) const;
    /// Does this mode consult the learned sampling plan at all?
    bool uses_plan() const {
        return mode == ExploreMode::Ours || mode == ExploreMode::OursPlusPlus;
    }
};

/// One iteration's training inputs with the replay references resolved:
/// fresh downloads, replayed buffer records, and the count of target items
/// mixed in.
struct TrainingBatch {
    std::span<const ImageRecord> candidates;
    std::vector<const ImageRecord*> replayed;
    std::size_t target_items = 0;
    int epochs = 1;
};

/// Where queries go. `search` may be called concurrently within one
/// iteration and may throw to signal a failed query (the engine skips it).
/// Everything else runs on the engine's single writer thread.
class Environment {
public:
    virtual ~Environment() = default;
    virtual const Vocabulary& vocabulary() const = 0;
    virtual const TargetSet& target() const = 0;
    virtual std::vector<ImageRecord> search(int concept_id, int descriptor_index, int count,
                                            int iteration, std::int64_t id_base) = 0;
    /// Training hook; called once per iteration after composition.
    virtual void train(const TrainingBatch& batch) { (void)batch; }
    // Reporting hooks (never used for decisions).
    virtual int category_count() const { return 0; }
    virtual int concept_category(int concept_id) const {
        (void)concept_id;
        return -1;
    }
    virtual std::int64_t relevant_concept_count() const { return -1; }
    virtual std::optional<double> accuracy(const ReplayBuffer& buffer, int k) {
        (void)buffer;
        (void)k;
        return std::nullopt;
    }
    virtual std::optional<double> fidelity() const { return std::nullopt; }
};

struct IterationMetrics {
    int iteration = 0;
    std::int64_t queries_issued_total = 0; // cumulative, counts failed queries too
    int queries_kept = 0;                  // survived the min-results filter
    std::size_t new_records = 0;
    std::size_t kept_records = 0;
    std::size_t buffer_size = 0;
    double mean_query_score = std::numeric_limits<double>::quiet_NaN();
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    int categories_hit = 0; // distinct categories queried so far
    std::int64_t queries_to_all_categories = -1;
    std::int64_t queries_to_all_relevant = -1;
    // Per ground-truth category (index c = category c, last slot = none/-1):
    std::vector<double> observed_score_by_category;
    std::vector<double> estimated_score_by_category;
};

/// The decision loop: sample concepts, search, score, train, retain,
/// refit the concept model, rebuild the sampling plan.
class Engine {
public:
    Engine(EngineConfig cfg, Environment& env);

    /// Continue from a checkpointed buffer (observations are not persisted,
    /// so the model restarts cold).
    void restore(const BufferCheckpoint& cp);

    IterationMetrics run_iteration();
    /// Runs `iterations` iterations, streaming CSV rows when a stream is
    /// given (header included rows flushed per iteration).
    std::vector<IterationMetrics> run(int iterations, std::ostream* metrics_csv = nullptr);

    const ReplayBuffer& buffer() const { return buffer_; }
    int iteration() const { return iteration_; }
    std::int64_t next_record_id() const { return next_record_id_; }
    std::int64_t queries_issued() const { return queries_issued_; }
    const std::optional<SamplingPlan>& plan() const { return plan_; }
    const std::vector<ConceptPosterior>& last_posteriors() const { return posteriors_; }
    const std::map<int, std::vector<double>>& observations() const { return observations_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::string metrics_header() const;
    std::string metrics_row(const IterationMetrics& m) const;

private:
    EngineConfig cfg_;
    Environment& env_;
    Rng root_;
    int iteration_ = 0;
    std::int64_t next_record_id_ = 0;
    std::int64_t queries_issued_ = 0;
    std::map<int, std::vector<double>> observations_; // concept -> query scores
    ReplayBuffer buffer_;
    std::optional<SamplingPlan> plan_;
    std::vector<ConceptPosterior> posteriors_;
    std::vector<std::string> warnings_;
    // discovery bookkeeping
    std::set<int> categories_seen_;
    std::set<int> relevant_seen_;
    std::int64_t queries_to_all_categories_ = -1;
    std::int64_t queries_to_all_relevant_ = -1;

    int pick_concept(std::size_t slot, Rng& rng, const std::vector<double>& plan_cdf) const;
};

} // namespace scout
