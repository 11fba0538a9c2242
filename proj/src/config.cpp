#include "scout/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "scout/util.hpp"

namespace scout {

const std::vector<std::string>& builtin_descriptor_list(const std::string& name) {
    static const std::vector<std::string> generic = {
        "close-up photo of", "wide-angle photo of", "outdoor photo of", "studio photo of"};
    static const std::vector<std::string> satellite = {
        "a centered satellite photo of",
        "a satellite photo of",
        "a google earth photo of",
        "satellite view of",
        "high resolution satellite",
        "high resolution satellite imagery of",
        "aerial satellite",
        "aerial satellite view",
        "aerial satellite view of",
        "satellite imagery, centered photo of",
        "satellite imagery, photo of",
        "military highest resolution satellite imagery of",
        "NASA imagery of",
        "geo high resolution satellite",
        "land cover satellite image of",
        "european satellite close up aerial image of",
        "super high resolution highest resolution satellite imagery"};
    if (name == "default" || name == "generic") return generic;
    if (name == "satellite") return satellite;
    throw ConfigError("unknown descriptor list '" + name + "'");
}

namespace {

bool parse_bool(std::string_view v, const char* what) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(std::string("bad boolean for ") + what + ": '" + std::string(v) + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view v, const char* what, Parse parse) {
    std::vector<T> out;
    for (auto part : split(v, ','))
        out.push_back(static_cast<T>(parse(trim(part), what)));
    return out;
}

} // namespace

RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");

    RunSpec spec;
    bool custom_descriptors = false;

    using Handler = std::function<void(std::string_view)>;
    std::map<std::string, Handler, std::less<>> keys;
    auto on = [&](const char* key, Handler h) { keys.emplace(key, std::move(h)); };

    EngineConfig& e = spec.engine;
    on("mode", [&](std::string_view v) { e.mode = parse_mode(std::string(v)); });
    on("seed", [&](std::string_view v) {
        e.seed = static_cast<std::uint64_t>(parse_int(v, "seed"));
    });
    on("iterations", [&](std::string_view v) {
        spec.iterations = static_cast<int>(parse_int(v, "iterations"));
    });
    on("queries_per_iteration", [&](std::string_view v) {
        e.queries_per_iteration = static_cast<int>(parse_int(v, "queries_per_iteration"));
    });
    on("results_per_query", [&](std::string_view v) {
        e.results_per_query = static_cast<int>(parse_int(v, "results_per_query"));
    });
    on("min_results", [&](std::string_view v) {
        e.min_results = static_cast<int>(parse_int(v, "min_results"));
    });
    on("reward_k", [&](std::string_view v) {
        e.reward_k = static_cast<int>(parse_int(v, "reward_k"));
    });
    on("concept_top_n", [&](std::string_view v) {
        e.concept_top_n = static_cast<int>(parse_int(v, "concept_top_n"));
    });
    on("plain_mean_score", [&](std::string_view v) {
        e.plain_mean_score = parse_bool(v, "plain_mean_score");
    });
    on("smr", [&](std::string_view v) { e.smr = parse_double(v, "smr"); });
    on("pcr", [&](std::string_view v) { e.pcr = parse_double(v, "pcr"); });
    on("retention_fraction", [&](std::string_view v) {
        e.retention_fraction = parse_double(v, "retention_fraction");
    });
    on("tier_cuts", [&](std::string_view v) {
        e.tier_cuts = parse_list<std::int64_t>(v, "tier_cuts", parse_int);
    });
    on("tier_masses", [&](std::string_view v) {
        e.tier_masses = parse_list<double>(v, "tier_masses", parse_double);
    });
    on("epochs_per_iteration", [&](std::string_view v) {
        e.epochs_per_iteration = static_cast<int>(parse_int(v, "epochs_per_iteration"));
    });
    on("label_mix", [&](std::string_view v) { e.label_mix = parse_double(v, "label_mix"); });
    on("labels", [&](std::string_view v) {
        e.label_concepts = parse_list<int>(v, "labels", parse_int);
    });
    on("descriptor_list", [&](std::string_view v) {
        e.descriptors = builtin_descriptor_list(std::string(v));
        custom_descriptors = true;
    });
    on("descriptor", [&](std::string_view v) {
        if (!custom_descriptors) {
            e.descriptors.clear();
            custom_descriptors = true;
        }
        e.descriptors.emplace_back(v);
    });
    on("gpr_kernel", [&](std::string_view v) {
        if (v == "exponential") e.gpr_kernel = KernelKind::Exponential;
        else if (v == "squared_exponential") e.gpr_kernel = KernelKind::SquaredExponential;
        else throw ConfigError("gpr_kernel must be exponential or squared_exponential");
    });
    on("gpr_jitter", [&](std::string_view v) { e.gpr_jitter = parse_double(v, "gpr_jitter"); });
    on("eval_k", [&](std::string_view v) { e.eval_k = static_cast<int>(parse_int(v, "eval_k")); });

    on("environment", [&](std::string_view v) {
        if (v != "sim" && v != "corpus") throw ConfigError("environment must be sim or corpus");
        spec.environment = std::string(v);
    });
    on("checkpoint_path", [&](std::string_view v) { spec.checkpoint_path = std::string(v); });
    on("resume_path", [&](std::string_view v) { spec.resume_path = std::string(v); });

    SimParams& s = spec.sim;
    on("sim.vocab_size", [&](std::string_view v) { s.vocab_size = parse_int(v, "sim.vocab_size"); });
    on("sim.clusters", [&](std::string_view v) {
        s.clusters = static_cast<int>(parse_int(v, "sim.clusters"));
    });
    on("sim.cluster_size", [&](std::string_view v) {
        s.cluster_size = static_cast<int>(parse_int(v, "sim.cluster_size"));
    });
    on("sim.latent_dim", [&](std::string_view v) {
        s.latent_dim = static_cast<int>(parse_int(v, "sim.latent_dim"));
    });
    on("sim.cluster_radius", [&](std::string_view v) {
        s.cluster_radius = parse_double(v, "sim.cluster_radius");
    });
    on("sim.latent_box", [&](std::string_view v) {
        s.latent_box = parse_double(v, "sim.latent_box");
    });
    on("sim.descriptor_scale", [&](std::string_view v) {
        s.descriptor_scale = parse_double(v, "sim.descriptor_scale");
    });
    on("sim.appearance_modes", [&](std::string_view v) {
        s.appearance_modes = static_cast<int>(parse_int(v, "sim.appearance_modes"));
    });
    on("sim.distractor_rate", [&](std::string_view v) {
        s.distractor_rate = parse_double(v, "sim.distractor_rate");
    });
    on("sim.rep_noise", [&](std::string_view v) { s.rep_noise = parse_double(v, "sim.rep_noise"); });
    on("sim.phi_min", [&](std::string_view v) { s.phi_min = parse_double(v, "sim.phi_min"); });
    on("sim.phi_max", [&](std::string_view v) { s.phi_max = parse_double(v, "sim.phi_max"); });
    on("sim.ema_rate", [&](std::string_view v) { s.ema_rate = parse_double(v, "sim.ema_rate"); });
    on("sim.target_size", [&](std::string_view v) {
        s.target_size = static_cast<int>(parse_int(v, "sim.target_size"));
    });
    on("sim.heldout_size", [&](std::string_view v) {
        s.heldout_size = static_cast<int>(parse_int(v, "sim.heldout_size"));
    });
    // The sim world reuses the engine seed unless overridden.
    bool sim_seed_set = false;
    on("sim.seed", [&](std::string_view v) {
        s.seed = static_cast<std::uint64_t>(parse_int(v, "sim.seed"));
        sim_seed_set = true;
    });

    CorpusEnvConfig& c = spec.corpus;
    on("corpus.path", [&](std::string_view v) { c.corpus_path = std::string(v); });
    on("corpus.target", [&](std::string_view v) { c.target_path = std::string(v); });
    on("corpus.vocabulary", [&](std::string_view v) { c.vocabulary_path = std::string(v); });
    on("corpus.index_mode", [&](std::string_view v) {
        if (v == "exact") c.index_mode = IndexMode::Exact;
        else if (v == "accelerated") c.index_mode = IndexMode::Accelerated;
        else throw ConfigError("corpus.index_mode must be exact or accelerated");
    });
    on("corpus.lists", [&](std::string_view v) {
        c.accel.num_lists = static_cast<int>(parse_int(v, "corpus.lists"));
    });
    on("corpus.probes", [&](std::string_view v) {
        c.accel.probes = static_cast<int>(parse_int(v, "corpus.probes"));
    });

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
        std::string_view key = trim(sv.substr(0, eq));
        std::string_view value = trim(sv.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("config: line " + std::to_string(lineno) + ": unknown key '" +
                              std::string(key) + "'");
        it->second(value);
    }
    if (!sim_seed_set) s.seed = e.seed;
    if (spec.iterations < 1) throw ConfigError("config: iterations must be >= 1");
    if (spec.environment == "corpus" &&
        (c.corpus_path.empty() || c.target_path.empty() || c.vocabulary_path.empty()))
        throw ConfigError("config: corpus environment needs corpus.path, corpus.target, "
                          "and corpus.vocabulary");
    return spec;
}

std::vector<std::pair<std::string, std::string>> run_spec_snapshot(const RunSpec& spec) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    const EngineConfig& e = spec.engine;
    add("mode", mode_name(e.mode));
    add("seed", std::to_string(e.seed));
    add("iterations", std::to_string(spec.iterations));
    add("queries_per_iteration", std::to_string(e.queries_per_iteration));
    add("results_per_query", std::to_string(e.results_per_query));
    add("min_results", std::to_string(e.min_results));
    add("reward_k", std::to_string(e.reward_k));
    add("concept_top_n", std::to_string(e.concept_top_n));
    add("plain_mean_score", e.plain_mean_score ? "true" : "false");
    add("smr", format_double(e.smr));
    add("pcr", format_double(e.pcr));
    add("retention_fraction", format_double(e.retention_fraction));
    std::string cuts;
    for (auto b : e.tier_cuts) cuts += (cuts.empty() ? "" : ",") + std::to_string(b);
    add("tier_cuts", cuts);
    std::string masses;
    for (auto m : e.tier_masses) masses += (masses.empty() ? "" : ",") + format_double(m);
    add("tier_masses", masses);
    add("epochs_per_iteration", std::to_string(e.epochs_per_iteration));
    add("label_mix", format_double(e.label_mix));
    std::string labels;
    for (auto l : e.label_concepts) labels += (labels.empty() ? "" : ",") + std::to_string(l);
    add("labels", labels);
    add("descriptor_count", std::to_string(e.descriptors.size()));
    add("gpr_kernel", e.gpr_kernel == KernelKind::Exponential ? "exponential"
                                                              : "squared_exponential");
    add("gpr_jitter", format_double(e.gpr_jitter));
    add("eval_k", std::to_string(e.eval_k));
    add("environment", spec.environment);
    if (spec.environment == "sim") {
        const SimParams& s = spec.sim;
        add("sim.vocab_size", std::to_string(s.vocab_size));
        add("sim.clusters", std::to_string(s.clusters));
        add("sim.cluster_size", std::to_string(s.cluster_size));
        add("sim.latent_dim", std::to_string(s.latent_dim));
        add("sim.cluster_radius", format_double(s.cluster_radius));
        add("sim.latent_box", format_double(s.latent_box));
        add("sim.descriptor_scale", format_double(s.descriptor_scale));
        add("sim.appearance_modes", std::to_string(s.appearance_modes));
        add("sim.distractor_rate", format_double(s.distractor_rate));
        add("sim.rep_noise", format_double(s.rep_noise));
        add("sim.phi_min", format_double(s.phi_min));
        add("sim.phi_max", format_double(s.phi_max));
        add("sim.ema_rate", format_double(s.ema_rate));
        add("sim.target_size", std::to_string(s.target_size));
        add("sim.heldout_size", std::to_string(s.heldout_size));
        add("sim.seed", std::to_string(s.seed));
    } else {
        add("corpus.path", spec.corpus.corpus_path);
        add("corpus.target", spec.corpus.target_path);
        add("corpus.vocabulary", spec.corpus.vocabulary_path);
        add("corpus.index_mode",
            spec.corpus.index_mode == IndexMode::Exact ? "exact" : "accelerated");
        add("corpus.lists", std::to_string(spec.corpus.accel.num_lists));
        add("corpus.probes", std::to_string(spec.corpus.accel.probes));
    }
    if (!spec.checkpoint_path.empty()) add("checkpoint_path", spec.checkpoint_path);
    if (!spec.resume_path.empty()) add("resume_path", spec.resume_path);
    return kv;
}

} // namespace scout
