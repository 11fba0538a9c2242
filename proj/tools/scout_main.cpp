#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scout/analysis.hpp"
#include "scout/config.hpp"
#include "scout/dedup.hpp"
#include "scout/engine.hpp"
#include "scout/environments.hpp"
#include "scout/gpr_reference.hpp"
#include "scout/search_index.hpp"
#include "scout/util.hpp"

namespace {

using nlohmann::json;

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::optional<std::uint64_t> env_seed_override() {
    const char* v = std::getenv("IE_SEED");
    if (!v || !*v) return std::nullopt;
    return static_cast<std::uint64_t>(scout::parse_int(v, "IE_SEED"));
}

struct ExploreArgs {
    std::string config_path;
    std::string metrics_path = "metrics.csv";
    std::string manifest_path;
    std::string checkpoint_path;
    std::string resume_path;
    std::string plan_csv_path;
    int iterations = -1;
    std::string mode;
    std::optional<std::uint64_t> seed;
};

int cmd_explore(const ExploreArgs& args) {
    scout::RunSpec spec = scout::load_run_spec(args.config_path);
    if (args.iterations > 0) spec.iterations = args.iterations;
    if (!args.mode.empty()) spec.engine.mode = scout::parse_mode(args.mode);
    std::optional<std::uint64_t> seed = args.seed;
    if (auto env = env_seed_override()) seed = env;
    if (seed) {
        bool sim_follows = spec.sim.seed == spec.engine.seed;
        spec.engine.seed = *seed;
        if (sim_follows) spec.sim.seed = *seed;
    }
    if (!args.checkpoint_path.empty()) spec.checkpoint_path = args.checkpoint_path;
    if (!args.resume_path.empty()) spec.resume_path = args.resume_path;
    spec.engine.validate();

    std::string manifest_path = args.manifest_path.empty()
                                    ? args.metrics_path + ".manifest.json"
                                    : args.manifest_path;
    json manifest;
    manifest["artifact_version"] = "0.1.0";
    manifest["command"] = "explore";
    manifest["status"] = "running";
    manifest["started_at"] = utc_now();
    manifest["config_path"] = args.config_path;
    manifest["seed"] = spec.engine.seed;
    json snapshot = json::object();
    for (const auto& [k, v] : scout::run_spec_snapshot(spec)) snapshot[k] = v;
    manifest["config"] = snapshot;
    manifest["outputs"] = {{"metrics", args.metrics_path},
                           {"checkpoint", spec.checkpoint_path},
                           {"manifest", manifest_path}};
    auto write_manifest = [&] {
        std::ofstream out(manifest_path);
        if (!out) throw std::runtime_error("cannot write manifest: " + manifest_path);
        out << manifest.dump(2) << '\n';
    };
    write_manifest();

    std::unique_ptr<scout::Environment> env;
    if (spec.environment == "sim")
        env = std::make_unique<scout::SimEnvironment>(scout::SimWorld::make(spec.sim));
    else
        env = std::make_unique<scout::CorpusEnvironment>(spec.corpus);

    scout::Engine engine(spec.engine, *env);
    if (!spec.resume_path.empty())
        engine.restore(scout::load_buffer_checkpoint(spec.resume_path));

    std::ofstream metrics(args.metrics_path);
    if (!metrics) throw std::runtime_error("cannot write metrics: " + args.metrics_path);
    auto rows = engine.run(spec.iterations, &metrics);
    metrics.close();

    if (!spec.checkpoint_path.empty())
        scout::save_buffer_checkpoint(spec.checkpoint_path, engine.buffer(),
                                      engine.iteration(), engine.next_record_id(),
                                      engine.queries_issued());
    if (!args.plan_csv_path.empty() && engine.plan()) {
        std::ofstream plan(args.plan_csv_path);
        if (!plan) throw std::runtime_error("cannot write plan CSV: " + args.plan_csv_path);
        plan << scout::plan_csv(*engine.plan());
    }

    for (const auto& w : engine.warnings()) std::cerr << "warning: " << w << '\n';
    manifest["status"] = "ok";
    manifest["finished_at"] = utc_now();
    manifest["iterations_completed"] = rows.size();
    manifest["warnings"] = engine.warnings().size();
    write_manifest();

    std::cout << "explore: " << rows.size() << " iterations, buffer "
              << engine.buffer().size() << " records, metrics " << args.metrics_path
              << '\n';
    return 0;
}

struct LemmaArgs {
    std::int64_t n = 0, c = 0, s = 0;
    int trials = 1000;
    std::uint64_t seed = 0;
    bool analytic_only = false;
    bool check = false;
};

int cmd_lemma(const LemmaArgs& args) {
    std::uint64_t seed = env_seed_override().value_or(args.seed);
    scout::AnalyticTimes at = scout::analytic_times(args.n, args.c, args.s);
    std::cout << "t_base = " << scout::format_double(at.base) << '\n'
              << "t_gpr = " << scout::format_double(at.gpr) << '\n'
              << "speedup = " << scout::format_double(at.speedup) << '\n';
    if (args.analytic_only) return 0;

    scout::DiscoveryConfig cfg;
    cfg.n = args.n;
    cfg.c = args.c;
    cfg.s = args.s;
    cfg.trials = args.trials;
    cfg.seed = seed;
    cfg.mode = scout::DiscoveryMode::Base;
    scout::DiscoveryStats base = scout::simulate_discovery(cfg);
    cfg.mode = scout::DiscoveryMode::Gpr;
    scout::DiscoveryStats gpr = scout::simulate_discovery(cfg);

    std::cout << "n,c,s,mode,analytic,empirical_mean,std_error,trials\n";
    auto row = [&](const char* mode, double analytic, const scout::DiscoveryStats& st) {
        std::cout << args.n << ',' << args.c << ',' << args.s << ',' << mode << ','
                  << scout::format_double(analytic) << ','
                  << scout::format_double(st.mean) << ','
                  << scout::format_double(st.std_error) << ',' << st.trials << '\n';
    };
    row("base", at.base, base);
    row("gpr", at.gpr, gpr);

    if (args.check) {
        auto sigmas = [](double analytic, const scout::DiscoveryStats& st) {
            return st.std_error > 0.0 ? std::abs(st.mean - analytic) / st.std_error : 0.0;
        };
        double zb = sigmas(at.base, base);
        double zg = sigmas(at.gpr, gpr);
        if (zb > 3.0 || zg > 3.0) {
            std::cerr << "check: FAILED (base " << scout::format_double(zb)
                      << " sigma, gpr " << scout::format_double(zg) << " sigma)\n";
            return 1;
        }
        std::cout << "check: ok (base " << scout::format_double(zb) << " sigma, gpr "
                  << scout::format_double(zg) << " sigma)\n";
    }
    return 0;
}

struct GprCheckArgs {
    int instances = 100;
    int max_obs = 50;
    int dim = 8;
    std::uint64_t seed = 0;
    double jitter = 1e-8;
    bool check = false;
};

int cmd_gpr_check(const GprCheckArgs& args) {
    if (args.instances < 1 || args.max_obs < 1 || args.dim < 1)
        throw scout::ConfigError("gpr-check: instances, max-obs, and dim must be >= 1");
    std::uint64_t seed = env_seed_override().value_or(args.seed);

    double max_mean_dev = 0.0, max_std_dev = 0.0, max_observed_std = 0.0;
    double min_std = 0.0;
    for (int i = 0; i < args.instances; ++i) {
        scout::Rng rng = scout::Rng(seed).derive(static_cast<std::uint64_t>(i));
        int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(args.max_obs)));
        int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(args.dim)));
        std::vector<scout::Observation> obs(m);
        for (auto& o : obs) {
            o.embedding.resize(d);
            for (double& x : o.embedding) x = rng.normal();
            o.reward = rng.uniform(-1.0, 1.0);
        }
        std::vector<std::vector<double>> queries;
        for (const auto& o : obs) queries.push_back(o.embedding);
        for (int q = 0; q < 2 * m; ++q) {
            std::vector<double> v(d);
            for (double& x : v) x = rng.normal();
            queries.push_back(std::move(v));
        }

        scout::GprModel model = scout::GprModel::fit(obs, args.jitter);
        std::vector<double> means, stds;
        model.predict_batch(queries, means, stds);
        auto oracle = scout::reference_gpr_posterior(obs, queries, model.jitter_used());
        for (std::size_t q = 0; q < queries.size(); ++q) {
            max_mean_dev = std::max(max_mean_dev, std::abs(means[q] - oracle[q].mean));
            max_std_dev = std::max(max_std_dev, std::abs(stds[q] - oracle[q].std));
            min_std = std::min(min_std, stds[q]);
            if (q < static_cast<std::size_t>(m))
                max_observed_std = std::max(max_observed_std, stds[q]);
        }
    }

    std::vector<double> e = {1.0, 0.0};
    std::cout << "instances = " << args.instances << '\n'
              << "max |mean - oracle| = " << scout::format_double(max_mean_dev) << '\n'
              << "max |std - oracle| = " << scout::format_double(max_std_dev) << '\n'
              << "max std at observed points = " << scout::format_double(max_observed_std)
              << '\n'
              << "kernel self-value = "
              << scout::format_double(scout::gp_kernel(e, e, scout::KernelKind::Exponential))
              << '\n';
    if (args.check &&
        (max_mean_dev > 1e-8 || max_std_dev > 1e-8 || max_observed_std > 1e-3 ||
         min_std < 0.0)) {
        std::cerr << "check: FAILED\n";
        return 1;
    }
    return 0;
}

struct IndexBuildArgs {
    std::string input;
    std::string output;
};

int cmd_index_build(const IndexBuildArgs& args) {
    std::ifstream in(args.input);
    if (!in) throw scout::ConfigError("index build: cannot open '" + args.input + "'");
    std::vector<scout::CorpusEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = scout::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = scout::split(sv, '\t');
        if (fields.size() < 3)
            throw scout::ConfigError("index build: line " + std::to_string(lineno) +
                                     ": want id<TAB>payload<TAB>floats...");
        scout::CorpusEntry e;
        e.image_id = scout::parse_int(fields[0], "image_id");
        e.payload_ref = std::string(scout::trim(fields[1]));
        for (std::size_t f = 2; f < fields.size(); ++f)
            e.caption_embedding.push_back(
                static_cast<float>(scout::parse_double(fields[f], "embedding")));
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw scout::ConfigError("index build: no entries in input");
    std::size_t dim = entries.front().caption_embedding.size();
    // Build once to validate dimensions/finiteness before writing.
    scout::CaptionIndex::build(entries, scout::IndexMode::Exact, {});
    scout::save_corpus(args.output, entries);
    std::cout << "wrote " << entries.size() << " entries (d=" << dim << ") to "
              << args.output << '\n';
    return 0;
}

struct IndexQueryArgs {
    std::string corpus;
    std::string queries;
    int top_k = 100;
    std::string mode = "exact";
    int lists = 0;
    int probes = 0;
    std::uint64_t seed = 0;
};

int cmd_index_query(const IndexQueryArgs& args) {
    if (args.top_k < 1) throw scout::ConfigError("index query: top-k must be >= 1");
    scout::IndexMode mode;
    if (args.mode == "exact") mode = scout::IndexMode::Exact;
    else if (args.mode == "accelerated") mode = scout::IndexMode::Accelerated;
    else throw scout::ConfigError("index query: mode must be exact or accelerated");

    scout::AccelParams accel;
    accel.num_lists = args.lists;
    accel.probes = args.probes;
    accel.seed = env_seed_override().value_or(args.seed);

    auto entries = scout::load_corpus(args.corpus);
    auto index = scout::CaptionIndex::build(std::move(entries), mode, accel);

    std::ifstream in(args.queries);
    if (!in) throw scout::ConfigError("index query: cannot open '" + args.queries + "'");
    std::cout << "query,rank,image_id,score\n";
    std::string line;
    std::size_t qi = 0;
    while (std::getline(in, line)) {
        std::string_view sv = scout::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::vector<double> q;
        std::istringstream fields{std::string(sv)};
        std::string tok;
        while (fields >> tok) q.push_back(scout::parse_double(tok, "query"));
        if (q.size() != index.dimension())
            throw scout::ConfigError("index query: query dimension " +
                                     std::to_string(q.size()) + " != corpus dimension " +
                                     std::to_string(index.dimension()));
        scout::QueryResult res = index.query(q, args.top_k);
        if (res.truncated)
            std::cerr << "warning: top-k exceeds corpus size; returning all entries\n";
        for (std::size_t r = 0; r < res.hits.size(); ++r)
            std::cout << qi << ',' << r + 1 << ',' << res.hits[r].image_id << ','
                      << scout::format_double(res.hits[r].score) << '\n';
        ++qi;
    }
    return 0;
}

struct DedupArgs {
    std::vector<std::string> reference;
    std::vector<std::string> probe;
    int max_hamming = 0;
};

// Image files (PNM magic) hash on the fly; anything else is a hex list.
std::vector<std::uint64_t> load_hashes(const std::vector<std::string>& paths) {
    std::vector<std::uint64_t> hashes;
    for (const auto& path : paths) {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw scout::ConfigError("dedup: cannot open '" + path + "'");
        char magic[2] = {0, 0};
        probe.read(magic, 2);
        probe.close();
        if (magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '6') {
            hashes.push_back(scout::dhash(scout::load_pnm(path)));
        } else {
            auto list = scout::load_hash_list(path);
            hashes.insert(hashes.end(), list.begin(), list.end());
        }
    }
    return hashes;
}

int cmd_dedup(const DedupArgs& args) {
    auto reference = load_hashes(args.reference);
    auto probes = load_hashes(args.probe);
    auto rep = scout::count_collisions(reference, probes, args.max_hamming);
    std::cout << "reference = " << reference.size() << " hashes, probe = " << probes.size()
              << " hashes, max_hamming = " << args.max_hamming << '\n';
    if (rep.empty_probe) std::cerr << "warning: probe set is empty\n";
    std::cout << "collisions: " << rep.formatted() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"targeted web-scale exploration toolkit"};
    app.require_subcommand(1);

    ExploreArgs ex;
    CLI::App* explore = app.add_subcommand("explore", "run the exploration engine");
    explore->add_option("--config", ex.config_path, "run configuration file")->required();
    explore->add_option("--iterations", ex.iterations, "override iteration count");
    explore->add_option("--mode", ex.mode,
                        "override mode: random|ours|ours_plus_plus|labels_only|"
                        "labels_plus_relevant");
    explore->add_option("--metrics", ex.metrics_path, "metrics CSV output path");
    explore->add_option("--manifest", ex.manifest_path, "run manifest JSON path");
    explore->add_option("--checkpoint", ex.checkpoint_path, "write buffer checkpoint here");
    explore->add_option("--resume", ex.resume_path, "resume from a buffer checkpoint");
    explore->add_option("--plan-csv", ex.plan_csv_path,
                        "dump the final sampling plan (rank, score, probabilities)");
    std::int64_t ex_seed = -1;
    explore->add_option("--seed", ex_seed, "override the seed");

    LemmaArgs lm;
    CLI::App* lemma = app.add_subcommand(
        "lemma", "analytic and Monte-Carlo concept-discovery times");
    lemma->add_option("--n", lm.n, "vocabulary size")->required();
    lemma->add_option("--c", lm.c, "relevant cluster count")->required();
    lemma->add_option("--s", lm.s, "cluster size")->required();
    lemma->add_option("--trials", lm.trials, "Monte-Carlo trials");
    lemma->add_option("--seed", lm.seed, "simulation seed");
    lemma->add_flag("--analytic-only", lm.analytic_only, "skip the Monte-Carlo runs");
    lemma->add_flag("--check", lm.check, "fail if empirical deviates > 3 standard errors");

    GprCheckArgs gc;
    CLI::App* gpr = app.add_subcommand("gpr-check",
                                       "compare the GP posterior against a dense oracle");
    gpr->add_option("--instances", gc.instances, "random instances");
    gpr->add_option("--max-obs", gc.max_obs, "max observations per instance");
    gpr->add_option("--dim", gc.dim, "max embedding dimension");
    gpr->add_option("--seed", gc.seed, "instance seed");
    gpr->add_option("--jitter", gc.jitter, "base kernel jitter");
    gpr->add_flag("--check", gc.check, "fail if deviation exceeds 1e-8");

    CLI::App* index = app.add_subcommand("index", "caption-embedding search index");
    index->require_subcommand(1);
    IndexBuildArgs ib;
    CLI::App* ibuild = index->add_subcommand("build", "TSV -> binary corpus");
    ibuild->add_option("--input", ib.input, "TSV: id<TAB>payload<TAB>floats...")->required();
    ibuild->add_option("--output", ib.output, "binary corpus path")->required();
    IndexQueryArgs iq;
    CLI::App* iquery = index->add_subcommand("query", "rank corpus entries for queries");
    iquery->add_option("--corpus", iq.corpus, "binary corpus path")->required();
    iquery->add_option("--queries", iq.queries, "one whitespace-separated embedding per line")
        ->required();
    iquery->add_option("--top-k", iq.top_k, "results per query");
    iquery->add_option("--mode", iq.mode, "exact|accelerated");
    iquery->add_option("--lists", iq.lists, "accelerated: inverted lists (0 = auto)");
    iquery->add_option("--probes", iq.probes, "accelerated: lists probed (0 = auto)");
    iquery->add_option("--seed", iq.seed, "accelerated: clustering seed");

    DedupArgs dd;
    CLI::App* dedup = app.add_subcommand("dedup",
                                         "difference-hash overlap audit between two sets");
    dedup->add_option("--reference", dd.reference,
                      "reference images (PNM) or hash lists (hex per line)")
        ->required();
    dedup->add_option("--probe", dd.probe, "probe images or hash lists")->required();
    dedup->add_option("--max-hamming", dd.max_hamming, "bit distance counted as a collision")
        ->check(CLI::Range(0, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(explore)) {
            if (explore->count("--seed")) ex.seed = static_cast<std::uint64_t>(ex_seed);
            return cmd_explore(ex);
        }
        if (app.got_subcommand(lemma)) return cmd_lemma(lm);
        if (app.got_subcommand(gpr)) return cmd_gpr_check(gc);
        if (app.got_subcommand(index)) {
            if (index->got_subcommand(ibuild)) return cmd_index_build(ib);
            return cmd_index_query(iq);
        }
        if (app.got_subcommand(dedup)) return cmd_dedup(dd);
    } catch (const scout::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
