#include "scout/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "scout/vec.hpp"

namespace scout {

namespace {

// Stream tags off the world seed.
constexpr std::uint64_t kConceptStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kHeldoutStream = 3;
constexpr std::uint64_t kDescriptorStream = 4;
constexpr std::uint64_t kSearchStream = 5;

std::vector<double> gaussian_vector(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.normal();
    return v;
}

// Uniform direction scaled to lie inside the radius ball.
std::vector<double> ball_offset(Rng& rng, int dim, double radius) {
    std::vector<double> v = gaussian_vector(rng, dim);
    double n = norm2(v);
    if (n == 0.0) return std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    double r = radius * std::pow(rng.uniform_pos(), 1.0 / dim);
    for (double& x : v) x *= r / n;
    return v;
}

std::vector<double> box_point(Rng& rng, int dim, double box) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.uniform(-box, box);
    return v;
}

void add_scaled(std::vector<double>& dst, const std::vector<double>& src, double scale) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

} // namespace

SimWorld SimWorld::make(const SimParams& p) {
    if (p.vocab_size < 1 || p.clusters < 1 || p.cluster_size < 1)
        throw std::invalid_argument("SimWorld: vocab_size, clusters, cluster_size must be >= 1");
    if (static_cast<std::int64_t>(p.clusters) * p.cluster_size > p.vocab_size)
        throw std::invalid_argument("SimWorld: clusters * cluster_size exceeds vocab_size");
    if (p.clusters > p.latent_dim)
        throw std::invalid_argument("SimWorld: need latent_dim >= clusters for separated centers");
    if (p.cluster_radius <= 0.0 || p.latent_box <= 0.0 || p.rep_noise < 0.0)
        throw std::invalid_argument("SimWorld: radius and box must be positive, noise >= 0");
    if (p.phi_min < 0.0 || p.phi_max > 1.0 || p.phi_min > p.phi_max)
        throw std::invalid_argument("SimWorld: need 0 <= phi_min <= phi_max <= 1");
    if (p.appearance_modes < 1 || p.target_size < 1 || p.heldout_size < 0)
        throw std::invalid_argument("SimWorld: bad target/held-out sizing");

    SimWorld w;
    w.params_ = p;

    // Cluster centers huddle around a shared direction, pushed out to the
    // typical background-latent norm: pairwise distance h*sqrt(2) keeps a
    // 1.2x margin over the 4-radius separation floor, and matching the
    // background norm keeps the relevant region no more "central" than the
    // background cloud itself (a central region would soak up the residuals
    // of every observed background query).
    const double dim = static_cast<double>(p.latent_dim);
    double h = std::max(std::sqrt(2.0), 4.0 * p.cluster_radius / std::sqrt(2.0) * 1.2);
    double bg_norm2 = p.latent_box * p.latent_box * dim / 3.0;
    double disc = h * h / dim + bg_norm2 - h * h;
    double shift = disc > 0.0 ? std::max(0.0, std::sqrt(disc) - h / std::sqrt(dim)) : 0.0;
    w.centers_.reserve(static_cast<std::size_t>(p.clusters));
    for (int k = 0; k < p.clusters; ++k) {
        std::vector<double> c(static_cast<std::size_t>(p.latent_dim),
                              shift / std::sqrt(dim));
        c[static_cast<std::size_t>(k)] += h;
        w.centers_.push_back(std::move(c));
    }

    // Concept latents: cluster members inside the ball, others in the box.
    Rng crng = w.stream(kConceptStream);
    w.vocab_.dimension = static_cast<std::size_t>(p.latent_dim);
    w.vocab_.concepts.reserve(static_cast<std::size_t>(p.vocab_size));
    const std::int64_t relevant = static_cast<std::int64_t>(p.clusters) * p.cluster_size;
    for (std::int64_t i = 0; i < p.vocab_size; ++i) {
        Rng r = crng.derive(static_cast<std::uint64_t>(i));
        Concept c;
        c.id = static_cast<int>(i);
        c.lemma = "concept_" + std::to_string(i);
        if (i < relevant) {
            int cluster = static_cast<int>(i / p.cluster_size);
            c.embedding = w.centers_[static_cast<std::size_t>(cluster)];
            add_scaled(c.embedding, ball_offset(r, p.latent_dim, p.cluster_radius), 1.0);
        } else {
            c.embedding = box_point(r, p.latent_dim, p.latent_box);
        }
        w.vocab_.concepts.push_back(std::move(c));
    }

    // Target set: balanced clusters, appearance modes cycled. Like the
    // held-out items, each target carries a frozen noise direction; the
    // evaluation re-encodes both sides at the current noise scale.
    Rng trng = w.stream(kTargetStream);
    w.target_.embeddings.reserve(static_cast<std::size_t>(p.target_size));
    for (int t = 0; t < p.target_size; ++t) {
        Rng r = trng.derive(static_cast<std::uint64_t>(t));
        int cluster = t % p.clusters;
        int mode = (t / p.clusters) % p.appearance_modes;
        std::vector<double> v = w.centers_[static_cast<std::size_t>(cluster)];
        add_scaled(v, ball_offset(r, p.latent_dim, p.cluster_radius), 1.0);
        add_scaled(v, w.descriptor_offset(mode), 1.0);
        w.target_.embeddings.push_back(std::move(v));
        w.target_labels_.push_back(cluster);
        w.target_noise_.push_back(gaussian_vector(r, p.latent_dim));
    }

    // Held-out items mirror the target generation with their own stream and
    // carry frozen noise directions so fidelity sweeps are comparable.
    Rng hrng = w.stream(kHeldoutStream);
    for (int t = 0; t < p.heldout_size; ++t) {
        Rng r = hrng.derive(static_cast<std::uint64_t>(t));
        int cluster = t % p.clusters;
        int mode = (t / p.clusters) % p.appearance_modes;
        std::vector<double> v = w.centers_[static_cast<std::size_t>(cluster)];
        add_scaled(v, ball_offset(r, p.latent_dim, p.cluster_radius), 1.0);
        add_scaled(v, w.descriptor_offset(mode), 1.0);
        w.heldout_.push_back(std::move(v));
        w.heldout_labels_.push_back(cluster);
        w.heldout_noise_.push_back(gaussian_vector(r, p.latent_dim));
    }
    return w;
}

int SimWorld::concept_cluster(int concept_id) const {
    if (concept_id < 0 || concept_id >= params_.vocab_size)
        throw std::invalid_argument("SimWorld: unknown concept id");
    const std::int64_t relevant =
        static_cast<std::int64_t>(params_.clusters) * params_.cluster_size;
    if (concept_id >= relevant) return -1;
    return concept_id / params_.cluster_size;
}

double SimWorld::query_match(int concept_id, int descriptor_index) const {
    if (concept_cluster(concept_id) < 0) return 0.0;
    std::vector<double> q = vocab_.concepts[static_cast<std::size_t>(concept_id)].embedding;
    if (descriptor_index >= 0) add_scaled(q, descriptor_offset(descriptor_index), 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : target_.embeddings) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            double diff = q[i] - t[i];
            d2 += diff * diff;
        }
        best = std::min(best, d2);
    }
    if (!std::isfinite(best)) return 0.0;
    double tau = 2.0 * params_.cluster_radius;
    return std::exp(-best / (2.0 * tau * tau));
}

std::vector<double> SimWorld::descriptor_offset(int descriptor_index) const {
    // Global per-descriptor direction; target appearance modes reuse the
    // same family, so descriptor-rotated queries land on real modes.
    Rng r = stream(kDescriptorStream).derive(static_cast<std::uint64_t>(descriptor_index));
    std::vector<double> v = gaussian_vector(r, params_.latent_dim);
    double n = norm2(v);
    double len = params_.descriptor_scale * params_.cluster_radius;
    if (n == 0.0) return std::vector<double>(v.size(), 0.0);
    for (double& x : v) x *= len / n;
    return v;
}

std::vector<SimWorld::SimRecord> SimWorld::search(const EncoderState& encoder, int concept_id,
                                                  int descriptor_index, int count,
                                                  int iteration, std::int64_t id_base) const {
    if (count < 1) throw std::invalid_argument("SimWorld::search: count must be >= 1");
    if (concept_id < 0 || concept_id >= params_.vocab_size)
        throw std::invalid_argument("SimWorld::search: unknown concept id");

    const double noise_scale = params_.rep_noise * (1.0 - encoder.fidelity);
    const std::vector<double>& latent =
        vocab_.concepts[static_cast<std::size_t>(concept_id)].embedding;
    std::vector<double> offset;
    if (descriptor_index >= 0) offset = descriptor_offset(descriptor_index);

    Rng base = stream(kSearchStream)
                   .derive(static_cast<std::uint64_t>(concept_id),
                           static_cast<std::uint64_t>(descriptor_index + 1))
                   .derive(static_cast<std::uint64_t>(iteration));
    std::vector<SimRecord> out;
    out.reserve(static_cast<std::size_t>(count));
    int cluster = concept_cluster(concept_id);
    for (int j = 0; j < count; ++j) {
        Rng r = base.derive(static_cast<std::uint64_t>(j));
        SimRecord sr;
        sr.record.id = id_base + j;
        sr.record.source_concept = concept_id;
        sr.record.source_descriptor = descriptor_index;
        sr.record.iteration = iteration;
        if (r.uniform() < params_.distractor_rate) {
            sr.record.embedding = box_point(r, params_.latent_dim, params_.latent_box);
            sr.true_cluster = -1;
        } else {
            sr.record.embedding = latent;
            if (!offset.empty()) add_scaled(sr.record.embedding, offset, 1.0);
            if (noise_scale > 0.0)
                add_scaled(sr.record.embedding, gaussian_vector(r, params_.latent_dim),
                           noise_scale);
            sr.true_cluster = cluster;
        }
        out.push_back(std::move(sr));
    }
    return out;
}

double SimWorld::evaluate_accuracy(const EncoderState& encoder,
                                   std::span<const LabeledRef> extra_reference, int k) const {
    if (k < 1) throw std::invalid_argument("evaluate_accuracy: k must be >= 1");
    if (heldout_.empty()) throw std::invalid_argument("evaluate_accuracy: no held-out items");
    const std::size_t refs = target_.size() + extra_reference.size();
    if (refs == 0) throw std::invalid_argument("evaluate_accuracy: empty reference set");

    const double noise_scale = params_.rep_noise * (1.0 - encoder.fidelity);
    const int kk = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), refs));

    // Target references are re-encoded at the current noise scale, just like
    // the held-out probes; buffer references stay at their stored (download
    // time) representations.
    std::vector<std::vector<double>> target_reps(target_.size());
    for (std::size_t t = 0; t < target_.size(); ++t) {
        target_reps[t] = target_.embeddings[t];
        if (noise_scale > 0.0) add_scaled(target_reps[t], target_noise_[t], noise_scale);
    }

    std::size_t correct = 0;
    std::vector<double> rep;
    std::vector<std::pair<double, int>> best; // (similarity, label)
    for (std::size_t h = 0; h < heldout_.size(); ++h) {
        rep = heldout_[h];
        if (noise_scale > 0.0) add_scaled(rep, heldout_noise_[h], noise_scale);

        best.clear();
        auto consider = [&](std::span<const double> e, int label) {
            double s = cosine(rep, e);
            best.emplace_back(s, label);
        };
        for (std::size_t t = 0; t < target_.size(); ++t)
            consider(target_reps[t], target_labels_[t]);
        for (const auto& ref : extra_reference) consider(ref.embedding, ref.label);

        std::partial_sort(best.begin(), best.begin() + kk, best.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        // Majority vote; ties fall to higher summed similarity, then the
        // smaller label.
        struct Tally {
            int votes = 0;
            double sim = 0.0;
        };
        std::map<int, Tally> tally;
        for (int i = 0; i < kk; ++i) {
            auto& t = tally[best[static_cast<std::size_t>(i)].second];
            t.votes += 1;
            t.sim += best[static_cast<std::size_t>(i)].first;
        }
        int winner = -2;
        Tally wt;
        for (const auto& [label, t] : tally) {
            if (winner == -2 || t.votes > wt.votes ||
                (t.votes == wt.votes && t.sim > wt.sim)) {
                winner = label;
                wt = t;
            }
        }
        if (winner == heldout_labels_[h]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(heldout_.size());
}

EncoderState encoder_update(const EncoderState& encoder, double relevant_fraction,
                            const SimParams& params) {
    if (relevant_fraction < 0.0 || relevant_fraction > 1.0)
        throw std::invalid_argument("encoder_update: fraction outside [0, 1]");
    EncoderState next = encoder;
    next.cumulative_relevant_fraction =
        (1.0 - params.ema_rate) * encoder.cumulative_relevant_fraction +
        params.ema_rate * relevant_fraction;
    double phi = params.phi_min +
                 (params.phi_max - params.phi_min) * next.cumulative_relevant_fraction;
    next.fidelity = std::max(encoder.fidelity, phi);
    return next;
}

} // namespace scout
