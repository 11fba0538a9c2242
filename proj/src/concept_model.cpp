#include "scout/concept_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scout {

double gp_kernel(std::span<const double> a, std::span<const double> b, KernelKind kind) {
    if (a.size() != b.size()) throw std::invalid_argument("gp_kernel: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sq += d * d;
    }
    double dist = (kind == KernelKind::Exponential) ? std::sqrt(sq) : sq;
    return std::exp(-dist / 2.0);
}

struct GprModel::Impl {
    Eigen::MatrixXd train;       // m x d merged training embeddings
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;       // (K + jI)^-1 (r - prior)
    double prior_mean = 0.0;
    double jitter = 0.0;
    KernelKind kind = KernelKind::Exponential;

    Eigen::VectorXd cross_column(std::span<const double> e) const {
        const auto m = train.rows();
        Eigen::VectorXd k(m);
        Eigen::Map<const Eigen::VectorXd> q(e.data(), static_cast<Eigen::Index>(e.size()));
        for (Eigen::Index i = 0; i < m; ++i) {
            double sq = (train.row(i).transpose() - q).squaredNorm();
            double dist = (kind == KernelKind::Exponential) ? std::sqrt(sq) : sq;
            k(i) = std::exp(-dist / 2.0);
        }
        return k;
    }
};

GprModel::GprModel() : impl_(new Impl) {}
GprModel::GprModel(GprModel&&) noexcept = default;
GprModel& GprModel::operator=(GprModel&&) noexcept = default;
GprModel::~GprModel() = default;

GprModel GprModel::fit(const std::vector<Observation>& observations, double jitter,
                       KernelKind kind) {
    if (observations.empty()) throw std::invalid_argument("GprModel::fit: no observations");
    if (jitter <= 0.0) throw std::invalid_argument("GprModel::fit: jitter must be positive");
    const std::size_t d = observations.front().embedding.size();
    for (const auto& o : observations) {
        if (o.embedding.size() != d)
            throw std::invalid_argument("GprModel::fit: embedding dimension mismatch");
        if (!std::isfinite(o.reward))
            throw std::invalid_argument("GprModel::fit: non-finite reward");
    }

    // Merge exactly equal embeddings by averaging their rewards.
    struct Merged {
        const std::vector<double>* e;
        double sum = 0.0;
        int count = 0;
    };
    std::vector<Merged> merged;
    std::map<std::vector<double>, std::size_t> seen;
    for (const auto& o : observations) {
        auto [it, fresh] = seen.try_emplace(o.embedding, merged.size());
        if (fresh) merged.push_back({&it->first, 0.0, 0});
        merged[it->second].sum += o.reward;
        merged[it->second].count += 1;
    }

    const auto m = static_cast<Eigen::Index>(merged.size());
    GprModel model;
    Impl& im = *model.impl_;
    im.kind = kind;
    im.train.resize(m, static_cast<Eigen::Index>(d));
    Eigen::VectorXd rewards(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < d; ++j) im.train(i, static_cast<Eigen::Index>(j)) = (*merged[i].e)[j];
        rewards(i) = merged[i].sum / merged[i].count;
    }
    im.prior_mean = rewards.mean();

    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double sq = (im.train.row(i) - im.train.row(j)).squaredNorm();
            double dist = (kind == KernelKind::Exponential) ? std::sqrt(sq) : sq;
            K(i, j) = K(j, i) = std::exp(-dist / 2.0);
        }
    }

    for (double j = jitter;; j *= 10.0) {
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += j;
        im.llt.compute(Kj);
        if (im.llt.info() == Eigen::Success) {
            im.jitter = j;
            break;
        }
        if (j >= 1e-4)
            throw std::runtime_error("GprModel::fit: Cholesky failed up to jitter 1e-4");
    }
    im.alpha = im.llt.solve((rewards.array() - im.prior_mean).matrix().eval());
    return model;
}

std::pair<double, double> GprModel::predict(std::span<const double> embedding) const {
    const Impl& im = *impl_;
    if (static_cast<Eigen::Index>(embedding.size()) != im.train.cols())
        throw std::invalid_argument("GprModel::predict: dimension mismatch");
    Eigen::VectorXd k = im.cross_column(embedding);
    double mean = im.prior_mean + k.dot(im.alpha);
    Eigen::VectorXd v = im.llt.matrixL().solve(k);
    double var = 1.0 - v.squaredNorm();
    double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return {mean, sd};
}

void GprModel::predict_batch(const std::vector<std::vector<double>>& embeddings,
                             std::vector<double>& means, std::vector<double>& stds) const {
    const Impl& im = *impl_;
    const auto n = embeddings.size();
    means.assign(n, 0.0);
    stds.assign(n, 0.0);
    const auto m = im.train.rows();
    // Chunked so the n x m cross-kernel stays near 32 MB.
    const std::size_t chunk =
        std::max<std::size_t>(1, (std::size_t{1} << 22) / static_cast<std::size_t>(std::max<Eigen::Index>(m, 1)));
    for (std::size_t lo = 0; lo < n; lo += chunk) {
        const std::size_t hi = std::min(n, lo + chunk);
        const auto rows = static_cast<Eigen::Index>(hi - lo);
        Eigen::MatrixXd Ks(rows, m);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto& e = embeddings[lo + static_cast<std::size_t>(r)];
            if (static_cast<Eigen::Index>(e.size()) != im.train.cols())
                throw std::invalid_argument("GprModel::predict_batch: dimension mismatch");
            Ks.row(r) = im.cross_column(e).transpose();
        }
        Eigen::VectorXd mu = (Ks * im.alpha).array() + im.prior_mean;
        Eigen::MatrixXd V = im.llt.matrixL().solve(Ks.transpose()); // m x rows
        for (Eigen::Index r = 0; r < rows; ++r) {
            double var = 1.0 - V.col(r).squaredNorm();
            means[lo + static_cast<std::size_t>(r)] = mu(r);
            stds[lo + static_cast<std::size_t>(r)] = var > 0.0 ? std::sqrt(var) : 0.0;
        }
    }
}

double GprModel::prior_mean() const { return impl_->prior_mean; }
double GprModel::jitter_used() const { return impl_->jitter; }
std::size_t GprModel::observation_count() const {
    return static_cast<std::size_t>(impl_->train.rows());
}
KernelKind GprModel::kernel_kind() const { return impl_->kind; }

std::vector<ConceptPosterior> score_all(const GprModel& model, const Vocabulary& vocab,
                                        const std::map<int, std::vector<double>>& observed) {
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(vocab.size());
    for (const auto& c : vocab.concepts) embeddings.push_back(c.embedding);
    std::vector<double> means, stds;
    model.predict_batch(embeddings, means, stds);

    std::vector<ConceptPosterior> out(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        ConceptPosterior& p = out[i];
        p.concept_id = vocab.concepts[i].id;
        p.mean = means[i];
        p.std = stds[i];
        auto it = observed.find(p.concept_id);
        if (it == observed.end() || it->second.empty()) {
            p.score = p.mean + p.std;
        } else {
            double s = 0.0;
            for (double r : it->second) s += r;
            p.score = s / static_cast<double>(it->second.size());
        }
    }
    return out;
}

} // namespace scout
