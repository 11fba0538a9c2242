#include "scout/gpr_reference.hpp"

#include <cmath>
#include <stdexcept>

namespace scout {

namespace {

// Same merging policy as the fast path, implemented separately: exactly
// equal embeddings collapse to one row with the average reward.
struct MergedObs {
    std::vector<std::vector<double>> embeddings;
    std::vector<double> rewards;
};

MergedObs merge_duplicates(const std::vector<Observation>& obs) {
    MergedObs out;
    std::vector<int> counts;
    for (const auto& o : obs) {
        std::size_t idx = out.embeddings.size();
        for (std::size_t i = 0; i < out.embeddings.size(); ++i) {
            if (out.embeddings[i] == o.embedding) {
                idx = i;
                break;
            }
        }
        if (idx == out.embeddings.size()) {
            out.embeddings.push_back(o.embedding);
            out.rewards.push_back(0.0);
            counts.push_back(0);
        }
        out.rewards[idx] += o.reward;
        counts[idx] += 1;
    }
    for (std::size_t i = 0; i < out.rewards.size(); ++i) out.rewards[i] /= counts[i];
    return out;
}

double kernel_value(const std::vector<double>& a, const std::vector<double>& b,
                    KernelKind kind) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-(kind == KernelKind::Exponential ? std::sqrt(sq) : sq) / 2.0);
}

// Solves A x = rhs by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> rhs) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        if (A[pivot][col] == 0.0)
            throw std::runtime_error("reference_gpr_posterior: singular system");
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
        x[i] = s / A[i][i];
    }
    return x;
}

} // namespace

std::vector<ReferencePosterior> reference_gpr_posterior(
    const std::vector<Observation>& observations,
    const std::vector<std::vector<double>>& queries,
    double jitter, KernelKind kind) {
    if (observations.empty())
        throw std::invalid_argument("reference_gpr_posterior: no observations");
    MergedObs m = merge_duplicates(observations);
    const std::size_t n = m.embeddings.size();

    double prior = 0.0;
    for (double r : m.rewards) prior += r;
    prior /= static_cast<double>(n);

    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            K[i][j] = kernel_value(m.embeddings[i], m.embeddings[j], kind) +
                      (i == j ? jitter : 0.0);

    std::vector<double> centered = m.rewards;
    for (double& r : centered) r -= prior;
    std::vector<double> alpha = solve_dense(K, centered);

    std::vector<ReferencePosterior> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        std::vector<double> ks(n);
        for (std::size_t i = 0; i < n; ++i) ks[i] = kernel_value(m.embeddings[i], q, kind);
        double mean = prior;
        for (std::size_t i = 0; i < n; ++i) mean += ks[i] * alpha[i];
        std::vector<double> z = solve_dense(K, ks);
        double var = kernel_value(q, q, kind);
        for (std::size_t i = 0; i < n; ++i) var -= ks[i] * z[i];
        out.push_back({mean, var > 0.0 ? std::sqrt(var) : 0.0});
    }
    return out;
}

} // namespace scout
