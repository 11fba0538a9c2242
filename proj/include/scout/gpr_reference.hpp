#pragma once

#include <vector>

#include "scout/concept_model.hpp"

namespace scout {

/// Independent reference computation of the GP posterior, used to verify
/// GprModel (the `gpr-check` subcommand and the test suite). Deliberately
/// avoids Eigen and Cholesky: plain Gaussian elimination with partial
/// pivoting on the full (K + jitter I) system, one solve per query.
struct ReferencePosterior {
    double mean = 0.0;
    double std = 0.0;
};

std::vector<ReferencePosterior> reference_gpr_posterior(
    const std::vector<Observation>& observations,
    const std::vector<std::vector<double>>& queries,
    double jitter,
    KernelKind kind = KernelKind::Exponential);

} // namespace scout
