#pragma once

#include "abtrust/trust_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace abtrust {

using Matrix = Eigen::MatrixXd;

/// Parameters for the EigenTrust / PowerTrust reference aggregators.
struct BaselineConfig {
    std::vector<Index> pretrusted;  // EigenTrust pre-trusted peers
    double damping = 0.15;          // mixing weight toward the pre-trust distribution
    Index power_nodes = 0;          // PowerTrust top-m count; 0 means ceil(0.05 N)
    double epsilon = 1e-6;          // L1 convergence bound
    int max_iterations = 1000;

    Index resolved_power_nodes(Index n) const;
    void validate(Index n) const;
};

/// Row-stochastic trust matrix for the normalization-based baselines. Rows
/// with any interaction sum to one; interaction-free rows are flagged and
/// act as uniform rows during iteration.
class NormalizedTrustMatrix {
public:
    /// Normalizes a nonnegative raw score matrix (entry (i, j) = score peer i
    /// gives peer j). The diagonal is ignored.
    static NormalizedTrustMatrix from_scores(const Matrix& raw);

    Index size() const { return rows_.rows(); }
    const Matrix& rows() const { return rows_; }
    const std::vector<char>& zero_rows() const { return zero_rows_; }
    std::size_t interaction_count() const { return interactions_; }

private:
    NormalizedTrustMatrix() = default;

    Matrix rows_;
    std::vector<char> zero_rows_;
    std::size_t interactions_ = 0;
};

/// EigenTrust: stationary vector of t <- (1-a) C^t t + a p with interaction-free
/// rows of C acting as uniform rows. Components sum to one.
GlobalTrustVector eigentrust(const NormalizedTrustMatrix& c, const BaselineConfig& config);

/// Same iteration with an explicit pre-trust distribution and warm start.
GlobalTrustVector eigentrust_with(const NormalizedTrustMatrix& c, const BaselineConfig& config,
                                  const Eigen::Ref<const Vector>& pretrust,
                                  const Eigen::Ref<const Vector>& warm);

struct PowerTrustResult {
    GlobalTrustVector ranking_phase;   // uniform pre-trust pass used for election
    std::vector<Index> power_nodes;    // elected top-m, ties to the lowest index
    GlobalTrustVector result;          // rerun with pre-trust mass on the power nodes
};

PowerTrustResult powertrust_full(const NormalizedTrustMatrix& c, const BaselineConfig& config);
PowerTrustResult powertrust_full(const NormalizedTrustMatrix& c, const BaselineConfig& config,
                                 const Eigen::Ref<const Vector>& warm);

GlobalTrustVector powertrust(const NormalizedTrustMatrix& c, const BaselineConfig& config);

/// Uniform probability mass over the given peers.
Vector pretrust_distribution(Index n, std::span<const Index> peers);

}  // namespace abtrust
