#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace abtrust {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;  // column-major

/// Weight factors for the three satisfaction levels. The neutral weight is
/// always the midpoint of the other two.
struct WeightConfig {
    double w_g = 10.0;  // satisfactory file
    double w_b = 1.0;   // unsatisfactory file

    double w_n() const { return (w_g + w_b) / 2.0; }
    void validate() const;  // requires w_g > w_b > 0
};

/// Per (rater, ratee) download tallies.
struct TransactionCounts {
    std::int64_t n_g = 0;
    std::int64_t n_n = 0;
    std::int64_t n_b = 0;

    std::int64_t n_t() const { return n_g + n_n + n_b; }
    double x() const { return static_cast<double>(n_g) / static_cast<double>(n_t()); }
    double y() const { return static_cast<double>(n_b) / static_cast<double>(n_t()); }
};

/// Local trust a rater assigns from its download history:
/// T = [(x - y + 1) w_g + (y - x + 1) w_b] / 2 with x, y the satisfactory and
/// unsatisfactory fractions. Always lands in [w_b, w_g].
/// Throws if there were no transactions; callers must not fabricate a score.
double local_trust(const TransactionCounts& counts, const WeightConfig& weights);

/// Biases a raw evaluation by the evaluator weight:
/// [eval_in^p * w_e^q]^(1/(p+q)). Strictly increasing in eval_in.
double bias_evaluation(double eval_in, double w_e, int p, int q);

/// Equivalent trust of a rater set: sum(t^2) / sum(t). Dominated by the
/// high-trust members, always inside [min, max] of the inputs.
double set_trust(std::span<const double> members);

/// beta * global + (1 - beta) * local, beta in [0, 1].
double combined_score(double global, double local, double beta);

/// Mean absolute component difference, (1/N) * ||a - b||_1.
double residual(const Eigen::Ref<const Vector>& t_new, const Eigen::Ref<const Vector>& t_old);

/// Exponents and stopping rule for the fixed-point solver.
struct SolverConfig {
    int p = 3;
    int q = 1;
    double threshold = 1e-4;
    int max_iterations = 100;
    double initial_value = 5.5;  // (w_g + w_b) / 2 under the default weights

    double alpha() const { return static_cast<double>(q) / static_cast<double>(p); }
    void validate() const;
};

/// Sparse matrix of local trust scores, entry (rater, ratee). An absent entry
/// means the pair never interacted; self-entries are rejected. Stored
/// column-major so that a ratee's rater set is one inner iteration.
class TrustMatrix {
public:
    explicit TrustMatrix(Index n);

    Index size() const { return n_; }
    std::size_t entry_count() const { return entries_.size(); }

    /// Upsert the score the rater assigns the ratee. Scores must be positive.
    void set(Index rater, Index ratee, double score);

    /// Stored score, or 0 when the pair never interacted.
    double coeff(Index rater, Index ratee) const;

    bool has_raters(Index ratee) const;

    /// Number of peers with at least one rater.
    Index rated_count() const;

    const SparseMatrix& matrix() const;

private:
    void check_indices(Index rater, Index ratee) const;

    Index n_;
    std::map<std::pair<Index, Index>, double> entries_;  // (ratee, rater) -> score
    mutable SparseMatrix cache_;
    mutable bool dirty_ = true;
};

/// Global trust vector plus solver metadata. `converged == false` flags a run
/// that hit max_iterations; `values` then carries the last iterate.
struct GlobalTrustVector {
    Vector values;
    int iterations_used = 0;
    std::vector<double> residual_trace;
    bool converged = true;
};

/// One application of the aggregation map: for each peer with rater set S,
///   t_i' = [ (sum_{j in S} T_ji t_j / sum t_j)^p * (sum t_j^2 / sum t_j)^q ]^(1/(p+q)).
/// Peers without raters take config.initial_value.
Vector absolute_trust_step(const TrustMatrix& trust, const Eigen::Ref<const Vector>& t,
                           const SolverConfig& config);

/// Iterates absolute_trust_step from the all-initial_value vector until the
/// mean residual over rated peers drops below config.threshold.
GlobalTrustVector solve_absolute_trust(const TrustMatrix& trust, const SolverConfig& config);

/// Same, warm-started from a strictly positive vector.
GlobalTrustVector solve_absolute_trust(const TrustMatrix& trust, const SolverConfig& config,
                                       const Eigen::Ref<const Vector>& initial);

}  // namespace abtrust
