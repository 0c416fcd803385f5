#include "abtrust/trust_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abtrust {

void WeightConfig::validate() const {
    if (!(w_g > w_b) || !(w_b > 0.0))
        throw std::invalid_argument("WeightConfig: requires w_g > w_b > 0");
}

double local_trust(const TransactionCounts& counts, const WeightConfig& weights) {
    weights.validate();
    if (counts.n_g < 0 || counts.n_n < 0 || counts.n_b < 0)
        throw std::invalid_argument("local_trust: negative transaction count");
    if (counts.n_t() < 1)
        throw std::invalid_argument("local_trust: no interaction between the pair");
    const double x = counts.x();
    const double y = counts.y();
    return 0.5 * ((x - y + 1.0) * weights.w_g + (y - x + 1.0) * weights.w_b);
}

double bias_evaluation(double eval_in, double w_e, int p, int q) {
    if (!(eval_in > 0.0)) throw std::invalid_argument("bias_evaluation: eval_in must be positive");
    if (!(w_e > 0.0)) throw std::invalid_argument("bias_evaluation: w_e must be positive");
    if (p < 1 || q < 1) throw std::invalid_argument("bias_evaluation: p and q must be >= 1");
    const double pd = static_cast<double>(p);
    const double qd = static_cast<double>(q);
    return std::exp((pd * std::log(eval_in) + qd * std::log(w_e)) / (pd + qd));
}

double set_trust(std::span<const double> members) {
    if (members.empty()) throw std::invalid_argument("set_trust: empty member set");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double t : members) {
        if (!(t > 0.0)) throw std::invalid_argument("set_trust: members must be positive");
        sum += t;
        sum_sq += t * t;
    }
    return sum_sq / sum;
}

double combined_score(double global, double local, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("combined_score: beta must lie in [0, 1]");
    return beta * global + (1.0 - beta) * local;
}

double residual(const Eigen::Ref<const Vector>& t_new, const Eigen::Ref<const Vector>& t_old) {
    if (t_new.size() != t_old.size())
        throw std::invalid_argument("residual: dimension mismatch");
    if (t_new.size() == 0) return 0.0;
    return (t_new - t_old).cwiseAbs().sum() / static_cast<double>(t_new.size());
}

void SolverConfig::validate() const {
    if (p < 1 || q < 1) throw std::invalid_argument("SolverConfig: p and q must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("SolverConfig: threshold must be positive");
    if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    if (!(initial_value > 0.0))
        throw std::invalid_argument("SolverConfig: initial_value must be positive");
}

TrustMatrix::TrustMatrix(Index n) : n_(n) {
    if (n < 1) throw std::invalid_argument("TrustMatrix: dimension must be >= 1");
}

void TrustMatrix::check_indices(Index rater, Index ratee) const {
    if (rater < 0 || rater >= n_ || ratee < 0 || ratee >= n_)
        throw std::out_of_range("TrustMatrix: peer index out of range");
    if (rater == ratee) throw std::invalid_argument("TrustMatrix: self-entries are not allowed");
}

void TrustMatrix::set(Index rater, Index ratee, double score) {
    check_indices(rater, ratee);
    if (!(score > 0.0)) throw std::invalid_argument("TrustMatrix: score must be positive");
    entries_[{ratee, rater}] = score;
    dirty_ = true;
}

double TrustMatrix::coeff(Index rater, Index ratee) const {
    check_indices(rater, ratee);
    const auto it = entries_.find({ratee, rater});
    return it == entries_.end() ? 0.0 : it->second;
}

bool TrustMatrix::has_raters(Index ratee) const {
    const auto it = entries_.lower_bound({ratee, Index{0}});
    return it != entries_.end() && it->first.first == ratee;
}

Index TrustMatrix::rated_count() const {
    Index count = 0;
    Index current = -1;
    for (const auto& [key, value] : entries_) {
        if (key.first != current) {
            current = key.first;
            ++count;
        }
    }
    return count;
}

const SparseMatrix& TrustMatrix::matrix() const {
    if (dirty_) {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(entries_.size());
        for (const auto& [key, value] : entries_)
            triplets.emplace_back(static_cast<int>(key.second), static_cast<int>(key.first), value);
        cache_.resize(n_, n_);
        cache_.setFromTriplets(triplets.begin(), triplets.end());
        cache_.makeCompressed();
        dirty_ = false;
    }
    return cache_;
}

Vector absolute_trust_step(const TrustMatrix& trust, const Eigen::Ref<const Vector>& t,
                           const SolverConfig& config) {
    config.validate();
    if (t.size() != trust.size())
        throw std::invalid_argument("absolute_trust_step: dimension mismatch");
    if ((t.array() <= 0.0).any())
        throw std::invalid_argument("absolute_trust_step: trust vector must be strictly positive");

    const SparseMatrix& m = trust.matrix();
    const double p = static_cast<double>(config.p);
    const double q = static_cast<double>(config.q);
    Vector out(t.size());
    for (Index i = 0; i < t.size(); ++i) {
        double sum_t = 0.0;
        double sum_t_sq = 0.0;
        double sum_weighted = 0.0;
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
            const double tj = t[it.row()];
            sum_t += tj;
            sum_t_sq += tj * tj;
            sum_weighted += it.value() * tj;
        }
        if (sum_t == 0.0) {
            // No raters yet: hold the initial value, keeping the map well-defined.
            out[i] = config.initial_value;
            continue;
        }
        const double weighted_avg = sum_weighted / sum_t;
        const double group_trust = sum_t_sq / sum_t;
        out[i] = std::exp((p * std::log(weighted_avg) + q * std::log(group_trust)) / (p + q));
        if (!std::isfinite(out[i]))
            throw std::runtime_error("absolute_trust_step: non-finite trust for peer " +
                                     std::to_string(i));
    }
    return out;
}

namespace {

// Residual restricted to peers with at least one rater; unrated peers are
// pinned at initial_value and would only dilute the measure.
double rated_residual(const Eigen::Ref<const Vector>& t_new, const Eigen::Ref<const Vector>& t_old,
                      const std::vector<char>& rated, Index rated_count) {
    if (rated_count == 0) return 0.0;
    double sum = 0.0;
    for (Index i = 0; i < t_new.size(); ++i)
        if (rated[static_cast<std::size_t>(i)]) sum += std::abs(t_new[i] - t_old[i]);
    return sum / static_cast<double>(rated_count);
}

}  // namespace

GlobalTrustVector solve_absolute_trust(const TrustMatrix& trust, const SolverConfig& config) {
    config.validate();
    const Vector initial = Vector::Constant(trust.size(), config.initial_value);
    return solve_absolute_trust(trust, config, initial);
}

GlobalTrustVector solve_absolute_trust(const TrustMatrix& trust, const SolverConfig& config,
                                       const Eigen::Ref<const Vector>& initial) {
    config.validate();
    if (initial.size() != trust.size())
        throw std::invalid_argument("solve_absolute_trust: dimension mismatch");
    if ((initial.array() <= 0.0).any())
        throw std::invalid_argument("solve_absolute_trust: initial vector must be strictly positive");

    std::vector<char> rated(static_cast<std::size_t>(trust.size()), 0);
    Index rated_count = 0;
    for (Index i = 0; i < trust.size(); ++i) {
        if (trust.has_raters(i)) {
            rated[static_cast<std::size_t>(i)] = 1;
            ++rated_count;
        }
    }

    GlobalTrustVector result;
    result.converged = false;
    Vector t = initial;
    for (int k = 0; k < config.max_iterations; ++k) {
        Vector next = absolute_trust_step(trust, t, config);
        const double r = rated_residual(next, t, rated, rated_count);
        result.residual_trace.push_back(r);
        result.iterations_used = k + 1;
        t = std::move(next);
        if (r < config.threshold) {
            result.converged = true;
            break;
        }
    }
    result.values = std::move(t);
    return result;
}

}  // namespace abtrust
