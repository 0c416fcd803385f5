#include "abtrust/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace abtrust {

Index BaselineConfig::resolved_power_nodes(Index n) const {
    if (power_nodes > 0) return std::min(power_nodes, n);
    return static_cast<Index>(std::ceil(0.05 * static_cast<double>(n)));
}

void BaselineConfig::validate(Index n) const {
    if (!(damping >= 0.0 && damping <= 1.0))
        throw std::invalid_argument("BaselineConfig: damping must lie in [0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("BaselineConfig: epsilon must be positive");
    if (max_iterations < 1)
        throw std::invalid_argument("BaselineConfig: max_iterations must be >= 1");
    const Index m = resolved_power_nodes(n);
    if (m < 1 || m > n)
        throw std::invalid_argument("BaselineConfig: power node count out of range");
    for (Index id : pretrusted)
        if (id < 0 || id >= n)
            throw std::out_of_range("BaselineConfig: pre-trusted peer out of range");
}

NormalizedTrustMatrix NormalizedTrustMatrix::from_scores(const Matrix& raw) {
    if (raw.rows() != raw.cols() || raw.rows() < 1)
        throw std::invalid_argument("NormalizedTrustMatrix: matrix must be square and nonempty");
    if ((raw.array() < 0.0).any())
        throw std::invalid_argument("NormalizedTrustMatrix: scores must be nonnegative");

    const Index n = raw.rows();
    NormalizedTrustMatrix out;
    out.rows_ = Matrix::Zero(n, n);
    out.zero_rows_.assign(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Index j = 0; j < n; ++j)
            if (j != i) sum += raw(i, j);
        if (sum > 0.0) {
            for (Index j = 0; j < n; ++j) {
                if (j == i || raw(i, j) == 0.0) continue;
                out.rows_(i, j) = raw(i, j) / sum;
                ++out.interactions_;
            }
        } else {
            out.zero_rows_[static_cast<std::size_t>(i)] = 1;
        }
    }
    return out;
}

Vector pretrust_distribution(Index n, std::span<const Index> peers) {
    if (peers.empty())
        throw std::invalid_argument("pretrust_distribution: empty peer set");
    Vector p = Vector::Zero(n);
    for (Index id : peers) {
        if (id < 0 || id >= n) throw std::out_of_range("pretrust_distribution: peer out of range");
        p[id] += 1.0;
    }
    p /= p.sum();
    return p;
}

GlobalTrustVector eigentrust_with(const NormalizedTrustMatrix& c, const BaselineConfig& config,
                                  const Eigen::Ref<const Vector>& pretrust,
                                  const Eigen::Ref<const Vector>& warm) {
    const Index n = c.size();
    config.validate(n);
    if (pretrust.size() != n || warm.size() != n)
        throw std::invalid_argument("eigentrust: dimension mismatch");

    const Matrix& rows = c.rows();
    const std::vector<char>& zero = c.zero_rows();
    const double a = config.damping;

    GlobalTrustVector result;
    result.converged = false;
    Vector t = warm;
    if (t.sum() > 0.0) t /= t.sum();

    for (int k = 0; k < config.max_iterations; ++k) {
        // y = C'^t t where interaction-free rows of C act as the uniform row,
        // so peers that rated nobody spread their vote evenly.
        Vector y = rows.transpose() * t;
        double orphan_mass = 0.0;
        for (Index i = 0; i < n; ++i)
            if (zero[static_cast<std::size_t>(i)]) orphan_mass += t[i];
        if (orphan_mass > 0.0) y.array() += orphan_mass / static_cast<double>(n);

        Vector next = (1.0 - a) * y + a * pretrust;
        const double delta = (next - t).cwiseAbs().sum();
        result.residual_trace.push_back(delta);
        result.iterations_used = k + 1;
        t = std::move(next);
        if (delta < config.epsilon) {
            result.converged = true;
            break;
        }
    }
    if (t.sum() > 0.0) t /= t.sum();
    result.values = std::move(t);
    return result;
}

GlobalTrustVector eigentrust(const NormalizedTrustMatrix& c, const BaselineConfig& config) {
    const Vector p = pretrust_distribution(c.size(), config.pretrusted);
    return eigentrust_with(c, config, p, p);
}

PowerTrustResult powertrust_full(const NormalizedTrustMatrix& c, const BaselineConfig& config) {
    const Vector uniform = Vector::Constant(c.size(), 1.0 / static_cast<double>(c.size()));
    return powertrust_full(c, config, uniform);
}

PowerTrustResult powertrust_full(const NormalizedTrustMatrix& c, const BaselineConfig& config,
                                 const Eigen::Ref<const Vector>& warm) {
    const Index n = c.size();
    config.validate(n);
    const Index m = config.resolved_power_nodes(n);
    const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));

    PowerTrustResult out;
    out.ranking_phase = eigentrust_with(c, config, uniform, warm);

    // Elect the m most reputable peers; ties go to the lowest index.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
        return out.ranking_phase.values[lhs] > out.ranking_phase.values[rhs];
    });
    out.power_nodes.assign(order.begin(), order.begin() + m);
    std::sort(out.power_nodes.begin(), out.power_nodes.end());

    const Vector power_pretrust = pretrust_distribution(n, out.power_nodes);
    out.result = eigentrust_with(c, config, power_pretrust, out.ranking_phase.values);
    return out;
}

GlobalTrustVector powertrust(const NormalizedTrustMatrix& c, const BaselineConfig& config) {
    return powertrust_full(c, config).result;
}

}  // namespace abtrust
