#pragma once

#include "abtrust/simnet.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abtrust {

/// 100 * authentic / (authentic + inauthentic). Throws when nothing completed.
double authentic_percent(const ExperimentResult& result);

/// Population standard deviation of per-peer load over the given good peers.
double load_stddev(const ExperimentResult& result, std::span<const int> good_ids);

std::vector<int> good_peer_ids(std::span<const Behavior> behaviors);

struct SweepRow {
    double scenario_value_pct = 0.0;  // percent of peers affected
    Algorithm algorithm = Algorithm::Absolute;
    double mean_authentic_pct = 0.0;
    double stddev_authentic_pct = 0.0;
    double stderr_authentic_pct = 0.0;
    double mean_load_stddev = 0.0;
    double mean_feedback_messages = 0.0;
    double mean_trust_read_messages = 0.0;
    std::uint64_t seed_base = 0;
    int trials = 0;
};

/// Default sweep values per scenario: malicious 5%..45%, unpredictable
/// 5%..35%, collectives 1..6 groups.
std::vector<double> default_sweep_values(Scenario scenario);

/// Runs trials per (value, algorithm) with seeds seed_base..seed_base+trials-1
/// and averages the per-trial metrics. `jobs` bounds concurrent trials; the
/// aggregation is keyed, so results do not depend on completion order.
std::vector<SweepRow> sweep(Scenario scenario, std::span<const Algorithm> algorithms,
                            std::span<const double> values, int trials, const SimConfig& base,
                            int jobs = 1);

struct ConvergenceRow {
    int p = 1;
    int q = 1;
    double alpha = 1.0;
    std::vector<double> trace;

    /// First iteration whose residual drops below the bound, or -1.
    int iterations_to(double bound) const;
};

/// Residual traces of the solver on one seeded random trust matrix, one row
/// per (p, q) pair.
std::vector<ConvergenceRow> convergence_study(std::span<const std::pair<int, int>> exponents,
                                              std::uint64_t seed, int iterations, int peers = 100);

/// Strongly connected random trust matrix: a seeded Hamiltonian cycle plus
/// density-many extra entries, scores uniform in [low, high].
TrustMatrix random_trust_matrix(Index peers, double density, double low, double high,
                                RandomEngine& rng);

}  // namespace abtrust
