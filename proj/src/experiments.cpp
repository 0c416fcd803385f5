#include "abtrust/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace abtrust {

double authentic_percent(const ExperimentResult& result) {
    const long long total = result.authentic_count + result.inauthentic_count;
    if (total < 1) throw std::invalid_argument("authentic_percent: no completed transactions");
    return 100.0 * static_cast<double>(result.authentic_count) / static_cast<double>(total);
}

double load_stddev(const ExperimentResult& result, std::span<const int> good_ids) {
    if (good_ids.size() < 2)
        throw std::invalid_argument("load_stddev: need at least two good peers");
    double mean = 0.0;
    for (int id : good_ids)
        mean += static_cast<double>(result.per_peer_load[static_cast<std::size_t>(id)]);
    mean /= static_cast<double>(good_ids.size());
    double var = 0.0;
    for (int id : good_ids) {
        const double d =
            static_cast<double>(result.per_peer_load[static_cast<std::size_t>(id)]) - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(good_ids.size()));
}

std::vector<int> good_peer_ids(std::span<const Behavior> behaviors) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < behaviors.size(); ++i)
        if (behaviors[i] == Behavior::Good) ids.push_back(static_cast<int>(i));
    return ids;
}

std::vector<double> default_sweep_values(Scenario scenario) {
    switch (scenario) {
        case Scenario::PureMalicious:
            return {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
        case Scenario::Unpredictable:
            return {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
        case Scenario::Collectives:
            return {1, 2, 3, 4, 5, 6};
    }
    return {};
}

namespace {

struct TrialMetrics {
    double authentic_pct = 0.0;
    double load_stddev = 0.0;
    double feedback = 0.0;
    double reads = 0.0;
};

TrialMetrics run_trial(SimConfig cfg) {
    const ExperimentResult result = run_simulation(cfg);
    TrialMetrics m;
    m.authentic_pct = authentic_percent(result);
    const std::vector<int> good = good_peer_ids(result.behaviors);
    m.load_stddev = good.size() >= 2 ? load_stddev(result, good) : 0.0;
    m.feedback = static_cast<double>(result.messages.feedback_messages);
    m.reads = static_cast<double>(result.messages.trust_read_messages);
    return m;
}

double scenario_value_pct(Scenario scenario, double value, const SimConfig& base) {
    const double pct = scenario == Scenario::Collectives
                           ? value * base.collective_group_fraction * 100.0
                           : value * 100.0;
    return std::round(pct * 1e9) / 1e9;  // keep grid values clean in tables
}

}  // namespace

std::vector<SweepRow> sweep(Scenario scenario, std::span<const Algorithm> algorithms,
                            std::span<const double> values, int trials, const SimConfig& base,
                            int jobs) {
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("sweep: no algorithms given");
    if (values.empty()) throw std::invalid_argument("sweep: no sweep values given");
    if (jobs < 1) jobs = 1;

    struct Task {
        std::size_t row;
        int trial;
        SimConfig cfg;
    };
    std::vector<Task> tasks;
    std::vector<SweepRow> rows;
    for (double value : values) {
        for (Algorithm algorithm : algorithms) {
            SweepRow row;
            row.scenario_value_pct = scenario_value_pct(scenario, value, base);
            row.algorithm = algorithm;
            row.seed_base = base.seed;
            row.trials = trials;
            const std::size_t row_index = rows.size();
            rows.push_back(row);
            for (int trial = 0; trial < trials; ++trial) {
                SimConfig cfg = base;
                cfg.scenario = scenario;
                cfg.scenario_value = value;
                cfg.algorithm = algorithm;
                cfg.seed = base.seed + static_cast<std::uint64_t>(trial);
                tasks.push_back({row_index, trial, std::move(cfg)});
            }
        }
    }

    std::vector<TrialMetrics> metrics(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            metrics[i] = run_trial(tasks[i].cfg);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min<int>(jobs, static_cast<int>(tasks.size()));
        pool.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Aggregate in task order so the reduction is deterministic.
    const double n = static_cast<double>(trials);
    std::vector<double> sum_a(rows.size(), 0.0), sum_a_sq(rows.size(), 0.0);
    std::vector<double> sum_l(rows.size(), 0.0), sum_f(rows.size(), 0.0), sum_r(rows.size(), 0.0);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::size_t r = tasks[i].row;
        sum_a[r] += metrics[i].authentic_pct;
        sum_a_sq[r] += metrics[i].authentic_pct * metrics[i].authentic_pct;
        sum_l[r] += metrics[i].load_stddev;
        sum_f[r] += metrics[i].feedback;
        sum_r[r] += metrics[i].reads;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].mean_authentic_pct = sum_a[r] / n;
        const double var =
            std::max(0.0, sum_a_sq[r] / n - rows[r].mean_authentic_pct * rows[r].mean_authentic_pct);
        rows[r].stddev_authentic_pct = std::sqrt(var);
        rows[r].stderr_authentic_pct = rows[r].stddev_authentic_pct / std::sqrt(n);
        rows[r].mean_load_stddev = sum_l[r] / n;
        rows[r].mean_feedback_messages = sum_f[r] / n;
        rows[r].mean_trust_read_messages = sum_r[r] / n;
    }
    return rows;
}

int ConvergenceRow::iterations_to(double bound) const {
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace[k] < bound) return static_cast<int>(k) + 1;
    return -1;
}

TrustMatrix random_trust_matrix(Index peers, double density, double low, double high,
                                RandomEngine& rng) {
    if (peers < 2) throw std::invalid_argument("random_trust_matrix: need at least 2 peers");
    if (!(low > 0.0) || !(high >= low))
        throw std::invalid_argument("random_trust_matrix: scores must satisfy 0 < low <= high");
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("random_trust_matrix: density must lie in [0, 1]");

    TrustMatrix trust(peers);
    // A random rating cycle keeps the instance irreducible.
    std::vector<int> cycle(static_cast<std::size_t>(peers));
    for (Index i = 0; i < peers; ++i) cycle[static_cast<std::size_t>(i)] = static_cast<int>(i);
    shuffle(cycle, rng);
    for (Index i = 0; i < peers; ++i) {
        const Index rater = cycle[static_cast<std::size_t>(i)];
        const Index ratee = cycle[static_cast<std::size_t>((i + 1) % peers)];
        trust.set(rater, ratee, rng.uniform_real(low, high));
    }
    for (Index rater = 0; rater < peers; ++rater)
        for (Index ratee = 0; ratee < peers; ++ratee) {
            if (rater == ratee) continue;
            if (rng.uniform_double() < density && trust.coeff(rater, ratee) == 0.0)
                trust.set(rater, ratee, rng.uniform_real(low, high));
        }
    return trust;
}

std::vector<ConvergenceRow> convergence_study(std::span<const std::pair<int, int>> exponents,
                                              std::uint64_t seed, int iterations, int peers) {
    if (iterations < 1) throw std::invalid_argument("convergence_study: iterations must be >= 1");
    RandomEngine rng(seed);
    const TrustMatrix trust = random_trust_matrix(peers, 0.1, 1.0, 10.0, rng);

    std::vector<ConvergenceRow> rows;
    rows.reserve(exponents.size());
    for (const auto& [p, q] : exponents) {
        SolverConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.threshold = 1e-15;
        cfg.max_iterations = iterations;
        cfg.initial_value = 5.5;
        const GlobalTrustVector solved = solve_absolute_trust(trust, cfg);
        ConvergenceRow row;
        row.p = p;
        row.q = q;
        row.alpha = cfg.alpha();
        row.trace = solved.residual_trace;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace abtrust
