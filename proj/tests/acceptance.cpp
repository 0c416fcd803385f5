// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.
#include "abtrust/experiments.hpp"
#include "abtrust/io.hpp"
#include "abtrust/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace abtrust;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d  %-22s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

int jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 2 : static_cast<int>(hw);
}

const std::vector<Algorithm> kAlgorithms{Algorithm::Absolute, Algorithm::EigenTrust,
                                         Algorithm::PowerTrust};

const SweepRow& row_at(const std::vector<SweepRow>& rows, double pct, Algorithm algorithm) {
    for (const SweepRow& r : rows)
        if (std::abs(r.scenario_value_pct - pct) < 1e-6 && r.algorithm == algorithm) return r;
    throw std::runtime_error("sweep row not found");
}

// Shared across criteria 5, 8 and 10.
std::optional<std::vector<SweepRow>> g_malicious_rows;

const std::vector<SweepRow>& malicious_rows() {
    if (!g_malicious_rows) {
        const SimConfig base;
        g_malicious_rows = sweep(Scenario::PureMalicious, kAlgorithms,
                                 default_sweep_values(Scenario::PureMalicious), 10, base, jobs());
    }
    return *g_malicious_rows;
}

void criterion_1() {
    const WeightConfig w{10.0, 1.0};
    const double a = local_trust({20, 40, 40}, w);
    const double b = local_trust({30, 10, 60}, w);
    const bool ok = std::abs(a - 4.6) < 1e-12 && std::abs(b - 4.15) < 1e-12;
    report(1, "local-trust exactness", ok, fmt("T_iA=%.15f T_iB=%.15f", a, b));
}

void criterion_2() {
    TrustMatrix m(2);
    m.set(0, 1, 8.0);
    m.set(1, 0, 6.0);
    SolverConfig cfg;
    cfg.p = 1;
    cfg.q = 1;
    cfg.threshold = 1e-12;
    cfg.max_iterations = 1000;
    const double t0 = std::cbrt(288.0);
    const double t1 = std::sqrt(8.0 * t0);

    RandomEngine rng(2024);
    double worst = 0.0;
    bool all_converged = true;
    for (int k = 0; k < 100; ++k) {
        Vector start(2);
        start << rng.uniform_real(0.01, 20.0), rng.uniform_real(0.01, 20.0);
        const GlobalTrustVector r = solve_absolute_trust(m, cfg, start);
        all_converged = all_converged && r.converged;
        worst = std::max({worst, std::abs(r.values[0] - t0), std::abs(r.values[1] - t1)});
    }
    const bool ok = all_converged && worst < 1e-9;
    report(2, "closed-form fixed point", ok,
           fmt("max |error| over 100 starts = %.2e (tol 1e-9)", worst));
}

void criterion_3() {
    const std::vector<std::pair<int, int>> exponents{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}};
    const auto rows = convergence_study(exponents, 42, 20);

    const int third = rows[2].iterations_to(1e-3);
    bool ok = third > 0 && third <= 7;
    bool monotone = true;
    for (const auto& row : rows)
        for (std::size_t k = 0; k + 1 < row.trace.size(); ++k)
            if (row.trace[k] > 1e-12 && !(row.trace[k + 1] < row.trace[k])) monotone = false;
    ok = ok && monotone;
    bool ordered = true;
    int previous = rows[0].iterations_to(1e-4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int current = rows[i].iterations_to(1e-4);
        if (current < 1 || current > previous) ordered = false;
        previous = current;
    }
    ok = ok && ordered;
    report(3, "convergence speed", ok,
           fmt("alpha=1/3 hits 1e-3 at iter %d (<=7); monotone=%d; alpha-ordered=%d", third,
               monotone ? 1 : 0, ordered ? 1 : 0));
}

void criterion_4() {
    SolverConfig cfg;
    cfg.threshold = 1e-9;
    cfg.max_iterations = 300;
    const double factor = cfg.alpha() / (1.0 + cfg.alpha());
    const int sizes[3] = {10, 50, 100};
    double worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
        RandomEngine rng(1000 + static_cast<std::uint64_t>(i));
        const TrustMatrix m = random_trust_matrix(sizes[i % 3], 0.2, 1.0, 10.0, rng);
        const GlobalTrustVector r = solve_absolute_trust(m, cfg);
        const auto& tr = r.residual_trace;
        if (!r.converged || tr.size() < 5) {
            report(4, "contraction factor", false, "instance failed to converge");
            return;
        }
        const std::size_t k = tr.size();
        const double geo = std::cbrt((tr[k - 2] / tr[k - 3]) * (tr[k - 3] / tr[k - 4]) *
                                     (tr[k - 4] / tr[k - 5]));
        worst_rel = std::max(worst_rel, std::abs(geo - factor) / factor);
    }
    report(4, "contraction factor", worst_rel <= 0.30,
           fmt("worst deviation from alpha/(1+alpha)=%.3f over 20 instances: %.1f%% (tol 30%%)",
               factor, 100.0 * worst_rel));
}

void criterion_5() {
    const auto& rows = malicious_rows();
    const double at45 = row_at(rows, 45, Algorithm::Absolute).mean_authentic_pct;
    const double et45 = row_at(rows, 45, Algorithm::EigenTrust).mean_authentic_pct;
    const double pt45 = row_at(rows, 45, Algorithm::PowerTrust).mean_authentic_pct;

    bool ordering = true;
    for (double pct = 5; pct <= 45; pct += 5) {
        const double a = row_at(rows, pct, Algorithm::Absolute).mean_authentic_pct;
        if (a < row_at(rows, pct, Algorithm::EigenTrust).mean_authentic_pct) ordering = false;
        if (a < row_at(rows, pct, Algorithm::PowerTrust).mean_authentic_pct) ordering = false;
    }
    bool gap = true;
    for (double pct : {40.0, 45.0}) {
        const double a = row_at(rows, pct, Algorithm::Absolute).mean_authentic_pct;
        if (a - row_at(rows, pct, Algorithm::EigenTrust).mean_authentic_pct < 2.0) gap = false;
        if (a - row_at(rows, pct, Algorithm::PowerTrust).mean_authentic_pct < 2.0) gap = false;
    }
    const bool at_band = std::abs(at45 - 91.6) <= 3.0;
    const bool baseline_band = std::abs(et45 - 87.52) <= 4.0 && std::abs(pt45 - 87.5) <= 4.0;
    const bool ok = at_band && ordering && gap && baseline_band;
    report(5, "pure-malicious sweep", ok,
           fmt("AT@45=%.2f (91.6+-3) ET@45=%.2f PT@45=%.2f (+-4); ordering=%d gap>=2=%d", at45,
               et45, pt45, ordering ? 1 : 0, gap ? 1 : 0));
}

void criterion_6() {
    const SimConfig base;
    const auto rows = sweep(Scenario::Unpredictable, kAlgorithms,
                            default_sweep_values(Scenario::Unpredictable), 10, base, jobs());
    const double at35 = row_at(rows, 35, Algorithm::Absolute).mean_authentic_pct;
    bool ordering = true;
    for (double pct = 5; pct <= 35; pct += 5) {
        const double a = row_at(rows, pct, Algorithm::Absolute).mean_authentic_pct;
        if (a < row_at(rows, pct, Algorithm::EigenTrust).mean_authentic_pct) ordering = false;
        if (a < row_at(rows, pct, Algorithm::PowerTrust).mean_authentic_pct) ordering = false;
    }
    const double pt_drop = row_at(rows, 25, Algorithm::PowerTrust).mean_authentic_pct -
                           row_at(rows, 35, Algorithm::PowerTrust).mean_authentic_pct;
    const double et_drop = row_at(rows, 25, Algorithm::EigenTrust).mean_authentic_pct -
                           row_at(rows, 35, Algorithm::EigenTrust).mean_authentic_pct;
    const bool ok = std::abs(at35 - 89.3) <= 3.0 && ordering && pt_drop > et_drop;
    report(6, "unpredictable sweep", ok,
           fmt("AT@35=%.2f (89.3+-3); ordering=%d; PT drop 25->35 %.2f > ET %.2f = %d", at35,
               ordering ? 1 : 0, pt_drop, et_drop, pt_drop > et_drop ? 1 : 0));
}

void criterion_7() {
    const SimConfig base;
    const auto rows = sweep(Scenario::Collectives, kAlgorithms,
                            default_sweep_values(Scenario::Collectives), 10, base, jobs());
    const double at30 = row_at(rows, 30, Algorithm::Absolute).mean_authentic_pct;
    bool ordering = true;
    for (double pct = 5; pct <= 30; pct += 5) {
        const double a = row_at(rows, pct, Algorithm::Absolute).mean_authentic_pct;
        if (a < row_at(rows, pct, Algorithm::EigenTrust).mean_authentic_pct) ordering = false;
        if (a < row_at(rows, pct, Algorithm::PowerTrust).mean_authentic_pct) ordering = false;
    }
    const bool ok = std::abs(at30 - 91.1) <= 3.0 && ordering;
    report(7, "collectives sweep", ok,
           fmt("AT@30=%.2f (91.1+-3); ordering=%d", at30, ordering ? 1 : 0));
}

void criterion_8() {
    const auto& rows = malicious_rows();
    const double at5 = row_at(rows, 5, Algorithm::Absolute).mean_load_stddev;
    const double et5 = row_at(rows, 5, Algorithm::EigenTrust).mean_load_stddev;
    bool below = true;
    for (double pct : {5.0, 10.0, 15.0}) {
        const double a = row_at(rows, pct, Algorithm::Absolute).mean_load_stddev;
        if (!(a < row_at(rows, pct, Algorithm::EigenTrust).mean_load_stddev &&
              a < row_at(rows, pct, Algorithm::PowerTrust).mean_load_stddev))
            below = false;
    }
    const bool bands = std::abs(at5 - 118.0) <= 0.20 * 118.0 && std::abs(et5 - 149.0) <= 0.20 * 149.0;
    const bool ok = bands && below;
    report(8, "load balance", ok,
           fmt("AT@5 load=%.1f (118+-20%%) ET@5=%.1f (149+-20%%); AT below both 5-15%%=%d", at5,
               et5, below ? 1 : 0));
}

void criterion_9() {
    SimConfig cfg;
    cfg.scenario = Scenario::PureMalicious;
    cfg.scenario_value = 0.10;
    const ExperimentResult r = run_simulation(cfg);
    const double ratio = static_cast<double>(r.messages.hypothetical_normalized_feedback) /
                         static_cast<double>(r.messages.feedback_messages);
    const double rel = std::abs(ratio - r.avg_source_set) / r.avg_source_set;
    const bool ok = rel <= 0.05 && r.avg_source_set > 1.0;
    report(9, "message saving", ok,
           fmt("normalized/actual=%.3f vs avg sources=%.3f (diff %.2f%%, tol 5%%); saving/update=%.3f",
               ratio, r.avg_source_set, 100.0 * rel, ratio - 1.0));
}

void criterion_10() {
    const std::string first = results_csv(malicious_rows());
    const SimConfig base;
    const auto rerun = sweep(Scenario::PureMalicious, kAlgorithms,
                             default_sweep_values(Scenario::PureMalicious), 10, base, jobs());
    const std::string second = results_csv(rerun);
    const bool ok = first == second;
    report(10, "determinism", ok,
           fmt("two full sweeps -> identical results.csv bytes = %d (%zu bytes)", ok ? 1 : 0,
               first.size()));
}

void criterion_11() {
    RandomEngine rng(777);
    SolverConfig solver;
    const WeightConfig weights{10.0, 1.0};
    bool ok = true;
    std::string failed;

    // Bound preservation: every iterate inside [w_b, w_g].
    for (int c = 0; c < 1000 && ok; ++c) {
        const Index n = 4 + static_cast<Index>(rng.uniform_int(9));
        const TrustMatrix m = random_trust_matrix(n, 0.3, weights.w_b, weights.w_g, rng);
        Vector t = Vector::Constant(n, solver.initial_value);
        for (int k = 0; k < 8; ++k) {
            t = absolute_trust_step(m, t, solver);
            if (t.minCoeff() < weights.w_b - 1e-9 || t.maxCoeff() > weights.w_g + 1e-9) {
                ok = false;
                failed = "bound preservation";
            }
        }
    }

    // set_trust and the weighted-average term stay inside their brackets.
    for (int c = 0; c < 1000 && ok; ++c) {
        std::vector<double> members(1 + rng.uniform_int(8));
        double lo = 1e300, hi = 0;
        for (double& v : members) {
            v = rng.uniform_real(0.05, 12.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double s = set_trust(members);
        if (s < lo - 1e-12 || s > hi + 1e-12) {
            ok = false;
            failed = "set_trust bracket";
        }
        double sum_w = 0, sum_t = 0, t_lo = 1e300, t_hi = 0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const double score = rng.uniform_real(weights.w_b, weights.w_g);
            sum_w += score * members[i];
            sum_t += members[i];
            t_lo = std::min(t_lo, score);
            t_hi = std::max(t_hi, score);
        }
        const double wavg = sum_w / sum_t;
        if (wavg < t_lo - 1e-12 || wavg > t_hi + 1e-12) {
            ok = false;
            failed = "weighted-mean bracket";
        }
    }

    // bias_evaluation strictly increasing in its evaluation argument.
    for (int c = 0; c < 1000 && ok; ++c) {
        const double w = rng.uniform_real(0.5, 10.0);
        const int p = 1 + static_cast<int>(rng.uniform_int(5));
        const int q = 1 + static_cast<int>(rng.uniform_int(5));
        double a = rng.uniform_real(0.1, 10.0);
        double b = a + rng.uniform_real(1e-6, 5.0);
        if (!(bias_evaluation(a, w, p, q) < bias_evaluation(b, w, p, q))) {
            ok = false;
            failed = "bias monotonicity";
        }
    }

    // Local trust range.
    for (int c = 0; c < 1000 && ok; ++c) {
        TransactionCounts counts{static_cast<std::int64_t>(rng.uniform_int(40)),
                                 static_cast<std::int64_t>(rng.uniform_int(40)),
                                 static_cast<std::int64_t>(rng.uniform_int(40))};
        if (counts.n_t() == 0) counts.n_g = 1;
        const double t = local_trust(counts, weights);
        if (t < weights.w_b - 1e-12 || t > weights.w_g + 1e-12) {
            ok = false;
            failed = "local trust range";
        }
    }

    // TTL monotonicity on a seeded overlay.
    {
        RandomEngine topo_rng(31);
        const auto adj = random_regular_topology(60, 4, topo_rng);
        std::vector<std::vector<int>> owned(60);
        for (int peer = 0; peer < 60; ++peer)
            if (topo_rng.uniform_double() < 0.3) owned[static_cast<std::size_t>(peer)] = {0};
        int checked = 0;
        for (int requester = 0; requester < 60 && ok; ++requester)
            for (int ttl = 0; ttl < 6 && ok; ++ttl) {
                const auto small = issue_query(requester, 0, ttl, adj, owned);
                const auto large = issue_query(requester, 0, ttl + 1, adj, owned);
                if (!std::includes(large.begin(), large.end(), small.begin(), small.end())) {
                    ok = false;
                    failed = "TTL monotonicity";
                }
                ++checked;
            }
        if (ok && checked < 360) {
            ok = false;
            failed = "TTL case count";
        }
    }

    // Ledger consistency under a feedback storm.
    {
        SimConfig cfg;
        cfg.behavior_fidelity = 0.9;
        std::vector<PeerProfile> profiles(10);
        for (int i = 0; i < 10; ++i) {
            profiles[static_cast<std::size_t>(i)].id = i;
            profiles[static_cast<std::size_t>(i)].behavior =
                i % 3 == 0 ? Behavior::PureMalicious : Behavior::Good;
        }
        Ledger ledger;
        MessageTally tally;
        for (int k = 0; k < 2000 && ok; ++k) {
            const int rater = static_cast<int>(rng.uniform_int(10));
            int source = static_cast<int>(rng.uniform_int(10));
            if (source == rater) source = (source + 1) % 10;
            give_feedback(profiles[static_cast<std::size_t>(rater)],
                          profiles[static_cast<std::size_t>(source)], rng.bernoulli(0.8), k, cfg,
                          ledger, tally, rng);
        }
        for (const auto& [pair, entry] : ledger)
            if (std::abs(entry.local - local_trust(entry.counts, cfg.weights)) > 1e-12) {
                ok = false;
                failed = "ledger consistency";
            }
    }

    report(11, "property suites", ok,
           ok ? "bounds, brackets, monotonicity, ranges, TTL, ledger: >=1000 cases each"
              : "failed: " + failed);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto enabled = [&wanted](int id) { return wanted.empty() || wanted.count(id) > 0; };

    if (enabled(1)) criterion_1();
    if (enabled(2)) criterion_2();
    if (enabled(3)) criterion_3();
    if (enabled(4)) criterion_4();
    if (enabled(5)) criterion_5();
    if (enabled(6)) criterion_6();
    if (enabled(7)) criterion_7();
    if (enabled(8)) criterion_8();
    if (enabled(9)) criterion_9();
    if (enabled(10)) criterion_10();
    if (enabled(11)) criterion_11();

    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
