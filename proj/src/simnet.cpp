#include "abtrust/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace abtrust {

std::string to_string(Behavior b) {
    switch (b) {
        case Behavior::Good: return "good";
        case Behavior::PureMalicious: return "pure_malicious";
        case Behavior::Unpredictable: return "unpredictable";
        case Behavior::Collective: return "collective";
    }
    return "unknown";
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Absolute: return "absolute";
        case Algorithm::EigenTrust: return "eigentrust";
        case Algorithm::PowerTrust: return "powertrust";
    }
    return "unknown";
}

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::PureMalicious: return "malicious";
        case Scenario::Unpredictable: return "unpredictable";
        case Scenario::Collectives: return "collective";
    }
    return "unknown";
}

std::string to_string(SelectionMode m) {
    return m == SelectionMode::Max ? "max" : "proportional";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "absolute") return Algorithm::Absolute;
    if (name == "eigentrust") return Algorithm::EigenTrust;
    if (name == "powertrust") return Algorithm::PowerTrust;
    throw std::invalid_argument("unknown algorithm: " + name);
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "malicious") return Scenario::PureMalicious;
    if (name == "unpredictable") return Scenario::Unpredictable;
    if (name == "collective" || name == "collectives") return Scenario::Collectives;
    throw std::invalid_argument("unknown scenario: " + name);
}

SelectionMode selection_mode_from_string(const std::string& name) {
    if (name == "max") return SelectionMode::Max;
    if (name == "proportional") return SelectionMode::Proportional;
    throw std::invalid_argument("unknown selection mode: " + name);
}

void SimConfig::validate() const {
    if (peers < 2) throw std::invalid_argument("SimConfig: peers must be >= 2");
    if (num_files < 1) throw std::invalid_argument("SimConfig: num_files must be >= 1");
    if (num_transactions < 1)
        throw std::invalid_argument("SimConfig: num_transactions must be >= 1");
    if (zipf_gamma < 0.0) throw std::invalid_argument("SimConfig: zipf_gamma must be >= 0");
    if (!(replica_scale >= 1.0)) throw std::invalid_argument("SimConfig: replica_scale must be >= 1");
    if (ttl_initial < 0) throw std::invalid_argument("SimConfig: ttl_initial must be >= 0");
    if (ttl_upper < ttl_initial)
        throw std::invalid_argument("SimConfig: ttl_upper must be >= ttl_initial");
    if (ttl_step < 1) throw std::invalid_argument("SimConfig: ttl_step must be >= 1");
    if (update_period < 1) throw std::invalid_argument("SimConfig: update_period must be >= 1");
    if (!(behavior_fidelity >= 0.0 && behavior_fidelity <= 1.0))
        throw std::invalid_argument("SimConfig: behavior_fidelity must lie in [0, 1]");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("SimConfig: beta must lie in [0, 1]");
    if (holder_replication < 1 || holder_replication > peers - 1)
        throw std::invalid_argument("SimConfig: holder_replication must lie in [1, peers-1]");
    if (topology_degree < 1) throw std::invalid_argument("SimConfig: topology_degree must be >= 1");
    if (!(collective_group_fraction > 0.0 && collective_group_fraction <= 1.0))
        throw std::invalid_argument("SimConfig: collective_group_fraction must lie in (0, 1]");
    if (global_ref < 0.0) throw std::invalid_argument("SimConfig: global_ref must be >= 0");
    weights.validate();
    solver.validate();
}

double zipf_replica_target(int rank, int num_files, double gamma) {
    if (rank < 1 || rank > num_files)
        throw std::invalid_argument("zipf_replica_target: rank out of range");
    return std::pow(static_cast<double>(num_files) / static_cast<double>(rank), gamma);
}

std::vector<std::vector<int>> place_files(const SimConfig& config, RandomEngine& rng) {
    std::vector<std::vector<int>> owned(static_cast<std::size_t>(config.peers));
    for (int file = 0; file < config.num_files; ++file) {
        const double target = config.replica_scale *
                              zipf_replica_target(file + 1, config.num_files, config.zipf_gamma);
        const int replicas =
            std::clamp(static_cast<int>(std::llround(target)), 1, config.peers);
        for (int peer : sample_without_replacement(config.peers, replicas, rng))
            owned[static_cast<std::size_t>(peer)].push_back(file);
    }
    for (auto& files : owned) std::sort(files.begin(), files.end());
    return owned;
}

namespace {

bool is_connected(const std::vector<std::set<int>>& adj) {
    const std::size_t n = adj.size();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    return reached == n;
}

std::vector<std::vector<int>> sorted_adjacency(const std::vector<std::set<int>>& adj) {
    std::vector<std::vector<int>> out(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
    return out;
}

}  // namespace

std::vector<std::vector<int>> random_regular_topology(int peers, int degree, RandomEngine& rng) {
    if (peers < 2) throw std::invalid_argument("random_regular_topology: need at least 2 peers");
    if (degree < 1) throw std::invalid_argument("random_regular_topology: degree must be >= 1");

    if (degree >= peers - 1) {
        std::vector<std::set<int>> adj(static_cast<std::size_t>(peers));
        for (int u = 0; u < peers; ++u)
            for (int v = 0; v < peers; ++v)
                if (u != v) adj[static_cast<std::size_t>(u)].insert(v);
        return sorted_adjacency(adj);
    }
    if ((static_cast<long long>(peers) * degree) % 2 != 0)
        throw std::invalid_argument("random_regular_topology: peers * degree must be even");

    // Stub matching with rejection of self-loops and parallel edges; the rare
    // dead end restarts the attempt. Disconnected samples are rejected too.
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(peers) * static_cast<std::size_t>(degree));
        for (int v = 0; v < peers; ++v)
            for (int k = 0; k < degree; ++k) stubs.push_back(v);
        shuffle(stubs, rng);

        std::vector<std::set<int>> adj(static_cast<std::size_t>(peers));
        bool dead_end = false;
        while (!stubs.empty() && !dead_end) {
            bool paired = false;
            const std::size_t cap = 64 + 16 * stubs.size();
            for (std::size_t tries = 0; tries < cap; ++tries) {
                const std::size_t i = static_cast<std::size_t>(rng.uniform_int(stubs.size()));
                const std::size_t j = static_cast<std::size_t>(rng.uniform_int(stubs.size()));
                if (i == j) continue;
                const int u = stubs[i];
                const int v = stubs[j];
                if (u == v || adj[static_cast<std::size_t>(u)].count(v)) continue;
                adj[static_cast<std::size_t>(u)].insert(v);
                adj[static_cast<std::size_t>(v)].insert(u);
                const std::size_t hi = std::max(i, j);
                const std::size_t lo = std::min(i, j);
                stubs[hi] = stubs.back();
                stubs.pop_back();
                stubs[lo] = stubs.back();
                stubs.pop_back();
                paired = true;
                break;
            }
            if (!paired) dead_end = true;
        }
        if (!dead_end && is_connected(adj)) return sorted_adjacency(adj);
    }
    throw std::runtime_error("random_regular_topology: failed to build a connected graph");
}

std::vector<int> issue_query(int requester, int file, int ttl,
                             const std::vector<std::vector<int>>& topology,
                             const std::vector<std::vector<int>>& owned_files) {
    const int n = static_cast<int>(topology.size());
    if (requester < 0 || requester >= n) throw std::out_of_range("issue_query: requester out of range");

    std::vector<char> reached(static_cast<std::size_t>(n), 0);
    reached[static_cast<std::size_t>(requester)] = 1;
    std::deque<std::pair<int, int>> frontier{{requester, 0}};
    while (!frontier.empty()) {
        const auto [u, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= ttl) continue;
        for (int v : topology[static_cast<std::size_t>(u)]) {
            if (!reached[static_cast<std::size_t>(v)]) {
                reached[static_cast<std::size_t>(v)] = 1;
                frontier.emplace_back(v, depth + 1);
            }
        }
    }

    std::vector<int> responders;
    for (int v = 0; v < n; ++v) {
        if (v == requester || !reached[static_cast<std::size_t>(v)]) continue;
        const auto& files = owned_files[static_cast<std::size_t>(v)];
        if (std::binary_search(files.begin(), files.end(), file)) responders.push_back(v);
    }
    return responders;
}

Selection select_source(std::span<const Responder> responders, const SimConfig& config,
                        RandomEngine& rng) {
    if (responders.empty()) return {};
    const double threshold = config.selection_threshold();

    std::vector<const Responder*> survivors;
    survivors.reserve(responders.size());
    for (const Responder& r : responders)
        if (r.global_trust >= threshold) survivors.push_back(&r);
    if (survivors.empty()) return {};

    if (config.selection_mode == SelectionMode::Max) {
        const Responder* best = nullptr;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const Responder* r : survivors) {
            const double score = r->local_trust
                                     ? combined_score(r->global_trust, *r->local_trust, config.beta)
                                     : r->global_trust;
            if (best == nullptr || score > best_score ||
                (score == best_score && r->id < best->id)) {
                best = r;
                best_score = score;
            }
        }
        return {true, best->id};
    }

    double total = 0.0;
    for (const Responder* r : survivors) total += std::max(r->global_trust, 0.0);
    if (total <= 0.0) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(survivors.size()));
        return {true, survivors[pick]->id};
    }
    const double u = rng.uniform_double() * total;
    double acc = 0.0;
    for (const Responder* r : survivors) {
        acc += std::max(r->global_trust, 0.0);
        if (u < acc) return {true, r->id};
    }
    return {true, survivors.back()->id};
}

Selection choose_source(std::span<const Responder> responders,
                        std::span<const PeerProfile> profiles, int requester,
                        bool collective_acting, const SimConfig& config, RandomEngine& rng) {
    if (collective_acting) {
        const PeerProfile& me = profiles[static_cast<std::size_t>(requester)];
        std::vector<Responder> group;
        for (const Responder& r : responders) {
            const PeerProfile& p = profiles[static_cast<std::size_t>(r.id)];
            if (p.behavior == Behavior::Collective && p.group_id == me.group_id)
                group.push_back(r);
        }
        if (!group.empty()) {
            SimConfig open = config;
            open.global_ref = 0.0;
            return select_source(group, open, rng);
        }
    }
    return select_source(responders, config, rng);
}

std::vector<int> trust_holders_of(int peer, const SimConfig& config) {
    if (config.holder_replication < 1)
        throw std::invalid_argument("trust_holders_of: holder_replication must be >= 1");
    if (config.holder_replication > config.peers - 1)
        throw std::invalid_argument("trust_holders_of: not enough peers for the replication level");
    if (peer < 0 || peer >= config.peers)
        throw std::out_of_range("trust_holders_of: peer out of range");

    std::uint64_t state = hash_mix(config.seed ^ 0x74727573746d6170ULL, static_cast<std::uint64_t>(peer));
    std::vector<char> used(static_cast<std::size_t>(config.peers), 0);
    used[static_cast<std::size_t>(peer)] = 1;
    std::vector<int> holders;
    holders.reserve(static_cast<std::size_t>(config.holder_replication));
    while (holders.size() < static_cast<std::size_t>(config.holder_replication)) {
        const int candidate =
            static_cast<int>(splitmix64(state) % static_cast<std::uint64_t>(config.peers));
        if (!used[static_cast<std::size_t>(candidate)]) {
            used[static_cast<std::size_t>(candidate)] = 1;
            holders.push_back(candidate);
        }
    }
    return holders;
}

namespace {

bool source_acts_good_by_profile(const PeerProfile& source, const PeerProfile& requester,
                                 long long completed) {
    switch (source.behavior) {
        case Behavior::Good: return true;
        case Behavior::PureMalicious: return false;
        case Behavior::Unpredictable: return completed < source.switch_transaction;
        case Behavior::Collective:
            return requester.behavior == Behavior::Collective &&
                   requester.group_id == source.group_id;
    }
    return true;
}

bool rater_profile_good(const PeerProfile& rater, long long completed) {
    switch (rater.behavior) {
        case Behavior::Good: return true;
        case Behavior::Unpredictable: return completed < rater.switch_transaction;
        default: return false;
    }
}

bool malicious_aligned(const PeerProfile& source, const PeerProfile& rater, long long completed) {
    if (source.behavior == Behavior::PureMalicious) return true;
    if (source.behavior == Behavior::Unpredictable && completed >= source.switch_transaction)
        return true;
    if (source.behavior == Behavior::Collective && rater.behavior == Behavior::Collective &&
        source.group_id == rater.group_id)
        return true;
    return false;
}

}  // namespace

bool transact_authentic(const PeerProfile& source, const PeerProfile& requester,
                        long long completed_transactions, const SimConfig& config,
                        RandomEngine& rng) {
    bool good = source_acts_good_by_profile(source, requester, completed_transactions);
    if (!rng.bernoulli(config.behavior_fidelity)) good = !good;
    return good;
}

std::vector<int> distinct_sources(const Ledger& ledger, int rater) {
    std::vector<int> out;
    for (auto it = ledger.lower_bound({rater, std::numeric_limits<int>::min()});
         it != ledger.end() && it->first.first == rater; ++it)
        out.push_back(it->first.second);
    return out;
}

void give_feedback(const PeerProfile& rater, const PeerProfile& source, bool authentic,
                   long long completed_transactions, const SimConfig& config, Ledger& ledger,
                   MessageTally& tally, RandomEngine& rng) {
    bool acting_good = rater_profile_good(rater, completed_transactions);
    if (!rng.bernoulli(config.behavior_fidelity)) acting_good = !acting_good;
    const bool positive =
        acting_good ? authentic : malicious_aligned(source, rater, completed_transactions);

    LedgerEntry& entry = ledger[{rater.id, source.id}];
    if (positive)
        ++entry.counts.n_g;
    else
        ++entry.counts.n_b;
    entry.local = local_trust(entry.counts, config.weights);

    tally.feedback_messages += 1;
    // A normalization scheme would have to resend the whole source set.
    tally.hypothetical_normalized_feedback +=
        static_cast<std::uint64_t>(distinct_sources(ledger, rater.id).size());
}

UpdateOutcome update_round(const Ledger& ledger, const Eigen::Ref<const Vector>& previous,
                           const SimConfig& config) {
    TrustMatrix trust(config.peers);
    for (const auto& [pair, entry] : ledger) trust.set(pair.first, pair.second, entry.local);
    UpdateOutcome out;
    out.trust = solve_absolute_trust(trust, config.solver, previous);
    out.trust_read_messages = static_cast<std::uint64_t>(out.trust.iterations_used) *
                              trust.entry_count() *
                              static_cast<std::uint64_t>(config.holder_replication);
    return out;
}

Matrix raw_scores_from_ledger(const Ledger& ledger, int peers) {
    Matrix raw = Matrix::Zero(peers, peers);
    for (const auto& [pair, entry] : ledger) {
        const double s = static_cast<double>(entry.counts.n_g - entry.counts.n_b);
        raw(pair.first, pair.second) = std::max(s, 0.0);
    }
    return raw;
}

std::vector<PeerProfile> assign_behaviors(const SimConfig& config, RandomEngine& rng) {
    const int n = config.peers;
    std::vector<PeerProfile> profiles(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) profiles[static_cast<std::size_t>(i)].id = i;

    switch (config.scenario) {
        case Scenario::PureMalicious: {
            const int k = std::clamp(
                static_cast<int>(std::llround(config.scenario_value * n)), 0, n);
            for (int id : sample_without_replacement(n, k, rng))
                profiles[static_cast<std::size_t>(id)].behavior = Behavior::PureMalicious;
            break;
        }
        case Scenario::Unpredictable: {
            const int k_malicious =
                std::clamp(static_cast<int>(std::llround(0.10 * n)), 0, n);
            const int k_unpredictable = std::clamp(
                static_cast<int>(std::llround(config.scenario_value * n)), 0, n - k_malicious);
            const auto ids = sample_without_replacement(n, k_malicious + k_unpredictable, rng);
            for (int i = 0; i < k_malicious; ++i)
                profiles[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])].behavior =
                    Behavior::PureMalicious;
            for (int i = k_malicious; i < k_malicious + k_unpredictable; ++i) {
                PeerProfile& p = profiles[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
                p.behavior = Behavior::Unpredictable;
                p.switch_transaction = std::llround(
                    rng.uniform_real(0.20, 0.50) * static_cast<double>(config.num_transactions));
            }
            break;
        }
        case Scenario::Collectives: {
            const int groups = std::max(0, static_cast<int>(std::llround(config.scenario_value)));
            const int group_size = std::max(
                1, static_cast<int>(std::llround(config.collective_group_fraction * n)));
            if (groups * group_size > n)
                throw std::invalid_argument("assign_behaviors: collective groups exceed peer count");
            const auto ids = sample_without_replacement(n, groups * group_size, rng);
            for (int i = 0; i < groups * group_size; ++i) {
                PeerProfile& p = profiles[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
                p.behavior = Behavior::Collective;
                p.group_id = i / group_size;
            }
            break;
        }
    }
    return profiles;
}

bool issues_queries(const PeerProfile& profile, long long completed_transactions) {
    switch (profile.behavior) {
        case Behavior::Good: return true;
        case Behavior::Collective: return true;  // colluders consume from their group
        case Behavior::Unpredictable: return completed_transactions < profile.switch_transaction;
        case Behavior::PureMalicious: return false;
    }
    return false;
}

namespace {

bool owns_file(const std::vector<std::vector<int>>& owned, int peer, int file) {
    const auto& files = owned[static_cast<std::size_t>(peer)];
    return std::binary_search(files.begin(), files.end(), file);
}

struct TrustUpdater {
    explicit TrustUpdater(const SimConfig& cfg) : config(cfg) {}

    Vector initial() const {
        if (config.algorithm == Algorithm::Absolute)
            return Vector::Constant(config.peers, config.solver.initial_value);
        return Vector::Constant(config.peers, 1.0 / static_cast<double>(config.peers));
    }

    void update(const Ledger& ledger, Vector& t, ExperimentResult& result) const {
        const std::uint64_t replication = static_cast<std::uint64_t>(config.holder_replication);
        if (config.algorithm == Algorithm::Absolute) {
            UpdateOutcome outcome = update_round(ledger, t, config);
            result.messages.trust_read_messages += outcome.trust_read_messages;
            result.residual_traces.push_back(outcome.trust.residual_trace);
            if (!outcome.trust.converged) ++result.nonconverged_updates;
            t = outcome.trust.values;
            return;
        }

        const NormalizedTrustMatrix norm =
            NormalizedTrustMatrix::from_scores(raw_scores_from_ledger(ledger, config.peers));
        const std::uint64_t nnz = norm.interaction_count();
        if (config.algorithm == Algorithm::EigenTrust) {
            const Vector p = pretrust_distribution(config.peers, config.baseline.pretrusted);
            GlobalTrustVector r = eigentrust_with(norm, config.baseline, p, t);
            result.messages.trust_read_messages +=
                static_cast<std::uint64_t>(r.iterations_used) * nnz * replication;
            result.residual_traces.push_back(r.residual_trace);
            if (!r.converged) ++result.nonconverged_updates;
            t = r.values;
        } else {
            PowerTrustResult r = powertrust_full(norm, config.baseline, t);
            result.messages.trust_read_messages +=
                static_cast<std::uint64_t>(r.ranking_phase.iterations_used + r.result.iterations_used) *
                nnz * replication;
            result.residual_traces.push_back(r.result.residual_trace);
            if (!r.ranking_phase.converged || !r.result.converged) ++result.nonconverged_updates;
            t = r.result.values;
        }
    }

    const SimConfig& config;
};

}  // namespace

ExperimentResult run_simulation(const SimConfig& config) {
    config.validate();

    RandomEngine master(config.seed);
    RandomEngine rng_behaviors = master.fork(0xBE);
    RandomEngine rng_files = master.fork(0xF1);
    RandomEngine rng_topology = master.fork(0x70);
    RandomEngine rng_run = master.fork(0x4A);

    std::vector<PeerProfile> profiles = assign_behaviors(config, rng_behaviors);
    const std::vector<std::vector<int>> owned = place_files(config, rng_files);
    for (int i = 0; i < config.peers; ++i)
        profiles[static_cast<std::size_t>(i)].owned_files = owned[static_cast<std::size_t>(i)];
    const std::vector<std::vector<int>> topology =
        random_regular_topology(config.peers, config.topology_degree, rng_topology);

    SimConfig cfg = config;
    if (cfg.baseline.pretrusted.empty()) {
        for (int i = 0; i < cfg.peers && cfg.baseline.pretrusted.size() < 3; ++i)
            if (profiles[static_cast<std::size_t>(i)].behavior == Behavior::Good)
                cfg.baseline.pretrusted.push_back(i);
        if (cfg.baseline.pretrusted.empty()) cfg.baseline.pretrusted.push_back(0);
    }

    const TrustUpdater updater(cfg);
    Vector t = updater.initial();

    ExperimentResult result;
    result.per_peer_load.assign(static_cast<std::size_t>(cfg.peers), 0);
    result.behaviors.reserve(static_cast<std::size_t>(cfg.peers));
    for (const PeerProfile& p : profiles) result.behaviors.push_back(p.behavior);

    Ledger ledger;
    long long completed = 0;
    double source_set_accum = 0.0;
    long long feedback_events = 0;

    std::vector<int> requester_pool;
    requester_pool.reserve(static_cast<std::size_t>(cfg.peers));

    for (long long slot = 1; slot <= cfg.num_transactions; ++slot) {
        // Saboteurs serve (and lie) but do not consume; the pool shifts as
        // unpredictable peers turn.
        requester_pool.clear();
        for (const PeerProfile& p : profiles)
            if (issues_queries(p, completed)) requester_pool.push_back(p.id);
        if (requester_pool.empty()) {
            ++result.rejected_queries;
            if (slot % cfg.update_period == 0) updater.update(ledger, t, result);
            continue;
        }
        const int requester = requester_pool[static_cast<std::size_t>(
            rng_run.uniform_int(requester_pool.size()))];
        const PeerProfile& requester_profile = profiles[static_cast<std::size_t>(requester)];

        int file = -1;
        for (int tries = 0; tries < 64 * cfg.num_files; ++tries) {
            const int candidate = static_cast<int>(rng_run.uniform_int(
                static_cast<std::uint64_t>(cfg.num_files)));
            if (!owns_file(owned, requester, candidate)) {
                file = candidate;
                break;
            }
        }
        if (file < 0) {  // requester owns every file; nothing to ask for
            ++result.rejected_queries;
        } else {
            bool collective_acting = false;
            if (requester_profile.behavior == Behavior::Collective)
                collective_acting = rng_run.bernoulli(cfg.behavior_fidelity);

            Selection selection;
            for (int ttl = cfg.ttl_initial;; ttl += cfg.ttl_step) {
                const std::vector<int> responder_ids =
                    issue_query(requester, file, ttl, topology, owned);
                std::vector<Responder> responders;
                responders.reserve(responder_ids.size());
                for (int id : responder_ids) {
                    Responder r{id, t[id], std::nullopt};
                    const auto it = ledger.find({requester, id});
                    if (it != ledger.end()) r.local_trust = it->second.local;
                    responders.push_back(r);
                }
                selection = choose_source(responders, profiles, requester, collective_acting, cfg,
                                          rng_run);
                if (selection.accepted || ttl >= cfg.ttl_upper) break;
            }

            if (!selection.accepted) {
                ++result.rejected_queries;
            } else {
                const PeerProfile& source = profiles[static_cast<std::size_t>(selection.peer)];
                const bool authentic =
                    transact_authentic(source, requester_profile, completed, cfg, rng_run);
                if (authentic)
                    ++result.authentic_count;
                else
                    ++result.inauthentic_count;
                ++result.per_peer_load[static_cast<std::size_t>(selection.peer)];
                give_feedback(requester_profile, source, authentic, completed, cfg, ledger,
                              result.messages, rng_run);
                ++completed;
                source_set_accum +=
                    static_cast<double>(distinct_sources(ledger, requester).size());
                ++feedback_events;
            }
        }

        if (slot % cfg.update_period == 0) updater.update(ledger, t, result);
    }

    result.avg_source_set =
        feedback_events > 0 ? source_set_accum / static_cast<double>(feedback_events) : 0.0;
    result.final_trust = std::move(t);
    result.config = cfg;
    return result;
}

}  // namespace abtrust
