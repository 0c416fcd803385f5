#pragma once

#include "abtrust/baselines.hpp"
#include "abtrust/random.hpp"
#include "abtrust/trust_core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abtrust {

enum class Behavior { Good, PureMalicious, Unpredictable, Collective };

enum class SelectionMode { Max, Proportional };

enum class Algorithm { Absolute, EigenTrust, PowerTrust };

enum class Scenario { PureMalicious, Unpredictable, Collectives };

std::string to_string(Behavior b);
std::string to_string(Algorithm a);
std::string to_string(Scenario s);
std::string to_string(SelectionMode m);
Algorithm algorithm_from_string(const std::string& name);
Scenario scenario_from_string(const std::string& name);
SelectionMode selection_mode_from_string(const std::string& name);

struct PeerProfile {
    int id = 0;
    Behavior behavior = Behavior::Good;
    long long switch_transaction = 0;  // Unpredictable: global transaction at which it turns
    int group_id = -1;                 // Collective membership
    std::vector<int> owned_files;      // sorted
};

struct SimConfig {
    int peers = 100;
    int num_files = 1000;
    long long num_transactions = 10000;
    double zipf_gamma = 0.4;
    double replica_scale = 4.5;  // replicas of the least popular file, before rounding
    int ttl_initial = 3;
    int ttl_upper = 7;
    int ttl_step = 2;
    double global_ref = 5.5;
    int update_period = 200;
    double behavior_fidelity = 0.95;
    WeightConfig weights;
    SolverConfig solver;
    SelectionMode selection_mode = SelectionMode::Max;
    double beta = 1.0;
    std::uint64_t seed = 42;
    int holder_replication = 1;
    int topology_degree = 8;
    double collective_group_fraction = 0.05;

    Algorithm algorithm = Algorithm::Absolute;
    BaselineConfig baseline;
    Scenario scenario = Scenario::PureMalicious;
    double scenario_value = 0.05;  // malicious/unpredictable fraction, or group count

    /// The absolute acceptance threshold only exists on the Absolute Trust
    /// scale; ranking baselines cannot reject on an absolute reference.
    double selection_threshold() const {
        return algorithm == Algorithm::Absolute ? global_ref : 0.0;
    }

    void validate() const;
};

struct LedgerEntry {
    TransactionCounts counts;
    double local = 0.0;  // always local_trust(counts, weights)
};

using Ledger = std::map<std::pair<int, int>, LedgerEntry>;  // (rater, ratee)

struct MessageTally {
    std::uint64_t feedback_messages = 0;
    std::uint64_t trust_read_messages = 0;
    std::uint64_t hypothetical_normalized_feedback = 0;
};

struct ExperimentResult {
    long long authentic_count = 0;
    long long inauthentic_count = 0;
    long long rejected_queries = 0;
    std::vector<long long> per_peer_load;
    std::vector<std::vector<double>> residual_traces;
    int nonconverged_updates = 0;
    MessageTally messages;
    double avg_source_set = 0.0;  // mean source-set size over feedback events
    Vector final_trust;
    std::vector<Behavior> behaviors;
    SimConfig config;
};

/// Target replica count, before rounding, for the file of the given 1-based
/// popularity rank: (num_files / rank)^gamma. The least popular file lands at
/// exactly one replica.
double zipf_replica_target(int rank, int num_files, double gamma);

/// Zipf-distributed file placement; returns each peer's sorted file list.
std::vector<std::vector<int>> place_files(const SimConfig& config, RandomEngine& rng);

/// Seeded connected random regular graph; collapses to the complete graph
/// when degree >= peers - 1.
std::vector<std::vector<int>> random_regular_topology(int peers, int degree, RandomEngine& rng);

/// BFS flood up to ttl hops; responders are reached owners of the file,
/// excluding the requester, in ascending id order.
std::vector<int> issue_query(int requester, int file, int ttl,
                             const std::vector<std::vector<int>>& topology,
                             const std::vector<std::vector<int>>& owned_files);

struct Responder {
    int id = 0;
    double global_trust = 0.0;
    std::optional<double> local_trust;  // requester's own history, if any
};

struct Selection {
    bool accepted = false;
    int peer = -1;
};

/// Applies the acceptance threshold and picks a source. Mode Max takes the
/// best beta-combined score (ties to the lowest id); mode Proportional samples
/// survivors with probability proportional to global trust.
Selection select_source(std::span<const Responder> responders, const SimConfig& config,
                        RandomEngine& rng);

/// Selection as performed by a requester: a colluding collective member takes
/// an in-group responder whenever one exists (ignoring the acceptance
/// threshold); everything else goes through select_source.
Selection choose_source(std::span<const Responder> responders,
                        std::span<const PeerProfile> profiles, int requester,
                        bool collective_acting, const SimConfig& config, RandomEngine& rng);

/// Deterministic holder assignment: holder_replication distinct peers other
/// than the peer itself, stable for the whole run.
std::vector<int> trust_holders_of(int peer, const SimConfig& config);

/// Whether the peer originates queries at this point of the run. Saboteurs
/// (pure malicious, turned unpredictable) serve and rate but do not consume.
bool issues_queries(const PeerProfile& profile, long long completed_transactions);

/// Whether the source delivers an authentic file this transaction. Collective
/// members serve their own group faithfully and everyone else maliciously.
bool transact_authentic(const PeerProfile& source, const PeerProfile& requester,
                        long long completed_transactions, const SimConfig& config,
                        RandomEngine& rng);

/// Records the rater's feedback in the ledger and updates message accounting.
void give_feedback(const PeerProfile& rater, const PeerProfile& source, bool authentic,
                   long long completed_transactions, const SimConfig& config, Ledger& ledger,
                   MessageTally& tally, RandomEngine& rng);

struct UpdateOutcome {
    GlobalTrustVector trust;
    std::uint64_t trust_read_messages = 0;
};

/// One trust update round: builds the trust matrix from the ledger and runs
/// the solver warm-started from the previous vector.
UpdateOutcome update_round(const Ledger& ledger, const Eigen::Ref<const Vector>& previous,
                           const SimConfig& config);

/// Raw scores for the normalization-based baselines: max(n_g - n_b, 0).
Matrix raw_scores_from_ledger(const Ledger& ledger, int peers);

/// Scenario population: pure-malicious fraction, unpredictable fraction on top
/// of 10% pure malicious, or collective groups of collective_group_fraction
/// each; remaining peers are good.
std::vector<PeerProfile> assign_behaviors(const SimConfig& config, RandomEngine& rng);

std::vector<int> distinct_sources(const Ledger& ledger, int rater);

/// Runs one full seeded trial.
ExperimentResult run_simulation(const SimConfig& config);

}  // namespace abtrust
