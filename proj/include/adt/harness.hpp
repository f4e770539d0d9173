#ifndef ADT_HARNESS_HPP
#define ADT_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adt/bridge.hpp"
#include "adt/inference.hpp"
#include "adt/planning.hpp"

namespace adt::harness {

struct PolicySummary {
    std::size_t index = 0;
    Policy actions;
    double g = 0.0;

    bool operator==(const PolicySummary&) const = default;
};

struct StepRecord {
    std::size_t step = 0;
    bridge::GroundTruthState truth;  // state observed at this step
    ObservationBundle obs;
    Belief posterior;
    double vfe = 0.0;
    std::vector<PolicySummary> top_policies;
    std::vector<double> full_g;  // populated when BridgeConfig::full_g
    std::vector<std::size_t> action_set;
    // Step-0 marginal over action_set.
    Categorical action_posterior = Categorical::uniform(1);
    std::size_t executed_action = 0;
    std::size_t reference_action = 0;
    double delta_g = 0.0;
    // Total epistemic mass across all policies and steps of this plan;
    // exactly zero in pragmatic-only mode.
    double epistemic_mass = 0.0;

    bool operator==(const StepRecord&) const = default;
};

struct TwinTrace {
    std::vector<StepRecord> steps;
    bool failed = false;
    // Step index at which the digital failure occurs (== steps.size() when
    // failed; episodes that complete leave it unset).
    std::optional<std::size_t> failure_step;
    std::vector<std::string> factor_names;
    std::vector<std::vector<std::string>> state_labels;
    std::uint64_t seed = 0;
    std::string mode;

    bool operator==(const TwinTrace&) const = default;
};

// Delay of the twin behind the reference agent for one action type within
// one damage event; nullopt when the twin never follows.
struct DelayRecord {
    std::size_t event = 0;
    std::size_t action = 0;          // global action id (RO or MA)
    std::size_t reference_step = 0;
    std::optional<std::size_t> delay;
};

struct ClusterReport {
    std::size_t n_episodes = 0;
    std::size_t failures = 0;
    std::vector<std::size_t> failure_steps;
    std::vector<std::size_t> re_counts;  // per episode
    std::vector<std::vector<std::size_t>> ma_steps;  // per episode
    std::vector<std::optional<std::size_t>> ma_delays;  // flattened over episodes/events
    std::vector<std::optional<std::size_t>> ro_delays;
    double mean_finite_delay = 0.0;
    std::size_t max_finite_delay = 0;
    std::size_t unmatched_delays = 0;
    double mean_delta_g = 0.0;
    double wall_ms_per_step = 0.0;
    std::uint64_t seed_base = 0;
    std::string mode;
};

// Optional override of the ground-truth dynamics (used to rig degenerate
// worlds in tests). Defaults to bridge::step_ground_truth.
using WorldStepper = std::function<bridge::GroundTruthState(const bridge::GroundTruthState&,
                                                            std::size_t, Rng&)>;

// Runs one episode of the twin loop: observe, infer, plan, act, (learn),
// step the world; the ground-truth-informed reference agent runs in
// lock-step on the same world with its own stream. Fully determined by
// (config, config.seed).
TwinTrace run_episode(const bridge::BridgeConfig& config, const WorldStepper& stepper = {});

// Episodes with seeds seed_base + i, aggregated deterministically;
// `jobs` > 1 runs episodes concurrently.
ClusterReport run_cluster(const bridge::BridgeConfig& config, std::size_t n,
                          std::uint64_t seed_base, std::size_t jobs = 1);

ClusterReport summarize_cluster(const std::vector<TwinTrace>& traces,
                                const bridge::BridgeConfig& config, std::uint64_t seed_base,
                                double wall_ms_per_step);

// Collects traces as well as the report (one trace per episode).
std::vector<TwinTrace> run_cluster_traces(const bridge::BridgeConfig& config, std::size_t n,
                                          std::uint64_t seed_base, std::size_t jobs = 1);

// First-occurrence delays of the twin behind the reference per damage event.
std::vector<DelayRecord> action_delay(const TwinTrace& trace);

}  // namespace adt::harness

#endif
