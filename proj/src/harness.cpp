#include "adt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "adt/errors.hpp"
#include "adt/learning.hpp"

namespace adt::harness {

using bridge::BridgeConfig;
using bridge::GroundTruthState;
using bridge::Mode;

namespace {

std::vector<std::size_t> available_actions(const BridgeConfig& config) {
    std::vector<std::size_t> actions{bridge::DN, bridge::MA, bridge::RO};
    if (config.re_available()) actions.push_back(bridge::RE);
    return actions;
}

PlanConfig make_plan_config(const BridgeConfig& config) {
    PlanConfig pc;
    pc.horizon = config.horizon;
    pc.gamma = config.gamma;
    pc.use_epistemic = config.mode != Mode::PragmaticOnly;
    pc.use_param_novelty = false;
    pc.actions = available_actions(config);
    return pc;
}

std::vector<PolicySummary> top_policies(const PlanResult& plan_result, std::size_t k) {
    std::vector<std::size_t> order(plan_result.G.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return plan_result.G[a] < plan_result.G[b];
    });
    std::vector<PolicySummary> out;
    const std::size_t count = std::min(k, order.size());
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t p = order[i];
        out.push_back({p, plan_result.evaluations[p].policy, plan_result.G[p]});
    }
    return out;
}

double epistemic_mass(const PlanResult& plan_result) {
    double mass = 0.0;
    for (const auto& ev : plan_result.evaluations)
        for (double e : ev.epistemic) mass += std::abs(e);
    return mass;
}

// One agent's per-step state: its model, rolling posterior and last action.
struct AgentState {
    GenerativeModel model;
    std::optional<Belief> posterior;       // previous step's posterior
    std::size_t prev_action = bridge::DN;  // convention: DN before t = 0
};

}  // namespace

TwinTrace run_episode(const BridgeConfig& config, const WorldStepper& stepper) {
    bridge::check_config(config);
    const WorldStepper step_world =
        stepper ? stepper
                : WorldStepper([](const GroundTruthState& s, std::size_t a, Rng& r) {
                      return bridge::step_ground_truth(s, a, r);
                  });

    Rng root(config.seed);
    Rng world_rng = root.split();
    Rng twin_select_rng = root.split();
    Rng ref_select_rng = root.split();
    bridge::BridgeWorld world = bridge::build_bridge_world(config, root);

    AgentState twin{world.model, std::nullopt, bridge::DN};
    AgentState ref{bridge::build_reference_model(world.model), std::nullopt, bridge::DN};

    const PlanConfig plan_config = make_plan_config(config);
    LearningConfig learn_config;
    learn_config.learn_B = config.mode == Mode::MixedLearning;
    learn_config.eta_B = config.eta_b;

    TwinTrace trace;
    trace.seed = config.seed;
    trace.mode = bridge::mode_name(config.mode);
    trace.state_labels = bridge::factor_state_labels();
    for (const auto& f : world.model.factors) trace.factor_names.push_back(f.name);

    GroundTruthState truth;

    for (std::size_t t = 0; t < config.episode_length; ++t) {
        StepRecord rec;
        rec.step = t;
        rec.truth = truth;

        // Twin: observe through the world channels, infer, plan. Before the
        // first action there is no action echo, so that modality is missing
        // at t = 0.
        rec.obs = bridge::emit_observation(truth, twin.prev_action, world.channel_epistemic,
                                           world.channel_nonepistemic, world_rng);
        if (t == 0) rec.obs.observed[1] = std::nullopt;
        const Belief twin_prior = twin.posterior
                                      ? propagate(twin.model, *twin.posterior, twin.prev_action)
                                      : twin.model.initial_belief();
        const InferenceResult twin_inf =
            infer_state(twin.model, twin_prior, rec.obs, config.inference_tol,
                        config.max_inference_iters);
        const PlanResult twin_plan =
            plan(twin.model, twin_inf.posterior, plan_config, twin_select_rng);

        // Reference agent: Dirac class evidence on the true state, own echo.
        ObservationBundle ref_obs{{bridge::discretize(truth), ref.prev_action}};
        if (t == 0) ref_obs.observed[1] = std::nullopt;
        const Belief ref_prior = ref.posterior
                                     ? propagate(ref.model, *ref.posterior, ref.prev_action)
                                     : ref.model.initial_belief();
        const InferenceResult ref_inf = infer_state(ref.model, ref_prior, ref_obs,
                                                    config.inference_tol,
                                                    config.max_inference_iters);
        const PlanResult ref_plan = plan(ref.model, ref_inf.posterior, plan_config, ref_select_rng);

        rec.posterior = twin_inf.posterior;
        rec.vfe = twin_inf.vfe;
        rec.top_policies = top_policies(twin_plan, config.top_k);
        if (config.full_g) rec.full_g = twin_plan.G;
        rec.action_set = twin_plan.action_set;
        rec.action_posterior = twin_plan.action_posterior[0];
        rec.executed_action = twin_plan.selected_action;
        rec.reference_action = ref_plan.selected_action;
        rec.delta_g = bridge::delta_G(twin_plan.G, ref_plan.G);
        rec.epistemic_mass = epistemic_mass(twin_plan);

        // Learning uses the transition evidence (previous posterior, previous
        // action) after action selection.
        if (config.mode == Mode::MixedLearning)
            twin.model = learn(twin.model, rec.obs, twin_inf.posterior, twin.posterior,
                               twin.posterior ? std::optional<std::size_t>(twin.prev_action)
                                              : std::nullopt,
                               learn_config);

        twin.posterior = twin_inf.posterior;
        ref.posterior = ref_inf.posterior;

        truth = step_world(truth, twin_plan.selected_action, world_rng);
        twin.prev_action = twin_plan.selected_action;
        ref.prev_action = ref_plan.selected_action;

        trace.steps.push_back(std::move(rec));

        if (truth.failed()) {
            trace.failed = true;
            trace.failure_step = trace.steps.size();
            break;
        }
    }
    return trace;
}

std::vector<DelayRecord> action_delay(const TwinTrace& trace) {
    // Damage events are delimited by reference MA actions or by ground-truth
    // healing (y returning to 0).
    std::vector<std::size_t> boundaries;  // first step of each event
    boundaries.push_back(0);
    for (std::size_t t = 0; t + 1 < trace.steps.size(); ++t) {
        const bool ref_ma = trace.steps[t].reference_action == bridge::MA;
        const bool healed = trace.steps[t].truth.y != 0 && trace.steps[t + 1].truth.y == 0;
        if (ref_ma || healed) boundaries.push_back(t + 1);
    }

    std::vector<DelayRecord> out;
    for (std::size_t e = 0; e < boundaries.size(); ++e) {
        const std::size_t begin = boundaries[e];
        const std::size_t end = e + 1 < boundaries.size() ? boundaries[e + 1] : trace.steps.size();
        for (std::size_t action : {static_cast<std::size_t>(bridge::RO),
                                   static_cast<std::size_t>(bridge::MA)}) {
            std::optional<std::size_t> ref_step;
            for (std::size_t t = begin; t < end; ++t)
                if (trace.steps[t].reference_action == action) {
                    ref_step = t;
                    break;
                }
            if (!ref_step) continue;
            DelayRecord rec;
            rec.event = e;
            rec.action = action;
            rec.reference_step = *ref_step;
            for (std::size_t t = *ref_step; t < trace.steps.size(); ++t)
                if (trace.steps[t].executed_action == action) {
                    rec.delay = t - *ref_step;
                    break;
                }
            out.push_back(rec);
        }
    }
    return out;
}

ClusterReport summarize_cluster(const std::vector<TwinTrace>& traces,
                                const BridgeConfig& config, std::uint64_t seed_base,
                                double wall_ms_per_step) {
    ClusterReport report;
    report.n_episodes = traces.size();
    report.seed_base = seed_base;
    report.mode = bridge::mode_name(config.mode);
    report.wall_ms_per_step = wall_ms_per_step;

    double dg_sum = 0.0;
    std::size_t dg_count = 0;
    double delay_sum = 0.0;
    std::size_t delay_count = 0;

    for (const auto& trace : traces) {
        if (trace.failed) {
            ++report.failures;
            report.failure_steps.push_back(trace.failure_step.value_or(trace.steps.size()));
        }
        std::size_t re = 0;
        std::vector<std::size_t> ma;
        for (const auto& step : trace.steps) {
            if (step.executed_action == bridge::RE) ++re;
            if (step.executed_action == bridge::MA) ma.push_back(step.step);
            dg_sum += step.delta_g;
            ++dg_count;
        }
        report.re_counts.push_back(re);
        report.ma_steps.push_back(std::move(ma));

        for (const auto& rec : action_delay(trace)) {
            auto& sink = rec.action == bridge::MA ? report.ma_delays : report.ro_delays;
            sink.push_back(rec.delay);
            if (rec.delay) {
                delay_sum += static_cast<double>(*rec.delay);
                ++delay_count;
                report.max_finite_delay = std::max(report.max_finite_delay, *rec.delay);
            } else {
                ++report.unmatched_delays;
            }
        }
    }
    report.mean_delta_g = dg_count ? dg_sum / static_cast<double>(dg_count) : 0.0;
    report.mean_finite_delay = delay_count ? delay_sum / static_cast<double>(delay_count) : 0.0;
    return report;
}

std::vector<TwinTrace> run_cluster_traces(const BridgeConfig& config, std::size_t n,
                                          std::uint64_t seed_base, std::size_t jobs) {
    if (n < 1) throw InvalidArgument("cluster needs at least one episode");
    std::vector<TwinTrace> traces(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            BridgeConfig ec = config;
            ec.seed = seed_base + i;
            traces[i] = run_episode(ec);
        }
        return traces;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                BridgeConfig ec = config;
                ec.seed = seed_base + i;
                traces[i] = run_episode(ec);
            }
        });
    for (auto& th : pool) th.join();
    return traces;
}

ClusterReport run_cluster(const BridgeConfig& config, std::size_t n, std::uint64_t seed_base,
                          std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<TwinTrace> traces = run_cluster_traces(config, n, seed_base, jobs);
    const auto stop = std::chrono::steady_clock::now();

    std::size_t total_steps = 0;
    for (const auto& t : traces) total_steps += t.steps.size();
    const double wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
            .count();
    return summarize_cluster(traces, config, seed_base,
                             total_steps ? wall_ms / static_cast<double>(total_steps) : 0.0);
}

}  // namespace adt::harness
