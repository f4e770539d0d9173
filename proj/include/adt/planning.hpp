#ifndef ADT_PLANNING_HPP
#define ADT_PLANNING_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "adt/generative_model.hpp"
#include "adt/rng.hpp"

namespace adt {

// A policy is a fixed-length sequence of global action indices.
using Policy = std::vector<std::size_t>;

enum class SelectionMode { Argmax, Sample };

struct PlanConfig {
    std::size_t horizon = 4;
    double gamma = 16.0;
    bool use_epistemic = true;       // false: pragmatic-only scoring
    bool use_param_novelty = false;  // off by default
    std::vector<std::size_t> actions;  // available global actions; empty = all
    std::size_t policy_cap = 1000000;
    SelectionMode selection = SelectionMode::Argmax;
    std::optional<std::vector<double>> habit_prior;  // over policies; nullopt = uniform
    std::optional<std::vector<double>> policy_vfe;   // F^pi hook; nullopt = zero
};

// Per-policy rollout record with per-step value decomposition.
// G = sum_t (-epistemic_t - pragmatic_t - param_novelty_t).
struct PolicyEvaluation {
    Policy policy;
    std::vector<Belief> state_pred;                    // one per horizon step
    std::vector<std::vector<Categorical>> obs_pred;    // [step][modality]
    std::vector<double> epistemic;
    std::vector<double> pragmatic;
    std::vector<double> param_novelty;
    double G = 0.0;
};

struct PlanResult {
    std::vector<std::size_t> action_set;  // global ids the posteriors range over
    std::vector<PolicyEvaluation> evaluations;  // in enumeration order
    std::vector<double> G;                      // size P
    Categorical policy_posterior = Categorical::uniform(1);
    std::vector<Categorical> action_posterior;  // per step, over action_set
    std::size_t selected_action = 0;            // global id
};

// All |actions|^horizon policies in lexicographic order (first step most
// significant). Throws HorizonOverflow past the cap.
std::vector<Policy> enumerate_policies(const std::vector<std::size_t>& actions,
                                       std::size_t horizon, std::size_t cap = 1000000);

// state_pred[0] = propagate(posterior, policy[0]); obs_pred[k][m] follows
// each predicted state. Scoring starts at the first predicted step.
void rollout(const GenerativeModel& model, const Belief& posterior, const Policy& policy,
             std::vector<Belief>& state_pred, std::vector<std::vector<Categorical>>& obs_pred);

// Sum over modalities of the state-observation mutual information
// H(obs_pred^m) - E_predicted[H(A^m[. | d])]; nonnegative up to roundoff.
double epistemic_value(const GenerativeModel& model, const Belief& predicted,
                       const std::vector<Categorical>& obs_pred);

// sum_m sum_o obs_pred^m[o] * ln softmax(c^m)[o].
double pragmatic_value(const GenerativeModel& model, const std::vector<Categorical>& obs_pred);

// Expected Dirichlet information gain over A's concentration parameters:
// the pseudo-count correction 0.5*(1/conc - 1/colsum) contracted against the
// predicted observation/state densities. Requires Dirichlet shadows on A.
double param_novelty(const GenerativeModel& model, const Belief& predicted,
                     const std::vector<Categorical>& obs_pred);

std::vector<PolicyEvaluation> score_policies(const GenerativeModel& model,
                                             const Belief& posterior,
                                             const std::vector<Policy>& policies,
                                             const PlanConfig& config);

// sigma(ln habit - gamma * G - F_pi). Habit entries may be zero.
Categorical policy_posterior(const std::vector<double>& G,
                             const std::optional<std::vector<double>>& habit_prior,
                             const std::optional<std::vector<double>>& policy_vfe, double gamma);

// Marginal over policies of the action taken at `step`, over `action_set`.
Categorical action_posterior(const Categorical& policy_post, const std::vector<Policy>& policies,
                             std::size_t step, const std::vector<std::size_t>& action_set);

// Projects a global-action posterior onto one factor's control space.
Categorical factor_action_posterior(const GenerativeModel& model, const Categorical& action_post,
                                    const std::vector<std::size_t>& action_set,
                                    std::size_t factor);

// Argmax (lexicographically-first tie-break) or a draw from the posterior.
// Returns an index into the support of `action_post`.
std::size_t select_action(const Categorical& action_post, SelectionMode mode, Rng& rng);

struct PredictiveSummary {
    std::vector<Belief> state;            // per step, policy-averaged
    std::vector<Categorical> action;      // per step, over the plan's action set
};

PredictiveSummary predictive_summary(const std::vector<PolicyEvaluation>& evaluations,
                                     const Categorical& policy_post,
                                     const std::vector<std::size_t>& action_set);

// Full planning step: enumerate, score, form posteriors, select.
PlanResult plan(const GenerativeModel& model, const Belief& posterior, const PlanConfig& config,
                Rng& rng);

}  // namespace adt

#endif
