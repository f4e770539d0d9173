#include "adt/planning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adt/errors.hpp"

namespace adt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-plan caches that depend only on the model: column entropies of each
// likelihood table and the log preference distributions.
struct ScoringContext {
    std::vector<std::vector<double>> column_entropy;  // [modality][parent config]
    std::vector<std::vector<double>> log_pref;        // [modality][outcome]
    std::vector<Tensor> novelty_w;                    // [modality], empty if unused

    ScoringContext(const GenerativeModel& m, bool with_novelty) {
        column_entropy.reserve(m.A.size());
        log_pref.reserve(m.A.size());
        for (std::size_t mod = 0; mod < m.A.size(); ++mod) {
            const Tensor& a = m.A[mod].tensor();
            const std::size_t n = a.shape()[0];
            const std::size_t cols = a.num_columns();
            std::vector<double> h(cols, 0.0);
            for (std::size_t c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = a.column_entry(i, c);
                    if (v > 0.0) acc -= v * std::log(v);
                }
                h[c] = acc;
            }
            column_entropy.push_back(std::move(h));

            const Categorical pref = softmax(m.c[mod], 1.0);
            std::vector<double> lp(pref.size());
            for (std::size_t o = 0; o < pref.size(); ++o) lp[o] = std::log(pref[o]);
            log_pref.push_back(std::move(lp));
        }
        if (with_novelty) {
            novelty_w.reserve(m.A.size());
            for (std::size_t mod = 0; mod < m.A.size(); ++mod) {
                if (!m.dirichlet_a[mod]) {
                    novelty_w.emplace_back();
                    continue;
                }
                const Tensor& conc = m.dirichlet_a[mod]->conc();
                Tensor w(conc.shape());
                const std::size_t n = conc.shape()[0];
                const std::size_t cols = conc.num_columns();
                for (std::size_t c = 0; c < cols; ++c) {
                    double colsum = 0.0;
                    for (std::size_t i = 0; i < n; ++i) colsum += conc.column_entry(i, c);
                    for (std::size_t i = 0; i < n; ++i)
                        w.column_entry(i, c) =
                            0.5 * (1.0 / conc.column_entry(i, c) - 1.0 / colsum);
                }
                novelty_w.push_back(std::move(w));
            }
        }
    }
};

std::vector<double> joint_weights(const Belief& b) {
    std::vector<std::vector<double>> probs;
    probs.reserve(b.factors.size());
    for (const auto& f : b.factors) probs.push_back(f.probs());
    return outer_product(probs).data();
}

double epistemic_value_with_ctx(const GenerativeModel& model, const ScoringContext& ctx,
                                const Belief& predicted,
                                const std::vector<Categorical>& obs_pred) {
    const std::vector<double> w = joint_weights(predicted);
    double total = 0.0;
    for (std::size_t mod = 0; mod < model.A.size(); ++mod) {
        double cond = 0.0;
        const auto& h = ctx.column_entropy[mod];
        for (std::size_t c = 0; c < w.size(); ++c)
            if (w[c] > 0.0) cond += w[c] * h[c];
        total += entropy(obs_pred[mod]) - cond;
    }
    return total;
}

double pragmatic_value_with_ctx(const ScoringContext& ctx,
                                const std::vector<Categorical>& obs_pred) {
    double total = 0.0;
    for (std::size_t mod = 0; mod < obs_pred.size(); ++mod) {
        const auto& lp = ctx.log_pref[mod];
        for (std::size_t o = 0; o < obs_pred[mod].size(); ++o)
            total += obs_pred[mod][o] * lp[o];
    }
    return total;
}

double param_novelty_with_ctx(const GenerativeModel& model, const ScoringContext& ctx,
                              const Belief& predicted,
                              const std::vector<Categorical>& obs_pred) {
    const std::vector<double> w = joint_weights(predicted);
    double total = 0.0;
    for (std::size_t mod = 0; mod < model.A.size(); ++mod) {
        if (ctx.novelty_w.size() <= mod || ctx.novelty_w[mod].size() == 0) continue;
        const Tensor& nw = ctx.novelty_w[mod];
        const std::size_t n = nw.shape()[0];
        for (std::size_t o = 0; o < n; ++o) {
            const double po = obs_pred[mod][o];
            if (po == 0.0) continue;
            double acc = 0.0;
            for (std::size_t c = 0; c < w.size(); ++c) acc += w[c] * nw.column_entry(o, c);
            total += po * acc;
        }
    }
    return total;
}

std::vector<std::size_t> resolve_action_set(const GenerativeModel& model,
                                            const PlanConfig& config) {
    if (!config.actions.empty()) {
        for (std::size_t a : config.actions)
            if (a >= model.num_actions()) throw UnknownAction("action set entry out of range");
        return config.actions;
    }
    std::vector<std::size_t> all(model.num_actions());
    for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;
    return all;
}

}  // namespace

std::vector<Policy> enumerate_policies(const std::vector<std::size_t>& actions,
                                       std::size_t horizon, std::size_t cap) {
    if (actions.empty()) throw EmptyInput("policy enumeration over an empty action set");
    if (horizon < 1) throw InvalidArgument("policy horizon must be at least 1");

    std::size_t count = 1;
    for (std::size_t h = 0; h < horizon; ++h) {
        if (count > cap / actions.size())
            throw HorizonOverflow("policy count exceeds cap of " + std::to_string(cap));
        count *= actions.size();
    }

    std::vector<Policy> policies;
    policies.reserve(count);
    Policy current(horizon, actions[0]);
    std::vector<std::size_t> digits(horizon, 0);
    for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t h = 0; h < horizon; ++h) current[h] = actions[digits[h]];
        policies.push_back(current);
        // Increment the least significant digit (the last step).
        for (std::size_t h = horizon; h-- > 0;) {
            if (++digits[h] < actions.size()) break;
            digits[h] = 0;
        }
    }
    return policies;
}

void rollout(const GenerativeModel& model, const Belief& posterior, const Policy& policy,
             std::vector<Belief>& state_pred, std::vector<std::vector<Categorical>>& obs_pred) {
    state_pred.clear();
    obs_pred.clear();
    state_pred.reserve(policy.size());
    obs_pred.reserve(policy.size());
    const Belief* cur = &posterior;
    for (std::size_t k = 0; k < policy.size(); ++k) {
        state_pred.push_back(propagate(model, *cur, policy[k]));
        cur = &state_pred.back();
        std::vector<Categorical> step_obs;
        step_obs.reserve(model.num_modalities());
        for (std::size_t m = 0; m < model.num_modalities(); ++m)
            step_obs.push_back(predict_observation(model, *cur, m));
        obs_pred.push_back(std::move(step_obs));
    }
}

double epistemic_value(const GenerativeModel& model, const Belief& predicted,
                       const std::vector<Categorical>& obs_pred) {
    ScoringContext ctx(model, false);
    return epistemic_value_with_ctx(model, ctx, predicted, obs_pred);
}

double pragmatic_value(const GenerativeModel& model, const std::vector<Categorical>& obs_pred) {
    ScoringContext ctx(model, false);
    return pragmatic_value_with_ctx(ctx, obs_pred);
}

double param_novelty(const GenerativeModel& model, const Belief& predicted,
                     const std::vector<Categorical>& obs_pred) {
    bool any = false;
    for (const auto& s : model.dirichlet_a) any = any || s.has_value();
    if (!any) throw InvalidArgument("param_novelty requires Dirichlet shadows on A");
    ScoringContext ctx(model, true);
    return param_novelty_with_ctx(model, ctx, predicted, obs_pred);
}

std::vector<PolicyEvaluation> score_policies(const GenerativeModel& model,
                                             const Belief& posterior,
                                             const std::vector<Policy>& policies,
                                             const PlanConfig& config) {
    ScoringContext ctx(model, config.use_param_novelty);
    if (config.use_param_novelty) {
        bool any = false;
        for (const auto& s : model.dirichlet_a) any = any || s.has_value();
        if (!any) throw InvalidArgument("param_novelty requires Dirichlet shadows on A");
    }

    std::vector<PolicyEvaluation> evals;
    evals.reserve(policies.size());
    for (const Policy& pi : policies) {
        PolicyEvaluation ev;
        ev.policy = pi;
        rollout(model, posterior, pi, ev.state_pred, ev.obs_pred);
        const std::size_t H = pi.size();
        ev.epistemic.assign(H, 0.0);
        ev.pragmatic.assign(H, 0.0);
        ev.param_novelty.assign(H, 0.0);
        double g = 0.0;
        for (std::size_t k = 0; k < H; ++k) {
            if (config.use_epistemic)
                ev.epistemic[k] =
                    epistemic_value_with_ctx(model, ctx, ev.state_pred[k], ev.obs_pred[k]);
            ev.pragmatic[k] = pragmatic_value_with_ctx(ctx, ev.obs_pred[k]);
            if (config.use_param_novelty)
                ev.param_novelty[k] =
                    param_novelty_with_ctx(model, ctx, ev.state_pred[k], ev.obs_pred[k]);
            g += -ev.epistemic[k] - ev.pragmatic[k] - ev.param_novelty[k];
        }
        ev.G = g;
        evals.push_back(std::move(ev));
    }
    return evals;
}

Categorical policy_posterior(const std::vector<double>& G,
                             const std::optional<std::vector<double>>& habit_prior,
                             const std::optional<std::vector<double>>& policy_vfe, double gamma) {
    if (G.empty()) throw EmptyInput("policy posterior over zero policies");
    if (habit_prior && habit_prior->size() != G.size())
        throw LengthMismatch("habit prior length does not match G");
    if (policy_vfe && policy_vfe->size() != G.size())
        throw LengthMismatch("policy VFE length does not match G");

    std::vector<double> logits(G.size());
    for (std::size_t p = 0; p < G.size(); ++p) {
        if (!std::isfinite(G[p])) throw NonFiniteInput("G entry is not finite");
        double v = -gamma * G[p];
        if (habit_prior) {
            const double h = (*habit_prior)[p];
            if (!(h >= 0.0)) throw NegativeEntry("habit prior entry < 0");
            v += h > 0.0 ? std::log(h) : kNegInf;
        }
        if (policy_vfe) v -= (*policy_vfe)[p];
        logits[p] = v;
    }

    double mx = kNegInf;
    for (double v : logits) mx = std::max(mx, v);
    if (mx == kNegInf) throw ZeroColumn("policy posterior has no support");
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = logits[i] == kNegInf ? 0.0 : std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return Categorical(std::move(p));
}

Categorical action_posterior(const Categorical& policy_post, const std::vector<Policy>& policies,
                             std::size_t step, const std::vector<std::size_t>& action_set) {
    if (policies.size() != policy_post.size())
        throw LengthMismatch("policy posterior length does not match policy count");
    if (!policies.empty() && step >= policies[0].size())
        throw OutOfRange("step index beyond the policy horizon");

    std::vector<double> mass(action_set.size(), 0.0);
    for (std::size_t p = 0; p < policies.size(); ++p) {
        const std::size_t a = policies[p][step];
        const auto it = std::find(action_set.begin(), action_set.end(), a);
        if (it == action_set.end()) throw UnknownAction("policy action outside the action set");
        mass[static_cast<std::size_t>(it - action_set.begin())] += policy_post[p];
    }
    return Categorical::from_unnormalized(std::move(mass));
}

Categorical factor_action_posterior(const GenerativeModel& model, const Categorical& action_post,
                                    const std::vector<std::size_t>& action_set,
                                    std::size_t factor) {
    if (factor >= model.num_factors()) throw OutOfRange("factor index out of range");
    if (action_post.size() != action_set.size())
        throw LengthMismatch("action posterior does not match the action set");
    std::vector<double> mass(model.factors[factor].control_cardinality, 0.0);
    for (std::size_t i = 0; i < action_set.size(); ++i)
        mass[model.control_map[action_set[i]][factor]] += action_post[i];
    return Categorical::from_unnormalized(std::move(mass));
}

std::size_t select_action(const Categorical& action_post, SelectionMode mode, Rng& rng) {
    if (mode == SelectionMode::Sample) return sample(action_post, rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < action_post.size(); ++i)
        if (action_post[i] > action_post[best]) best = i;
    return best;
}

PredictiveSummary predictive_summary(const std::vector<PolicyEvaluation>& evaluations,
                                     const Categorical& policy_post,
                                     const std::vector<std::size_t>& action_set) {
    if (evaluations.empty()) throw EmptyInput("predictive summary over zero policies");
    if (evaluations.size() != policy_post.size())
        throw LengthMismatch("policy posterior length does not match evaluations");

    const std::size_t H = evaluations[0].policy.size();
    const std::size_t F = evaluations[0].state_pred.empty()
                              ? 0
                              : evaluations[0].state_pred[0].factors.size();
    PredictiveSummary out;
    out.state.reserve(H);

    std::vector<Policy> policies;
    policies.reserve(evaluations.size());
    for (const auto& ev : evaluations) policies.push_back(ev.policy);

    for (std::size_t k = 0; k < H; ++k) {
        Belief mixed;
        mixed.factors.reserve(F);
        for (std::size_t f = 0; f < F; ++f) {
            std::vector<double> acc(evaluations[0].state_pred[k].factors[f].size(), 0.0);
            for (std::size_t p = 0; p < evaluations.size(); ++p) {
                const double w = policy_post[p];
                if (w == 0.0) continue;
                const auto& q = evaluations[p].state_pred[k].factors[f].probs();
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * q[i];
            }
            mixed.factors.push_back(Categorical::from_unnormalized(std::move(acc)));
        }
        out.state.push_back(std::move(mixed));
        out.action.push_back(action_posterior(policy_post, policies, k, action_set));
    }
    return out;
}

PlanResult plan(const GenerativeModel& model, const Belief& posterior, const PlanConfig& config,
                Rng& rng) {
    PlanResult result;
    result.action_set = resolve_action_set(model, config);
    const std::vector<Policy> policies =
        enumerate_policies(result.action_set, config.horizon, config.policy_cap);
    result.evaluations = score_policies(model, posterior, policies, config);
    result.G.reserve(result.evaluations.size());
    for (const auto& ev : result.evaluations) result.G.push_back(ev.G);
    result.policy_posterior =
        policy_posterior(result.G, config.habit_prior, config.policy_vfe, config.gamma);
    result.action_posterior.reserve(config.horizon);
    for (std::size_t k = 0; k < config.horizon; ++k)
        result.action_posterior.push_back(
            action_posterior(result.policy_posterior, policies, k, result.action_set));
    const std::size_t idx = select_action(result.action_posterior[0], config.selection, rng);
    result.selected_action = result.action_set[idx];
    return result;
}

}  // namespace adt
