#include "adt/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adt/errors.hpp"

namespace adt::bridge {

namespace {

constexpr double kLikelihoodFloor = 1e-5;
constexpr double kTransitionFloor = 1e-3;

// Class index for factor states (region 0-based, severity state 0..6 where
// 0 is the undamaged state).
std::size_t class_of(std::size_t region, std::size_t severity_state) {
    if (severity_state == 0) return 0;
    return 1 + region * (kNumSeverity - 1) + (severity_state - 1);
}

Tensor add_floor(Tensor t, double floor) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += floor;
    return t;
}

// Expands a 37x37 class channel into the [37, 6, 7] slice over factor states.
Tensor expand_channel(const Cpt& channel) {
    Tensor out({kNumClasses, kNumRegions, kNumSeverity});
    for (std::size_t o = 0; o < kNumClasses; ++o)
        for (std::size_t w = 0; w < kNumRegions; ++w)
            for (std::size_t s = 0; s < kNumSeverity; ++s)
                out.at({o, w, s}) = channel.tensor().column_entry(o, class_of(w, s));
    return out;
}

Tensor entropic_slice(Rng& rng) {
    Tensor raw({kNumClasses, kNumRegions, kNumSeverity});
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = rng.next_double();
    return normalize(raw).tensor();
}

// Assembles the [.., 2] likelihood from the two [..] epistemic-state slices.
Cpt stack_epi(const Tensor& epi, const Tensor& non_epi) {
    std::vector<std::size_t> shape = epi.shape();
    shape.push_back(2);
    Tensor out(std::move(shape));
    for (std::size_t i = 0; i < epi.size(); ++i) {
        out[2 * i + kEpi] = epi[i];
        out[2 * i + kNonEpi] = non_epi[i];
    }
    return Cpt(std::move(out));
}

Tensor mix_and_normalize(const Tensor& informative, const Tensor& entropic, double alpha) {
    Tensor mixed = informative;
    for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] = (1.0 - alpha) * informative[i] + alpha * entropic[i];
    return normalize(mixed).tensor();
}

// Action-echo likelihood under the non-epistemic state, constant across the
// damage-region factor. Columns are the seven severity states; the RE row is
// all-zero before flooring.
constexpr double kActionEchoNonEpi[kNumActions][kNumSeverity] = {
    {0.9, 0.4, 0.3, 0.1, 0.15, 0.2, 0.25},    // DN
    {0.08, 0.3, 0.45, 0.4, 0.3, 0.2, 0.1},    // MA
    {0.02, 0.3, 0.25, 0.5, 0.55, 0.6, 0.65},  // RO
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},      // RE
};

Cpt build_action_likelihood() {
    Tensor epi({kNumActions, kNumRegions, kNumSeverity});
    for (std::size_t w = 0; w < kNumRegions; ++w)
        for (std::size_t s = 0; s < kNumSeverity; ++s) epi.at({RE, w, s}) = 1.0;

    Tensor non_epi({kNumActions, kNumRegions, kNumSeverity});
    for (std::size_t a = 0; a < kNumActions; ++a)
        for (std::size_t w = 0; w < kNumRegions; ++w)
            for (std::size_t s = 0; s < kNumSeverity; ++s)
                non_epi.at({a, w, s}) = kActionEchoNonEpi[a][s];
    non_epi = normalize(add_floor(std::move(non_epi), kLikelihoodFloor)).tensor();

    return stack_epi(epi, non_epi);
}

Cpt build_region_transitions() {
    Tensor b({kNumRegions, kNumRegions, 1});
    for (std::size_t j = 0; j < kNumRegions; ++j)
        for (std::size_t i = 0; i < kNumRegions; ++i)
            b.at({j, i, 0}) = j == i ? 0.8 : 0.2 / (kNumRegions - 1);
    return Cpt(std::move(b));
}

// Banded severity chains: probability mass over interval shifts, with excess
// accumulating at the end of the chain.
Cpt build_severity_transitions() {
    const std::size_t n = kNumSeverity;
    Tensor b({n, n, kNumActions});

    auto put_degrade = [&b, n](std::size_t action, const std::vector<double>& shift_probs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < shift_probs.size(); ++k) {
                const std::size_t j = std::min(i + k, n - 1);
                b.at({j, i, action}) += shift_probs[k];
            }
    };
    auto put_improve = [&b, n](std::size_t action, const std::vector<double>& shift_probs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < shift_probs.size(); ++k) {
                const std::size_t j = i > k ? i - k : 0;
                b.at({j, i, action}) += shift_probs[k];
            }
    };

    put_degrade(DN, {0.85, 0.10, 0.05});
    put_improve(MA, {0.05, 0.15, 0.20, 0.20, 0.20, 0.20});
    put_degrade(RO, {0.92, 0.05, 0.03});
    put_degrade(RE, {0.90, 0.10});

    return normalize(add_floor(std::move(b), kTransitionFloor));
}

// Boolean epistemic switch: RE leads to Epi, everything else to Non-Epi.
Cpt build_epi_transitions() {
    Tensor b({2, 2, kNumActions});
    for (std::size_t a = 0; a < kNumActions; ++a) {
        const std::size_t target = a == RE ? kEpi : kNonEpi;
        for (std::size_t i = 0; i < 2; ++i) b.at({target, i, a}) = 1.0;
    }
    return Cpt(std::move(b));
}

std::vector<double> build_class_preferences() {
    std::vector<double> c(kNumClasses, 0.0);
    const double midpoints[5] = {0.325, 0.40, 0.50, 0.60, 0.70};
    for (std::size_t w = 0; w < kNumRegions; ++w)
        for (std::size_t sev = 0; sev < kNumSeverity - 1; ++sev) {
            const std::size_t cls = class_of(w, sev + 1);
            c[cls] = sev < 5 ? -std::exp(midpoints[sev]) : -10.0;
        }
    return c;
}

}  // namespace

const char* action_name(std::size_t a) {
    switch (a) {
        case DN: return "DN";
        case MA: return "MA";
        case RO: return "RO";
        case RE: return "RE";
        default: throw UnknownAction("action index out of range");
    }
}

Mode mode_from_string(const std::string& s) {
    if (s == "pragmatic_only") return Mode::PragmaticOnly;
    if (s == "mixed") return Mode::Mixed;
    if (s == "mixed_learning") return Mode::MixedLearning;
    throw InvalidArgument("unknown mode: " + s);
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::PragmaticOnly: return "pragmatic_only";
        case Mode::Mixed: return "mixed";
        case Mode::MixedLearning: return "mixed_learning";
    }
    return "?";
}

void check_config(const BridgeConfig& config) {
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0))
        throw InvalidArgument("alpha must lie in [0, 1]");
    if (!(config.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    if (config.horizon < 1) throw InvalidArgument("horizon must be at least 1");
    if (config.episode_length < 1) throw InvalidArgument("episode length must be at least 1");
    if (!(config.eta_b >= 0.0 && config.eta_b <= 1.0))
        throw InvalidArgument("eta_b must lie in [0, 1]");
    if (!(config.confusion_accuracy > 0.0 && config.confusion_accuracy <= 1.0))
        throw InvalidArgument("confusion accuracy must lie in (0, 1]");
}

std::size_t severity_index(double delta) {
    if (delta < kSeverityEdges[0] || delta > kSeverityEdges[6])
        throw OutOfRange("severity outside [30, 80]");
    for (std::size_t k = 1; k < 7; ++k)
        if (delta <= kSeverityEdges[k]) return k - 1;
    return 5;
}

std::size_t discretize(const GroundTruthState& state) {
    if (state.delta > kFailureThreshold) throw OutOfRange("state beyond the failure threshold");
    if (state.y == 0) return 0;
    return 1 + (static_cast<std::size_t>(state.y) - 1) * (kNumSeverity - 1) +
           severity_index(state.delta);
}

Cpt synth_confusion_matrix(double accuracy, Rng& rng) {
    if (!(accuracy > 0.0 && accuracy <= 1.0))
        throw InvalidArgument("accuracy must lie in (0, 1]");

    Tensor m({kNumClasses, kNumClasses});
    if (accuracy == 1.0) {
        for (std::size_t c = 0; c < kNumClasses; ++c) m.column_entry(c, c) = 1.0;
        return Cpt(std::move(m));
    }

    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double jitter = rng.uniform(-0.004, 0.004);
        const double diag = std::clamp(accuracy + jitter, 0.01, 0.999);
        const double rem = 1.0 - diag;
        m.column_entry(c, c) = diag;

        if (c == 0) {
            // Undamaged confuses only into the mildest class of each region.
            for (std::size_t w = 0; w < kNumRegions; ++w)
                m.column_entry(class_of(w, 1), 0) += rem / kNumRegions;
            continue;
        }

        const std::size_t region = (c - 1) / (kNumSeverity - 1);
        const std::size_t sev = (c - 1) % (kNumSeverity - 1);  // 0..5

        std::vector<std::size_t> adjacent;
        if (sev > 0) adjacent.push_back(c - 1);
        if (sev + 1 < kNumSeverity - 1) adjacent.push_back(c + 1);
        for (std::size_t a : adjacent) m.column_entry(a, c) += 0.7 * rem / adjacent.size();

        for (std::size_t w = 0; w < kNumRegions; ++w) {
            if (w == region) continue;
            m.column_entry(class_of(w, sev + 1), c) += 0.2 * rem / (kNumRegions - 1);
        }

        m.column_entry(0, c) += 0.1 * rem;
    }
    return normalize(m);
}

namespace {

GenerativeModel assemble_model(const BridgeConfig& config, const Cpt& confusion,
                               Rng& entropic_rng) {
    GenerativeModel m;
    m.factors = {
        {"omega", kNumRegions, 1, true},
        {"delta", kNumSeverity, kNumActions, true},
        {"epi", 2, kNumActions, false},
    };
    m.modalities = {
        {"class", kNumClasses, false},
        {"action", kNumActions, false},
    };

    const Tensor epi_slice =
        normalize(add_floor(expand_channel(confusion), kLikelihoodFloor)).tensor();
    const Tensor non_epi_slice =
        mix_and_normalize(epi_slice, entropic_slice(entropic_rng), config.alpha);
    m.A.push_back(stack_epi(epi_slice, non_epi_slice));
    m.A.push_back(build_action_likelihood());

    m.B.push_back(build_region_transitions());
    m.B.push_back(build_severity_transitions());
    m.B.push_back(build_epi_transitions());

    m.c.push_back(build_class_preferences());
    m.c.push_back({5.5, -5.0, 2.5, -0.5});  // DN, MA, RO, RE

    m.d.push_back(Categorical::uniform(kNumRegions));
    m.d.push_back(Categorical::dirac(kNumSeverity, 0));
    m.d.push_back(Categorical::uniform(2));

    m.dirichlet_a = {std::nullopt, std::nullopt};
    // Shadow concentrations equal the initial transition probabilities, so
    // the Dirichlet mean reproduces the CPTs exactly. The epistemic switch is
    // frozen by design.
    m.dirichlet_b.emplace_back(DirichletParams(m.B[0].tensor()));
    m.dirichlet_b.emplace_back(DirichletParams(m.B[1].tensor()));
    m.dirichlet_b.emplace_back(std::nullopt);
    m.dirichlet_d = {std::nullopt, std::nullopt, std::nullopt};

    m.control_map.resize(kNumActions);
    for (std::size_t a = 0; a < kNumActions; ++a) m.control_map[a] = {0, a, a};

    return m;
}

}  // namespace

GenerativeModel build_bridge_model(const BridgeConfig& config, Rng& rng) {
    check_config(config);
    Rng conf_rng = rng.split();
    Rng entropic_rng = rng.split();
    const Cpt confusion = synth_confusion_matrix(config.confusion_accuracy, conf_rng);
    GenerativeModel m = assemble_model(config, confusion, entropic_rng);
    const ValidationReport report = validate(m);
    if (!report.ok()) throw AdtError("constructed bridge model failed validation: " +
                                     report.violations.front().where);
    return m;
}

BridgeWorld build_bridge_world(const BridgeConfig& config, Rng& rng) {
    check_config(config);
    Rng conf_rng = rng.split();
    Rng entropic_rng = rng.split();
    Rng world_entropic_rng = rng.split();

    const Cpt confusion = synth_confusion_matrix(config.confusion_accuracy, conf_rng);
    BridgeWorld world{assemble_model(config, confusion, entropic_rng), confusion, confusion};

    // Non-epistemic sensing channel: same mixing recipe as the agent's
    // likelihood but with its own entropic draw, so model and channel are
    // correlated without sharing the corruption.
    Tensor entropic({kNumClasses, kNumClasses});
    for (std::size_t i = 0; i < entropic.size(); ++i) entropic[i] = world_entropic_rng.next_double();
    Tensor mixed = confusion.tensor();
    const Tensor ent_norm = normalize(entropic).tensor();
    for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] = (1.0 - config.alpha) * mixed[i] + config.alpha * ent_norm[i];
    world.channel_nonepistemic = normalize(mixed);

    const ValidationReport report = validate(world.model);
    if (!report.ok()) throw AdtError("constructed bridge model failed validation: " +
                                     report.violations.front().where);
    return world;
}

GenerativeModel build_reference_model(const GenerativeModel& twin_model) {
    GenerativeModel ref = twin_model;
    Tensor id({kNumClasses, kNumClasses});
    for (std::size_t c = 0; c < kNumClasses; ++c) id.column_entry(c, c) = 1.0;
    const Tensor slice =
        normalize(add_floor(expand_channel(Cpt(std::move(id))), kLikelihoodFloor)).tensor();
    ref.A[0] = stack_epi(slice, slice);
    return ref;
}

namespace {

// Shared degradation dynamics for the DN and RO regimes.
GroundTruthState degrade(const GroundTruthState& state, bool reduced_rate, Rng& rng) {
    GroundTruthState next = state;
    if (state.y == 0) {
        const double p_stay = reduced_rate ? 0.75 : 0.5;
        const double u = rng.next_double();
        if (u >= p_stay) {
            const double slot = (1.0 - p_stay) / kNumRegions;
            next.y = 1 + std::min<int>(static_cast<int>((u - p_stay) / slot),
                                       static_cast<int>(kNumRegions) - 1);
            next.delta = rng.uniform(30.0, 35.0);
        }
    } else {
        const double mean = reduced_rate ? 0.95 : 1.5;
        const double sd = reduced_rate ? 0.5 : 1.0;
        next.delta += std::max(0.0, rng.normal(mean, sd));
    }
    return next;
}

}  // namespace

GroundTruthState step_ground_truth(const GroundTruthState& state, std::size_t action, Rng& rng) {
    switch (action) {
        case DN: {
            GroundTruthState next = degrade(state, false, rng);
            next.restricted = false;
            return next;
        }
        case RO: {
            GroundTruthState next = degrade(state, true, rng);
            next.restricted = true;
            return next;
        }
        case RE: {
            // High-fidelity sensing does not alter the operating regime.
            return degrade(state, state.restricted, rng);
        }
        case MA: {
            GroundTruthState next = state;
            next.restricted = false;
            if (state.y != 0) {
                const double decrement = std::min(-10.0, rng.normal(-25.0, 15.0));
                next.delta += decrement;
                if (next.delta < 30.0) {
                    next.y = 0;
                    next.delta = 0.0;
                }
            }
            return next;
        }
        default:
            throw UnknownAction("action index out of range");
    }
}

ObservationBundle emit_observation(const GroundTruthState& state, std::size_t prev_action,
                                   const Cpt& channel_epistemic, const Cpt& channel_nonepistemic,
                                   Rng& rng) {
    const std::size_t true_class = discretize(state);
    const Cpt& channel = prev_action == RE ? channel_epistemic : channel_nonepistemic;
    const Categorical column = channel.column(true_class);
    const std::size_t reported = sample(column, rng);
    return ObservationBundle{{reported, prev_action}};
}

double delta_G(const std::vector<double>& G, const std::vector<double>& G_ref) {
    if (G.size() != G_ref.size()) throw LengthMismatch("EFE vectors differ in length");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) {
        num += G[i] - G_ref[i];
        den += G_ref[i];
    }
    if (den == 0.0) throw DegenerateReference("reference EFE sums to zero");
    return std::abs(num / den) * 100.0;
}

std::vector<std::vector<std::string>> factor_state_labels() {
    std::vector<std::string> omega;
    for (std::size_t w = 1; w <= kNumRegions; ++w) omega.push_back("omega_" + std::to_string(w));
    std::vector<std::string> delta{"0", "30_35", "35_45", "45_55", "55_65", "65_75", "75_80"};
    std::vector<std::string> epi{"epi", "non_epi"};
    return {omega, delta, epi};
}

}  // namespace adt::bridge
