#ifndef ADT_BRIDGE_HPP
#define ADT_BRIDGE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adt/generative_model.hpp"
#include "adt/inference.hpp"
#include "adt/rng.hpp"

namespace adt::bridge {

// Global actions, in enumeration order.
enum Action : std::size_t { DN = 0, MA = 1, RO = 2, RE = 3 };
inline constexpr std::size_t kNumActions = 4;
const char* action_name(std::size_t a);

// Digital state factor sizes.
inline constexpr std::size_t kNumRegions = 6;       // D^Omega
inline constexpr std::size_t kNumSeverity = 7;      // D^delta: 0% + six intervals
inline constexpr std::size_t kNumClasses = 37;      // O over (region, severity) + undamaged
inline constexpr std::size_t kEpi = 0;              // D^Epi states
inline constexpr std::size_t kNonEpi = 1;

// Severity interval edges in percent: [30,35], (35,45], ..., (75,80].
inline constexpr double kSeverityEdges[7] = {30.0, 35.0, 45.0, 55.0, 65.0, 75.0, 80.0};
inline constexpr double kFailureThreshold = 80.0;

enum class Mode { PragmaticOnly, Mixed, MixedLearning };
Mode mode_from_string(const std::string& s);
const char* mode_name(Mode m);

struct BridgeConfig {
    double alpha = 0.5;                 // likelihood-entropy mix in [0,1]
    double gamma = 16.0;
    std::size_t horizon = 4;
    std::size_t episode_length = 60;
    Mode mode = Mode::Mixed;
    double eta_b = 0.1;
    double confusion_accuracy = 0.9139;
    std::uint64_t seed = 0;
    // RE availability; unset = present unless the mode is pragmatic-only.
    std::optional<bool> include_re;
    double inference_tol = 1e-8;
    std::size_t max_inference_iters = 50;
    std::size_t top_k = 8;
    bool full_g = false;

    bool re_available() const {
        return include_re ? *include_re : mode != Mode::PragmaticOnly;
    }
};

void check_config(const BridgeConfig& config);

// Ground truth surfaced to the simulator only: damage region y (0 =
// undamaged), stiffness reduction delta in percent, and whether operations
// are currently restricted.
struct GroundTruthState {
    int y = 0;
    double delta = 0.0;
    bool restricted = false;

    bool failed() const { return delta > kFailureThreshold; }
    bool operator==(const GroundTruthState&) const = default;
};

// Enumerated (region, severity) class: 0 = undamaged, then region-major.
std::size_t discretize(const GroundTruthState& state);
// Severity interval index in {0..5} for delta in [30, 80]; boundary values
// belong to the lower interval except 30.
std::size_t severity_index(double delta);

// Synthetic stand-in for the offline classifier confusion matrix: a 37x37
// column-stochastic channel (column = true class, row = reported class) whose
// mean diagonal equals `accuracy`. Off-diagonal mass goes 70% to
// severity-adjacent classes in the same region, 20% to the same severity in
// other regions and 10% to the undamaged class; the undamaged column
// confuses only into the six mildest damaged classes.
Cpt synth_confusion_matrix(double accuracy, Rng& rng);

// The full generative model of the twin: factors (omega, delta, epi),
// modalities (class, action echo), all CPTs, preferences and priors.
GenerativeModel build_bridge_model(const BridgeConfig& config, Rng& rng);

// Bridge model plus the ground-truth sensing channels used by the simulator.
// The epistemic channel shares the confusion matrix with the agent's
// likelihood; the non-epistemic channel mixes in an independently seeded
// entropic component.
struct BridgeWorld {
    GenerativeModel model;
    Cpt channel_epistemic;      // 37x37
    Cpt channel_nonepistemic;   // 37x37
};
BridgeWorld build_bridge_world(const BridgeConfig& config, Rng& rng);

// Builds the ground-truth-informed reference model: identical to the twin's
// except both epistemic slices of the class likelihood come from an
// accuracy-1 channel, so class evidence is assimilated as near-Dirac.
GenerativeModel build_reference_model(const GenerativeModel& twin_model);

// One step of the unknown-to-the-agent degradation/healing process.
GroundTruthState step_ground_truth(const GroundTruthState& state, std::size_t action, Rng& rng);

// Samples the class observation through the channel selected by the previous
// action (epistemic iff prev_action == RE) and echoes the previous action.
ObservationBundle emit_observation(const GroundTruthState& state, std::size_t prev_action,
                                   const Cpt& channel_epistemic, const Cpt& channel_nonepistemic,
                                   Rng& rng);

// |sum(G - G_ref)/sum(G_ref)| * 100.
double delta_G(const std::vector<double>& G, const std::vector<double>& G_ref);

// Display labels for trace columns, per factor state.
std::vector<std::vector<std::string>> factor_state_labels();

}  // namespace adt::bridge

#endif
