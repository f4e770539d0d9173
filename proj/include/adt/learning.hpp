#ifndef ADT_LEARNING_HPP
#define ADT_LEARNING_HPP

#include "adt/generative_model.hpp"
#include "adt/inference.hpp"

namespace adt {

struct LearningConfig {
    double eta_A = 0.0;
    double eta_B = 0.0;
    double eta_d = 0.0;
    bool learn_A = false;
    bool learn_B = false;
    bool learn_d = false;
};

// conc' = conc + eta * onehot(obs) (x) posterior. Adds exactly eta of mass.
DirichletParams update_A(const DirichletParams& conc, std::size_t obs, const Belief& posterior,
                         double eta);

// Updates the control-u slice only: conc'[j,i,u] += eta * q_now[j] * q_prev[i].
// Throws FrozenArray when the owning factor is not learnable.
DirichletParams update_B(const DirichletParams& conc, const Categorical& q_now,
                         const Categorical& q_prev, std::size_t control, double eta,
                         bool learnable = true);

// conc' = conc + eta * q_now.
DirichletParams update_d(const DirichletParams& conc, const Categorical& q_now, double eta);

// One post-action learning pass over every learnable array; the active CPTs
// are recomputed from the updated concentrations. Arrays whose previous-step
// inputs are unavailable (B at t = 0) are left untouched by passing nullopt.
GenerativeModel learn(const GenerativeModel& model, const ObservationBundle& obs,
                      const Belief& posterior,
                      const std::optional<Belief>& previous_posterior,
                      std::optional<std::size_t> previous_action, const LearningConfig& config);

}  // namespace adt

#endif
