#ifndef ADT_INFERENCE_HPP
#define ADT_INFERENCE_HPP

#include <optional>
#include <vector>

#include "adt/generative_model.hpp"

namespace adt {

// Observed index per modality; nullopt marks a missing modality, in which
// case inference simply remains uninformed in that dimension.
struct ObservationBundle {
    std::vector<std::optional<std::size_t>> observed;

    bool operator==(const ObservationBundle&) const = default;
};

struct InferenceResult {
    Belief posterior;
    double vfe = 0.0;
    std::size_t iterations = 0;  // completed sweeps
    bool converged = false;
    std::vector<double> vfe_history;  // one entry per sweep, after the sweep
};

// Mean-field variational posterior over all factors given the propagated
// prior and the assimilated observations, by coordinate-ascent fixed-point
// iteration (factors refreshed in declaration order, freshest co-factor
// posteriors used within a sweep). Stops when |dVFE| < tol or max_iter.
InferenceResult infer_state(const GenerativeModel& model, const Belief& prior,
                            const ObservationBundle& obs, double tol = 1e-8,
                            std::size_t max_iter = 50);

// F = E_Q[ln Q(D)] - E_Q[ln p(o|D)] - E_Q[ln prior(D)] under the mean-field
// joint; an upper bound on -ln p(o). Returns +inf when q places mass where
// the prior or the likelihood has none.
double compute_vfe(const GenerativeModel& model, const Belief& q, const ObservationBundle& obs,
                   const Belief& prior);

}  // namespace adt

#endif
