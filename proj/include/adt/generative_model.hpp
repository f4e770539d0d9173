#ifndef ADT_GENERATIVE_MODEL_HPP
#define ADT_GENERATIVE_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "adt/categorical.hpp"
#include "adt/tensor.hpp"

namespace adt {

struct FactorSpec {
    std::string name;
    std::size_t cardinality = 1;
    std::size_t control_cardinality = 1;  // 1 == uncontrollable
    bool learnable_transitions = false;

    bool operator==(const FactorSpec&) const = default;
};

struct ModalitySpec {
    std::string name;
    std::size_t cardinality = 1;
    bool learnable_likelihood = false;

    bool operator==(const ModalitySpec&) const = default;
};

// Per-factor posterior over digital states at one time step.
struct Belief {
    std::vector<Categorical> factors;

    bool operator==(const Belief&) const = default;
};

// The four-tuple <A, B, c, d> with factor/modality/control metadata and
// optional Dirichlet shadows on learnable arrays. Immutable once validated;
// learning produces a new value.
struct GenerativeModel {
    std::vector<FactorSpec> factors;
    std::vector<ModalitySpec> modalities;

    // A[m]: shape |O^m| x |D^1| x ... x |D^F|.
    std::vector<Cpt> A;
    // B[f]: shape |D^f| x |D^f| x |U^f|.
    std::vector<Cpt> B;
    // Raw prior-preference log-weights per modality, length |O^m|.
    std::vector<std::vector<double>> c;
    // Initial state prior per factor.
    std::vector<Categorical> d;

    // Shadows present iff the array is learnable.
    std::vector<std::optional<DirichletParams>> dirichlet_a;
    std::vector<std::optional<DirichletParams>> dirichlet_b;
    std::vector<std::optional<DirichletParams>> dirichlet_d;

    // control_map[action][factor] -> control index into B[factor]'s last axis.
    std::vector<std::vector<std::size_t>> control_map;

    std::size_t num_actions() const { return control_map.size(); }
    std::size_t num_factors() const { return factors.size(); }
    std::size_t num_modalities() const { return modalities.size(); }
    Belief initial_belief() const { return Belief{d}; }

    bool operator==(const GenerativeModel&) const = default;
};

enum class ViolationKind {
    ShapeViolation,
    NormalizationViolation,
    NegativeEntry,
    ControlMapGap,
    NonPositiveConcentration,
    MetadataViolation,
};

struct Violation {
    ViolationKind kind;
    std::string where;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const GenerativeModel& model);

// Q(O^m = o) = sum_d A^m[o, d] * prod_f Q(D^f = d^f).
Categorical predict_observation(const GenerativeModel& model, const Belief& belief,
                                std::size_t modality);

// Pushes each factor belief through its action-conditioned transition slice.
Belief propagate(const GenerativeModel& model, const Belief& belief, std::size_t action);

// JSON document round trip. serialize requires a valid model; deserialize
// throws SchemaError with the path of the offending field.
std::string serialize(const GenerativeModel& model);
GenerativeModel deserialize(const std::string& document);

}  // namespace adt

#endif
