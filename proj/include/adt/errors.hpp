#ifndef ADT_ERRORS_HPP
#define ADT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adt {

// Base class for all library errors so callers can catch broadly.
struct AdtError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroColumn : AdtError {
    using AdtError::AdtError;
};
struct NegativeEntry : AdtError {
    using AdtError::AdtError;
};
struct NonFiniteInput : AdtError {
    using AdtError::AdtError;
};
struct SupportMismatch : AdtError {
    using AdtError::AdtError;
};
struct AbsoluteContinuityViolation : AdtError {
    using AdtError::AdtError;
};
struct EmptyInput : AdtError {
    using AdtError::AdtError;
};
struct NonPositiveConcentration : AdtError {
    using AdtError::AdtError;
};
struct ShapeMismatch : AdtError {
    using AdtError::AdtError;
};
struct UnknownModality : AdtError {
    using AdtError::AdtError;
};
struct UnknownAction : AdtError {
    using AdtError::AdtError;
};
struct UnknownControlIndex : AdtError {
    using AdtError::AdtError;
};
struct FrozenArray : AdtError {
    using AdtError::AdtError;
};
struct SchemaError : AdtError {
    using AdtError::AdtError;
};
struct ContradictoryEvidence : AdtError {
    using AdtError::AdtError;
};
struct HorizonOverflow : AdtError {
    using AdtError::AdtError;
};
struct LengthMismatch : AdtError {
    using AdtError::AdtError;
};
struct DegenerateReference : AdtError {
    using AdtError::AdtError;
};
struct OutOfRange : AdtError {
    using AdtError::AdtError;
};
struct IoError : AdtError {
    using AdtError::AdtError;
};
struct InvalidArgument : AdtError {
    using AdtError::AdtError;
};

}  // namespace adt

#endif
