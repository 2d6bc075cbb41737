#pragma once

#include <stdexcept>
#include <string>

namespace strainmodal {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- record ingestion and preprocessing ---
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct InvalidCutoff : Error { using Error::Error; };
struct RecordTooShort : Error { using Error::Error; };

// --- subspace identification ---
struct RankDeficientPast : Error { using Error::Error; };
struct OrderTooHigh : Error { using Error::Error; };
struct SvdFailure : Error { using Error::Error; };
struct DefectiveSystemMatrix : Error { using Error::Error; };
struct NotEnoughStableModes : Error { using Error::Error; };

// --- beam shapes and fitting ---
struct PositionOutOfRange : Error { using Error::Error; };
struct RootsNotFound : Error { using Error::Error; };
struct FitDegenerate : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct IllConditionedFit : Error { using Error::Error; };
struct DegenerateShape : Error { using Error::Error; };

// --- simulation ---
struct NyquistViolation : Error { using Error::Error; };

// --- metrics ---
struct ZeroVector : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct DivideByZeroBaseline : Error { using Error::Error; };

} // namespace strainmodal
