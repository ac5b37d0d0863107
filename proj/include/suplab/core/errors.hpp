#pragma once

#include <stdexcept>
#include <string>

namespace suplab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGrid : Error { using Error::Error; };
struct WindowTooSmall : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct EmptyEnsemble : Error { using Error::Error; };
struct CflViolation : Error { using Error::Error; };
struct MassDrift : Error { using Error::Error; };
struct NegativeDensity : Error { using Error::Error; };
struct NonmonotoneBeta : Error { using Error::Error; };
struct KernelUnbounded : Error { using Error::Error; };
struct TrajectoryTooShort : Error { using Error::Error; };
struct NegativeDiffusion : Error { using Error::Error; };
struct StartOutsideDomain : Error { using Error::Error; };
struct GeneratorBoundFailed : Error { using Error::Error; };
struct DominationViolated : Error { using Error::Error; };
struct InitialDominationFails : Error { using Error::Error; };
struct CheckpointOutsideTrajectory : Error { using Error::Error; };
struct UnknownPsi : Error { using Error::Error; };
struct UnknownCatalogId : Error { using Error::Error; };

/// Configuration / scenario-file errors map to CLI exit code 2.
struct ScenarioError : Error { using Error::Error; };

} // namespace suplab
