#pragma once

#include <stdexcept>
#include <string>

namespace osmax {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationFailure : Error { using Error::Error; };
struct EmbeddingNotPSD : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct GridOutOfRange : Error { using Error::Error; };
struct StepMismatch : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct InvalidJointConstant : Error { using Error::Error; };
struct SingularPair : Error { using Error::Error; };
struct CholeskyFailure : Error { using Error::Error; };
struct RegimeMismatch : Error { using Error::Error; };
struct EmptySamples : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace osmax
