#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pdpk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries one message per violated field, each prefixed with its JSON path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  explicit ConfigError(std::string violation)
      : ConfigError(std::vector<std::string>{std::move(violation)}) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

#define PDPK_DEFINE_ERROR(Name) \
  class Name : public Error {   \
   public:                      \
    using Error::Error;         \
  }

PDPK_DEFINE_ERROR(DomainError);
PDPK_DEFINE_ERROR(SingularityError);
PDPK_DEFINE_ERROR(EmptyTargetError);
PDPK_DEFINE_ERROR(NoAdjustableParameterError);
PDPK_DEFINE_ERROR(InitialisationError);
PDPK_DEFINE_ERROR(EstimatorError);
PDPK_DEFINE_ERROR(EmptyRuleSetError);
PDPK_DEFINE_ERROR(IoError);
PDPK_DEFINE_ERROR(ParseError);
PDPK_DEFINE_ERROR(SplitInfeasibleError);
PDPK_DEFINE_ERROR(EmptyGraphError);
PDPK_DEFINE_ERROR(TrainingDivergedError);
PDPK_DEFINE_ERROR(UnknownIdError);
PDPK_DEFINE_ERROR(EmptyInputError);
PDPK_DEFINE_ERROR(DegenerateCandidateSetError);
PDPK_DEFINE_ERROR(InsufficientQualitiesError);

#undef PDPK_DEFINE_ERROR

}  // namespace pdpk
