#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasekit {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  NoConvergence,
  NotPSD,
  NotSectorial,
  NotQuasiSectorial,
  NotSemiSectorial,
  InvalidSector,
  NotSymmetric,
  InvalidParam,
  PoleProximity,
  NotSemiSimple,
  NotLyapunovStable,
  NotStable,
  NotFrequencyWiseSemiSectorial,
  NotAccretiveAtStart,
  IllPosed,
  TargetOutsideEnvelope,
  EnvelopeViolated,
  ConditionHolds,
  SynthesisFailed,
  NotInner,
  AssumptionViolatedAtInfinity,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// frontends (CLI, Python) can map it to a stable machine-readable name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phasekit
