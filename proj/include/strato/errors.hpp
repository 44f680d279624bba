#pragma once

#include <stdexcept>
#include <string>

namespace strato {

// Failure categories surfaced by the library. The CLI maps them to exit codes:
// input data problems -> 2, parameter/resolution rejections -> 3, numerical
// failures -> 4.
enum class ErrorCode {
    InvalidParams,
    StratificationUnstable,
    NonPositiveBuoyancy,
    GridError,
    ResolutionError,
    EigenFailure,
    OperatorSingular,
    MassMatrixDegenerate,
    StepFailure,
    BlowupDetected,
    UnstableJump,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace strato
