#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace softtri {

// Closed set of failure identifiers. The string form (to_string) is the
// stable machine code used by the CLI and the HTTP API.
enum class ErrorCode {
    OrderViolation,
    PhiOutOfRange,
    NonFinite,
    QOutOfRange,
    BadCount,
    XOutOfRange,
    InvalidParams,
    GridTooCoarse,
    InvalidGrid,
    EmptyPanel,
    NonPositiveWeight,
    NegativeSupport,
    UnsortedGrid,
    NonMonotoneCdf,
    NoQuestions,
    InvalidQuestion,
    UnknownSession,
    UnknownQuestion,
    SessionClosed,
    BoundsViolation,
    NoEstimates,
    InvalidRequest,
    IoError,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace softtri
