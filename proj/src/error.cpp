#include "softtri/error.hpp"

namespace softtri {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::OrderViolation: return "ORDER_VIOLATION";
    case ErrorCode::PhiOutOfRange: return "PHI_OUT_OF_RANGE";
    case ErrorCode::NonFinite: return "NON_FINITE";
    case ErrorCode::QOutOfRange: return "Q_OUT_OF_RANGE";
    case ErrorCode::BadCount: return "BAD_COUNT";
    case ErrorCode::XOutOfRange: return "X_OUT_OF_RANGE";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::InvalidGrid: return "INVALID_GRID";
    case ErrorCode::EmptyPanel: return "EMPTY_PANEL";
    case ErrorCode::NonPositiveWeight: return "NON_POSITIVE_WEIGHT";
    case ErrorCode::NegativeSupport: return "NEGATIVE_SUPPORT";
    case ErrorCode::UnsortedGrid: return "UNSORTED_GRID";
    case ErrorCode::NonMonotoneCdf: return "NON_MONOTONE_CDF";
    case ErrorCode::NoQuestions: return "NO_QUESTIONS";
    case ErrorCode::InvalidQuestion: return "INVALID_QUESTION";
    case ErrorCode::UnknownSession: return "UNKNOWN_SESSION";
    case ErrorCode::UnknownQuestion: return "UNKNOWN_QUESTION";
    case ErrorCode::SessionClosed: return "SESSION_CLOSED";
    case ErrorCode::BoundsViolation: return "BOUNDS_VIOLATION";
    case ErrorCode::NoEstimates: return "NO_ESTIMATES";
    case ErrorCode::InvalidRequest: return "INVALID_REQUEST";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

} // namespace softtri
