#pragma once

#include <stdexcept>
#include <string>

namespace choroid {

enum class ErrorCode {
    IoError,
    DimensionMismatch,
    InvalidArgument,
    AllRowsBlack,
    EmptyMask,
    LocusOutsideSpan,
    RoiExceedsSegmentation,
    DegenerateInput,
    WeightCountMismatch,
    GraphError,
    BackendError,
};

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace choroid
