#pragma once

#include <stdexcept>
#include <string>

namespace tnstream {

enum class Errc {
    EmptyPointSet,
    DimensionMismatch,
    DuplicateId,
    NonFiniteCoordinate,
    UnknownId,
    InvalidArgument,
    KTooLarge,
    AllScoresInfinite,
    NonpositiveThreshold,
    NotAdd,
    OutlierPoint,
    SubsetNotContained,
    SamePoint,
    OutOfOrderArrival,
    InvalidConfig,
    LengthMismatch,
    Empty,
    ParseError,
    ArityMismatch,
    InvalidSpec,
    Io,
};

const char* to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tnstream
