#include "tnstream/error.hpp"

namespace tnstream {

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::EmptyPointSet: return "EmptyPointSet";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case Errc::UnknownId: return "UnknownId";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::AllScoresInfinite: return "AllScoresInfinite";
    case Errc::NonpositiveThreshold: return "NonpositiveThreshold";
    case Errc::NotAdd: return "NotAdd";
    case Errc::OutlierPoint: return "OutlierPoint";
    case Errc::SubsetNotContained: return "SubsetNotContained";
    case Errc::SamePoint: return "SamePoint";
    case Errc::OutOfOrderArrival: return "OutOfOrderArrival";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Empty: return "Empty";
    case Errc::ParseError: return "ParseError";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

}  // namespace tnstream
