#include "polarmask/error.hpp"

namespace polarmask {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateContour: return "DegenerateContour";
        case ErrorKind::EmptyRaster: return "EmptyRaster";
        case ErrorKind::EmptyMask: return "EmptyMask";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::BothEmpty: return "BothEmpty";
        case ErrorKind::InvalidRays: return "InvalidRays";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::OutOfExtent: return "OutOfExtent";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace polarmask
