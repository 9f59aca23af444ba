#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphclust {

enum class ErrorKind {
    EtaOutOfRange,
    DegenerateData,
    InvalidArgument,
    NotFullDimensional,
    SingularIntersection,
    EmptyIntersection,
    DegenerateProjection,
    AntipodalEndpoints,
    NumericalLoss,
    QPNotConverged,
    DimensionTooHigh,
    RankDeficient,
    ParseError,
    EmptyFile,
    RaggedRows,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotFullDimensional: return "NotFullDimensional";
    case ErrorKind::SingularIntersection: return "SingularIntersection";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::AntipodalEndpoints: return "AntipodalEndpoints";
    case ErrorKind::NumericalLoss: return "NumericalLoss";
    case ErrorKind::QPNotConverged: return "QPNotConverged";
    case ErrorKind::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Single exception type for the library; the kind is machine-readable,
/// the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace sphclust
