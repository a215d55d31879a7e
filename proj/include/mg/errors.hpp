#pragma once

#include <stdexcept>
#include <string>

namespace mg {

enum class ErrorKind {
    AllBelowFloor,
    DomainError,
    NotIntegrable,
    PeriodicityViolation,
    NonConservingModel,
    CurlObstruction,
    BlowUp,
    FloorBreach,
    ConfigError
};

inline const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::AllBelowFloor: return "AllBelowFloor";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotIntegrable: return "NotIntegrable";
    case ErrorKind::PeriodicityViolation: return "PeriodicityViolation";
    case ErrorKind::NonConservingModel: return "NonConservingModel";
    case ErrorKind::CurlObstruction: return "CurlObstruction";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::FloorBreach: return "FloorBreach";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "?";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind), message_(what) {}
    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace mg
