#pragma once

#include <stdexcept>
#include <string>

namespace qbh {

enum class ErrorKind {
    Argument,     // bad parameter or precondition violation
    Format,       // malformed input file
    Unsupported,  // recognized but unsupported encoding/operation
    Config,       // inconsistent configuration
    Data,         // missing or conflicting data (duplicate id, absent feature kind)
    Integrity,    // store corruption detected on load
    Conditioning  // numerically singular system
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error argument_error(std::string msg)  { return Error(ErrorKind::Argument, std::move(msg)); }
inline Error format_error(std::string msg)    { return Error(ErrorKind::Format, std::move(msg)); }
inline Error unsupported_error(std::string msg){ return Error(ErrorKind::Unsupported, std::move(msg)); }
inline Error config_error(std::string msg)    { return Error(ErrorKind::Config, std::move(msg)); }
inline Error data_error(std::string msg)      { return Error(ErrorKind::Data, std::move(msg)); }
inline Error integrity_error(std::string msg) { return Error(ErrorKind::Integrity, std::move(msg)); }

}  // namespace qbh
