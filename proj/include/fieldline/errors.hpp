#pragma once

#include <stdexcept>
#include <string>

namespace fieldline {

/// Error categories; the numeric values are the status codes of the C API.
enum class ErrorKind {
    Config = 2,
    Numeric = 3,
    Invariant = 4,
    Domain = 5,
    Usage = 6,
    Io = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
private:
    ErrorKind kind_;
};

/// bad or unknown configuration value
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// evaluation outside the domain of a function (singularity, forbidden region)
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// a numerical procedure failed to converge or produced a non-finite value
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

/// conserved-quantity or other post-condition breach
struct InvariantError : Error {
    explicit InvariantError(const std::string& what) : Error(ErrorKind::Invariant, what) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace fieldline
