#pragma once

#include <stdexcept>
#include <string>

namespace isodamp {

// Base error for every failure raised by the toolkit. The message is the
// short diagnostic documented on each operation ("empty controller", ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a configuration document violates a field invariant. `path`
// is the dotted field path ("plant.den", "stages[1].q").
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class InfeasibleDesign : public Error {
public:
    using Error::Error;
};

} // namespace isodamp
