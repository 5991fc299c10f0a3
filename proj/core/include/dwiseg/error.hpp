#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dwiseg {

/// Base of the library error taxonomy. category() is the stable
/// machine-readable string the CLI prints on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(category + ": " + message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& m) : Error("invalid-parameter", m) {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& m) : Error("invalid-input", m) {}
};

struct InvalidGeometry : Error {
    explicit InvalidGeometry(const std::string& m) : Error("invalid-geometry", m) {}
};

struct MissingClass : Error {
    explicit MissingClass(const std::string& m) : Error("missing-class", m) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& m) : Error("divergence", m) {}
};

struct DegenerateData : Error {
    explicit DegenerateData(const std::string& m) : Error("degenerate-data", m) {}
};

struct UndefinedKappa : Error {
    explicit UndefinedKappa(const std::string& m) : Error("undefined-kappa", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io-error", m) {}
};

} // namespace dwiseg
